#include "uqsched/serialization.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "uqsched/errors.hpp"

namespace uqsched {

namespace {

// Decoded values that break a type invariant are malformed input, not a
// domain error on the caller's side.
template <class Fn>
auto decoded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object()) {
    throw FormatError(std::string("expected an object holding '") + key + "'");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  return *it;
}

template <typename T>
T get_as(const json& j, const char* key) {
  const json& v = member(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

double get_number(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) {
    throw FormatError(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

std::vector<double> get_numbers(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_array()) {
    throw FormatError(std::string("field '") + key + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw FormatError(std::string("field '") + key + "' must hold numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

const json& get_array(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_array()) {
    throw FormatError(std::string("field '") + key + "' must be an array");
  }
  return v;
}

Season get_season(const json& j, const char* key) {
  const auto text = get_as<std::string>(j, key);
  auto s = parse_season(text);
  if (!s) {
    throw FormatError("unknown season '" + text + "'");
  }
  return *s;
}

Timestamp get_timestamp(const json& j, const char* key) {
  const auto text = get_as<std::string>(j, key);
  auto ts = parse_timestamp(text);
  if (!ts) {
    throw FormatError("bad timestamp '" + text + "'");
  }
  return *ts;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

json to_json(const StepCdf& cdf) {
  return json{{"knots", cdf.knots()}, {"cum_probs", cdf.cum_probs()}};
}

StepCdf step_cdf_from_json(const json& j) {
  return decoded([&] { return StepCdf(get_numbers(j, "knots"), get_numbers(j, "cum_probs")); });
}

json to_json(const PBox& pbox) {
  return json{{"lower", to_json(pbox.lower())},
              {"upper", to_json(pbox.upper())},
              {"support", json::array({pbox.support_min(), pbox.support_max()})}};
}

PBox pbox_from_json(const json& j) {
  PBox box = decoded([&] { return PBox(step_cdf_from_json(member(j, "lower")), step_cdf_from_json(member(j, "upper"))); });
  const auto support = get_numbers(j, "support");
  if (support.size() != 2 || support[0] != box.support_min() || support[1] != box.support_max()) {
    throw FormatError("p-box support does not match its bounds");
  }
  return box;
}

json to_json(const GroupKey& key) {
  return json{{"sequence_id", key.sequence_id},
              {"operator_id", key.operator_id},
              {"season", std::string(to_string(key.season))}};
}

GroupKey group_key_from_json(const json& j) {
  return GroupKey{get_as<std::string>(j, "sequence_id"), get_as<std::string>(j, "operator_id"),
                  get_season(j, "season")};
}

json to_json(const TaskRecord& r) {
  return json{{"record_id", r.record_id},
              {"sequence_id", r.sequence_id},
              {"operator_id", r.operator_id},
              {"season", std::string(to_string(r.season))},
              {"skill", r.skill ? json(*r.skill) : json(nullptr)},
              {"predicted_s", r.predicted_s},
              {"observed_s", r.observed_s},
              {"timestamp", format_timestamp(r.timestamp)}};
}

TaskRecord task_record_from_json(const json& j) {
  TaskRecord r;
  r.record_id = get_as<std::string>(j, "record_id");
  r.sequence_id = get_as<std::string>(j, "sequence_id");
  r.operator_id = get_as<std::string>(j, "operator_id");
  r.season = get_season(j, "season");
  const json& skill = member(j, "skill");
  if (!skill.is_null()) {
    if (!skill.is_number_integer()) {
      throw FormatError("field 'skill' must be an integer or null");
    }
    r.skill = skill.get<int>();
  }
  r.predicted_s = get_number(j, "predicted_s");
  r.observed_s = get_number(j, "observed_s");
  r.timestamp = get_timestamp(j, "timestamp");
  if (auto problem = record_problem(r)) {
    throw FormatError("invalid record '" + r.record_id + "': " + *problem);
  }
  return r;
}

json to_json(const Snapshot& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    records.push_back(to_json(r));
  }
  json rejects = json::array();
  for (const auto& r : s.rejects) {
    rejects.push_back(json{{"line", r.line}, {"reason", r.reason}});
  }
  return json{{"schema_version", s.schema_version},
              {"created_at", format_timestamp(s.created_at)},
              {"records", std::move(records)},
              {"rejects", std::move(rejects)}};
}

Snapshot snapshot_from_json(const json& j) {
  const json& version = member(j, "schema_version");
  if (!version.is_number_integer()) {
    throw FormatError("schema_version must be an integer");
  }
  if (version.get<int>() != kSnapshotSchemaVersion) {
    throw SchemaError("unsupported snapshot schema_version " + version.dump() + " (expected " +
                      std::to_string(kSnapshotSchemaVersion) + ")");
  }
  Snapshot s;
  s.schema_version = kSnapshotSchemaVersion;
  s.created_at = get_timestamp(j, "created_at");
  std::set<std::string> ids;
  for (const auto& r : get_array(j, "records")) {
    s.records.push_back(task_record_from_json(r));
    if (!ids.insert(s.records.back().record_id).second) {
      throw FormatError("duplicate record_id '" + s.records.back().record_id + "' in snapshot");
    }
  }
  for (const auto& r : get_array(j, "rejects")) {
    s.rejects.push_back(Reject{get_as<std::size_t>(r, "line"), get_as<std::string>(r, "reason")});
  }
  return s;
}

json to_json(const UncertaintyModel& m) {
  return json{{"sequence_id", m.group.sequence_id},
              {"operator_id", m.group.operator_id},
              {"season", std::string(to_string(m.group.season))},
              {"kind", std::string(to_string(m.kind))},
              {"sample_count", m.sample_count},
              {"degree", m.degree},
              {"band", to_json(m.band)}};
}

UncertaintyModel uncertainty_model_from_json(const json& j) {
  const auto kind_text = get_as<std::string>(j, "kind");
  const auto kind = parse_model_kind(kind_text);
  if (!kind) {
    throw FormatError("unknown model kind '" + kind_text + "'");
  }
  return UncertaintyModel{group_key_from_json(j), *kind, pbox_from_json(member(j, "band")),
                          get_as<std::size_t>(j, "sample_count"), get_number(j, "degree")};
}

json to_json(const RankingEntry& e) {
  return json{{"operator_id", e.operator_id},
              {"degree", e.degree},
              {"nominal_s", e.nominal_s},
              {"corrected_estimate_s", e.corrected_estimate_s},
              {"sample_count", e.sample_count},
              {"kind", std::string(to_string(e.kind))},
              {"model_source", std::string(to_string(e.source))}};
}

json to_json(const SequenceRanking& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(to_json(e));
  }
  return json{{"sequence_id", r.sequence_id},
              {"season", std::string(to_string(r.season))},
              {"entries", std::move(entries)}};
}

json to_json(const AnalysisConfig& c) {
  return json{{"sample_threshold", c.sample_threshold},
              {"subset_target_size", c.subset_target_size},
              {"trust", c.trust},
              {"epsilon", c.epsilon()},
              {"normalize_area", c.normalize_area}};
}

json to_json(const Analysis& a) {
  json models = json::array();
  for (const auto& m : a.models) {
    models.push_back(to_json(m));
  }
  json rankings = json::array();
  for (const auto& r : a.rankings) {
    rankings.push_back(to_json(r));
  }
  return json{{"config", to_json(a.config)}, {"models", std::move(models)}, {"rankings", std::move(rankings)}};
}

json to_json(const RqKernelParams& p) {
  return json{{"signal_var", p.signal_var},
              {"length_scale", p.length_scale},
              {"alpha", p.alpha},
              {"noise_std", p.noise_std}};
}

RqKernelParams rq_params_from_json(const json& j) {
  RqKernelParams p{get_number(j, "signal_var"), get_number(j, "length_scale"), get_number(j, "alpha"),
                   get_number(j, "noise_std")};
  decoded([&] { p.validate(); });
  return p;
}

json to_json(const GprModel& m) {
  return json{{"train_x", m.train_x()}, {"train_y", m.train_y()}, {"params", to_json(m.params())}};
}

GprModel gpr_model_from_json(const json& j) {
  return GprModel::fit(get_numbers(j, "train_x"), get_numbers(j, "train_y"),
                       rq_params_from_json(member(j, "params")), false);
}

json to_json(const PredictorBank& bank) {
  json groups = json::array();
  for (const auto& [key, model] : bank.group_models()) {
    json entry = to_json(key);
    entry["model"] = to_json(model);
    groups.push_back(std::move(entry));
  }
  json pooled = json::array();
  for (const auto& [key, model] : bank.pooled_models()) {
    pooled.push_back(json{{"sequence_id", key.first},
                          {"season", std::string(to_string(key.second))},
                          {"model", to_json(model)}});
  }
  return json{{"min_train_size", bank.min_train_size()},
              {"group_models", std::move(groups)},
              {"pooled_models", std::move(pooled)}};
}

PredictorBank predictor_bank_from_json(const json& j) {
  PredictorBank bank(get_as<std::size_t>(j, "min_train_size"));
  for (const auto& entry : get_array(j, "group_models")) {
    bank.add_group_model(group_key_from_json(entry), gpr_model_from_json(member(entry, "model")));
  }
  for (const auto& entry : get_array(j, "pooled_models")) {
    bank.add_pooled_model(PooledKey{get_as<std::string>(entry, "sequence_id"), get_season(entry, "season")},
                          gpr_model_from_json(member(entry, "model")));
  }
  return bank;
}

json to_json(const DegreeComparison& row) {
  json out = to_json(row.group);
  out["degree_before"] = row.degree_before;
  out["degree_after"] = row.degree_after;
  return out;
}

json to_json(const std::vector<DegreeComparison>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back(to_json(r));
  }
  return out;
}

void write_pbox_csv(const PBox& pbox, std::ostream& out) {
  out << "lower_x,lower_F,upper_x,upper_F\n";
  const auto& lo = pbox.lower();
  const auto& hi = pbox.upper();
  const std::size_t rows = std::max(lo.size(), hi.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < lo.size()) {
      out << format_number(lo.knots()[i]) << ',' << format_number(lo.cum_probs()[i]);
    } else {
      out << ',';
    }
    out << ',';
    if (i < hi.size()) {
      out << format_number(hi.knots()[i]) << ',' << format_number(hi.cum_probs()[i]);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

PBox read_pbox_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "lower_x,lower_F,upper_x,upper_F") {
    throw FormatError("p-box CSV header missing");
  }
  std::vector<double> lk, lp, uk, up;
  auto parse = [](const std::string& cell, double& out) {
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw FormatError("bad number '" + cell + "' in p-box CSV");
    }
  };
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    cells.resize(4);
    double v = 0.0;
    if (!cells[0].empty()) {
      parse(cells[0], v);
      lk.push_back(v);
      parse(cells[1], v);
      lp.push_back(v);
    }
    if (!cells[2].empty()) {
      parse(cells[2], v);
      uk.push_back(v);
      parse(cells[3], v);
      up.push_back(v);
    }
  }
  return decoded([&] { return PBox(StepCdf(std::move(lk), std::move(lp)), StepCdf(std::move(uk), std::move(up))); });
}

}  // namespace uqsched
