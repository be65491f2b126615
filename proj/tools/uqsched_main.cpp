// uqsched: command-line front end for ingestion, analysis, ranking, training,
// what-if queries, p-box export and the HTTP service.
//
// Exit status: 0 success, 1 not found, 2 usage/format/IO error.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "uqsched/config.hpp"
#include "uqsched/errors.hpp"
#include "uqsched/ingest.hpp"
#include "uqsched/predictor.hpp"
#include "uqsched/scheduler.hpp"
#include "uqsched/serialization.hpp"
#include "uqsched/service.hpp"

namespace {

using namespace uqsched;

constexpr int kExitOk = 0;
constexpr int kExitNotFound = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::string config_path;
  bool print_config = false;
  bool json_output = false;

  std::optional<double> trust;
  std::optional<double> epsilon_raw;
  std::optional<std::size_t> sample_threshold;
  std::optional<std::size_t> subset_size;
  std::optional<double> noise_std;
  std::optional<double> length_scale;
  std::optional<double> alpha;
  std::optional<double> signal_var;
  std::optional<bool> optimize;
  std::optional<std::size_t> min_train_size;
};

struct Selection {
  std::string snapshot;
  std::string models;
  std::string out;
  std::string sequence;
  std::string operator_id;
  std::string season;
};

AppConfig resolve_config(const Overrides& o) {
  AppConfig cfg;
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) {
      path = env;
    }
  }
  if (!path.empty()) {
    cfg = load_config_file(path);
  }
  if (o.trust) cfg.analysis.trust = *o.trust;
  if (o.epsilon_raw) cfg.analysis.epsilon_raw = *o.epsilon_raw;
  if (o.sample_threshold) cfg.analysis.sample_threshold = *o.sample_threshold;
  if (o.subset_size) cfg.analysis.subset_target_size = *o.subset_size;
  if (o.noise_std) cfg.predictor.noise_std = *o.noise_std;
  if (o.length_scale) cfg.predictor.length_scale = *o.length_scale;
  if (o.alpha) cfg.predictor.alpha = *o.alpha;
  if (o.signal_var) cfg.predictor.signal_var = *o.signal_var;
  if (o.optimize) cfg.predictor.optimize = *o.optimize;
  if (o.min_train_size) cfg.predictor.min_train_size = *o.min_train_size;
  cfg.validate();
  return cfg;
}

std::string require_snapshot_path(const Selection& sel, const AppConfig& cfg) {
  std::string path = sel.snapshot.empty() ? cfg.snapshot_path : sel.snapshot;
  if (path.empty()) {
    throw FormatError("no snapshot given (use --snapshot or paths.snapshot)");
  }
  return path;
}

Season require_season(const std::string& text) {
  auto s = parse_season(text);
  if (!s) {
    throw NotFoundError("unknown season '" + text + "'");
  }
  return *s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("corrupt JSON in " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) {
    throw IoError("cannot write " + path);
  }
}

// Trained predictors from --models (the output of `train`), or a fresh fit.
PredictorBank obtain_predictors(const Selection& sel, const AppConfig& cfg, const Snapshot& snapshot) {
  const std::string path = sel.models.empty() ? cfg.models_path : sel.models;
  if (!path.empty()) {
    const json doc = read_json_file(path);
    return predictor_bank_from_json(doc.contains("models") ? doc.at("models") : doc);
  }
  return PredictorBank::fit(snapshot, cfg.predictor);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

int cmd_ingest(const std::string& input, const std::string& out, const std::string& created_at) {
  Timestamp stamp = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  if (!created_at.empty()) {
    auto parsed = parse_timestamp(created_at);
    if (!parsed) {
      throw FormatError("--created-at must look like 2019-03-01T08:30:00Z");
    }
    stamp = *parsed;
  }
  const Snapshot snap = parse_csv_file(input, stamp);
  save_snapshot(snap, out);
  std::cout << snap.records.size() << (snap.records.size() == 1 ? " record, " : " records, ")
            << snap.rejects.size() << (snap.rejects.size() == 1 ? " reject" : " rejects") << '\n';
  for (const auto& r : snap.rejects) {
    std::cerr << "line " << r.line << ": " << r.reason << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const Selection& sel, const AppConfig& cfg) {
  const Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  const PredictorBank bank = obtain_predictors(sel, cfg, snap);
  const Analysis analysis = analyze(snap, cfg.analysis, bank);
  write_text(sel.out, to_json(analysis).dump(2) + "\n");
  if (!sel.out.empty() && sel.out != "-") {
    std::size_t pboxes = 0;
    for (const auto& m : analysis.models) {
      pboxes += m.kind == ModelKind::PBox ? 1 : 0;
    }
    std::cout << analysis.models.size() << " groups (" << pboxes << " pbox, " << analysis.models.size() - pboxes
              << " contamination)\n";
  }
  return kExitOk;
}

int cmd_rank(const Selection& sel, const AppConfig& cfg, bool as_json) {
  const Season season = require_season(sel.season);
  const Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  const PredictorBank bank = obtain_predictors(sel, cfg, snap);
  const Analysis analysis = analyze(snap, cfg.analysis, bank);
  const SequenceRanking* ranking = analysis.ranking(sel.sequence, season);
  if (ranking == nullptr) {
    throw NotFoundError("no data for sequence '" + sel.sequence + "' in " + sel.season);
  }
  if (as_json) {
    json entries = json::array();
    for (const auto& e : ranking->entries) {
      entries.push_back(to_json(e));
    }
    std::cout << entries.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << std::left << std::setw(6) << "rank" << std::setw(16) << "operator" << std::setw(10) << "degree"
            << std::setw(14) << "corrected_s" << std::setw(6) << "n" << "kind\n";
  int pos = 1;
  for (const auto& e : ranking->entries) {
    std::cout << std::left << std::setw(6) << pos++ << std::setw(16) << e.operator_id << std::setw(10)
              << fmt(e.degree) << std::setw(14) << fmt(e.corrected_estimate_s, 2) << std::setw(6) << e.sample_count
              << to_string(e.kind) << '\n';
  }
  return kExitOk;
}

int cmd_whatif(const Selection& sel, const AppConfig& cfg, double estimate, double qlo, double qhi, bool as_json) {
  const Season season = require_season(sel.season);
  Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  PredictorBank bank = obtain_predictors(sel, cfg, snap);
  ServiceState state;
  state.config = cfg;
  state.analysis = analyze(snap, cfg.analysis, bank);
  state.predictors = std::move(bank);
  state.snapshot = std::move(snap);
  state.trained = true;
  const WhatIfResponse r =
      evaluate_what_if(state, WhatIfRequest{sel.sequence, sel.operator_id, season, estimate}, qlo, qhi);
  if (as_json) {
    std::cout << to_json(r).dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "corrected_estimate_s: " << fmt(r.corrected_estimate_s, 2) << '\n'
            << "std_s:                " << fmt(r.std_s, 2) << '\n'
            << "band_s:               [" << fmt(r.band_q05_s, 2) << ", " << fmt(r.band_q95_s, 2) << "]\n"
            << "model_kind:           " << to_string(r.model_kind) << '\n'
            << "model_source:         " << to_string(r.model_source) << '\n'
            << "sample_count:         " << r.sample_count << '\n';
  return kExitOk;
}

int cmd_train(const Selection& sel, const AppConfig& cfg, bool as_json) {
  const Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  const PredictorBank bank = PredictorBank::fit(snap, cfg.predictor);
  const auto rows = compare_before_after(snap, bank, cfg.analysis);
  const json doc{{"models", to_json(bank)}, {"comparison", to_json(rows)}};
  if (!sel.out.empty()) {
    write_text(sel.out, doc.dump(2) + "\n");
  }
  if (as_json) {
    std::cout << to_json(rows).dump(2) << '\n';
    return kExitOk;
  }
  std::cout << std::left << std::setw(32) << "group" << std::setw(12) << "before" << std::setw(12) << "after"
            << "delta\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(32) << to_string(r.group) << std::setw(12) << fmt(r.degree_before)
              << std::setw(12) << fmt(r.degree_after) << fmt(r.degree_after - r.degree_before) << '\n';
  }
  return kExitOk;
}

int cmd_export_pbox(const Selection& sel, const AppConfig& cfg, const std::string& format) {
  const Season season = require_season(sel.season);
  const Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  const Analysis analysis = analyze(snap, cfg.analysis, PredictorBank(cfg.predictor.min_train_size));
  const UncertaintyModel* model = analysis.find(GroupKey{sel.sequence, sel.operator_id, season});
  if (model == nullptr) {
    throw NotFoundError("no data for " + sel.sequence + "/" + sel.operator_id + "/" + sel.season);
  }
  std::ostringstream os;
  if (format == "csv") {
    write_pbox_csv(model->band, os);
  } else {
    os << to_json(model->band).dump(2) << '\n';
  }
  write_text(sel.out, os.str());
  return kExitOk;
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) {
    g_service->stop();
  }
}

int cmd_serve(const Selection& sel, AppConfig cfg, const std::string& host, int port, const std::string& cors,
              bool train_on_start) {
  if (!host.empty()) cfg.service.host = host;
  if (port >= 0) cfg.service.port = port;
  if (!cors.empty()) cfg.service.cors_origin = cors;
  cfg.validate();
  Snapshot snap = load_snapshot(require_snapshot_path(sel, cfg));
  Service service(build_state(std::move(snap), cfg, train_on_start));
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving on http://" << cfg.service.host << ":" << cfg.service.port << std::endl;
  const bool ok = service.listen(cfg.service.host, cfg.service.port);
  g_service = nullptr;
  if (!ok) {
    std::cerr << "error: cannot listen on " << cfg.service.host << ":" << cfg.service.port << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator timing uncertainty: p-boxes, contamination bands, GP-corrected estimates"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "TOML config file (default: $UQSCHED_CONFIG)");
  app.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");
  app.add_flag("--json", o.json_output, "Machine-readable JSON output");
  app.add_option("--trust", o.trust, "Trust t in [0,1]; contamination epsilon = 1 - t");
  app.add_option("--epsilon-raw", o.epsilon_raw, "Contamination epsilon, overriding --trust");
  app.add_option("--sample-threshold", o.sample_threshold, "Samples needed for a p-box");
  app.add_option("--subset-size", o.subset_size, "Target block size for p-box subsets");
  app.add_option("--noise-std", o.noise_std, "GP noise standard deviation (s)");
  app.add_option("--length-scale", o.length_scale, "GP length scale (s)");
  app.add_option("--alpha", o.alpha, "GP rational-quadratic shape");
  app.add_option("--signal-var", o.signal_var, "GP signal variance (s^2)");
  app.add_option("--optimize", o.optimize, "Grid-search GP hyperparameters (true/false)");
  app.add_option("--min-train-size", o.min_train_size, "Minimum samples for a per-group model");

  Selection sel;
  auto add_snapshot = [&](CLI::App* sub) { sub->add_option("--snapshot", sel.snapshot, "Snapshot JSON file"); };
  auto add_models = [&](CLI::App* sub) { sub->add_option("--models", sel.models, "Trained models (train --out)"); };

  std::string input;
  std::string created_at;
  auto* ingest = app.add_subcommand("ingest", "Parse an execution-log CSV into a snapshot");
  ingest->add_option("--input", input, "CSV log")->required();
  ingest->add_option("--out", sel.out, "Snapshot JSON to write")->required();
  ingest->add_option("--created-at", created_at, "Snapshot timestamp (default: now)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Quantify uncertainty for every group");
  add_snapshot(analyze_cmd);
  add_models(analyze_cmd);
  analyze_cmd->add_option("--out", sel.out, "Analysis JSON to write (default: stdout)");

  auto* rank = app.add_subcommand("rank", "Rank operators of a sequence and season");
  add_snapshot(rank);
  add_models(rank);
  rank->add_option("--sequence", sel.sequence)->required();
  rank->add_option("--season", sel.season)->required();

  double estimate = 0.0;
  double qlo = 0.05;
  double qhi = 0.95;
  auto* whatif = app.add_subcommand("whatif", "Corrected estimate and band for a nominal duration");
  add_snapshot(whatif);
  add_models(whatif);
  whatif->add_option("--sequence", sel.sequence)->required();
  whatif->add_option("--operator", sel.operator_id)->required();
  whatif->add_option("--season", sel.season)->required();
  whatif->add_option("--estimate", estimate, "Nominal duration (s)")->required();
  whatif->add_option("--qlo", qlo, "Lower band quantile level");
  whatif->add_option("--qhi", qhi, "Upper band quantile level");

  auto* train = app.add_subcommand("train", "Fit predictors and compare degrees before/after correction");
  add_snapshot(train);
  train->add_option("--out", sel.out, "Models + comparison JSON to write");

  std::string host;
  int port = -1;
  std::string cors;
  bool no_train = false;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  add_snapshot(serve);
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
  serve->add_flag("--no-train-on-start", no_train, "Start without fitted predictors");

  std::string format = "csv";
  auto* export_pbox = app.add_subcommand("export-pbox", "Export one group's band as CSV or JSON");
  add_snapshot(export_pbox);
  export_pbox->add_option("--sequence", sel.sequence)->required();
  export_pbox->add_option("--operator", sel.operator_id)->required();
  export_pbox->add_option("--season", sel.season)->required();
  export_pbox->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  export_pbox->add_option("--out", sel.out, "Destination (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const AppConfig cfg = resolve_config(o);
    if (o.print_config) {
      std::cout << to_toml(cfg);
      return kExitOk;
    }
    if (*ingest) return cmd_ingest(input, sel.out, created_at);
    if (*analyze_cmd) return cmd_analyze(sel, cfg);
    if (*rank) return cmd_rank(sel, cfg, o.json_output);
    if (*whatif) return cmd_whatif(sel, cfg, estimate, qlo, qhi, o.json_output);
    if (*train) return cmd_train(sel, cfg, o.json_output);
    if (*serve) return cmd_serve(sel, cfg, host, port, cors, !no_train);
    if (*export_pbox) return cmd_export_pbox(sel, cfg, format);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const NotFoundError& e) {
    std::cerr << "not found: " << e.what() << '\n';
    return kExitNotFound;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
