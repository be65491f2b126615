#include "uqsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "uqsched/contamination.hpp"
#include "uqsched/errors.hpp"

namespace uqsched {

void AnalysisConfig::validate() const {
  if (sample_threshold < 2) {
    throw DomainError("analysis.sample_threshold must be at least 2");
  }
  if (subset_target_size < 2) {
    throw DomainError("analysis.subset_target_size must be at least 2");
  }
  if (!(trust >= 0.0 && trust <= 1.0)) {
    throw DomainError("analysis.trust must lie in [0, 1]");
  }
  if (epsilon_raw && !(*epsilon_raw >= 0.0 && *epsilon_raw <= 1.0)) {
    throw DomainError("analysis.epsilon_raw must lie in [0, 1]");
  }
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::PBox ? "pbox" : "contamination";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept {
  if (text == "pbox") {
    return ModelKind::PBox;
  }
  if (text == "contamination") {
    return ModelKind::Contamination;
  }
  return std::nullopt;
}

std::vector<std::size_t> block_sizes(std::size_t n, const AnalysisConfig& config) {
  const std::size_t k = std::min(n, std::max<std::size_t>(2, n / config.subset_target_size));
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) {
    sizes[i] += 1;
  }
  return sizes;
}

UncertaintyModel quantify_group(const GroupKey& group, std::span<const double> errors,
                                std::span<const double> pooled, const AnalysisConfig& config) {
  if (errors.empty()) {
    throw EmptySampleError("cannot quantify an empty error group");
  }
  const std::size_t n = errors.size();

  if (n >= config.sample_threshold) {
    std::vector<StepCdf> blocks;
    std::size_t offset = 0;
    for (std::size_t size : block_sizes(n, config)) {
      blocks.push_back(ecdf(errors.subspan(offset, size)));
      offset += size;
    }
    PBox band = envelope(blocks);
    const double degree = area(band, config.normalize_area);
    return UncertaintyModel{group, ModelKind::PBox, std::move(band), n, degree};
  }

  StepCdf base = ecdf(pooled);
  const VacuousContaminant vacuous{base.min_knot(), base.max_knot()};
  PBox band = contaminate(ContaminationSpec{config.epsilon(), std::move(base), vacuous});
  const double degree = area(band, config.normalize_area);
  return UncertaintyModel{group, ModelKind::Contamination, std::move(band), n, degree};
}

std::vector<RankingEntry> rank_operators(std::span<const UncertaintyModel> models,
                                         const CorrectionLookup& corrections, bool normalize_area) {
  if (models.empty()) {
    throw EmptyFamilyError("no operators to rank");
  }
  const auto& first = models.front().group;
  std::set<std::string> seen;
  double lo = models.front().band.support_min();
  double hi = models.front().band.support_max();
  for (const auto& m : models) {
    lo = std::min(lo, m.band.support_min());
    hi = std::max(hi, m.band.support_max());
  }
  std::vector<RankingEntry> entries;
  entries.reserve(models.size());
  for (const auto& m : models) {
    if (m.group.sequence_id != first.sequence_id || m.group.season != first.season) {
      throw DomainError("ranking mixes sequences or seasons");
    }
    if (!seen.insert(m.group.operator_id).second) {
      throw DomainError("operator listed twice in one ranking: " + m.group.operator_id);
    }
    const Correction c = corrections(m.group);
    const double degree = normalize_area ? area_over(m.band, hi - lo) : raw_area(m.band);
    entries.push_back(RankingEntry{m.group.operator_id, degree, c.nominal_s, c.estimate_s, m.sample_count,
                                   m.kind, c.source});
  }
  std::sort(entries.begin(), entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    return std::tie(a.degree, a.corrected_estimate_s, a.operator_id) <
           std::tie(b.degree, b.corrected_estimate_s, b.operator_id);
  });
  return entries;
}

const UncertaintyModel* Analysis::find(const GroupKey& key) const noexcept {
  auto it = std::lower_bound(models.begin(), models.end(), key,
                             [](const UncertaintyModel& m, const GroupKey& k) { return m.group < k; });
  if (it == models.end() || !(it->group == key)) {
    return nullptr;
  }
  return &*it;
}

const SequenceRanking* Analysis::ranking(std::string_view sequence_id, Season season) const noexcept {
  for (const auto& r : rankings) {
    if (r.sequence_id == sequence_id && r.season == season) {
      return &r;
    }
  }
  return nullptr;
}

namespace {

using SeasonKey = std::pair<std::string, std::string>;  // (sequence, season name)

SeasonKey season_key(const GroupKey& g) { return {g.sequence_id, std::string(to_string(g.season))}; }

double mean_nominal(const std::vector<ErrorSample>& samples) {
  double s = 0.0;
  for (const auto& e : samples) {
    s += e.nominal_s;
  }
  return s / static_cast<double>(samples.size());
}

}  // namespace

Analysis analyze(const Snapshot& snapshot, const AnalysisConfig& config, const PredictorBank& predictors) {
  config.validate();
  const auto groups = group_error_samples(snapshot);

  std::map<SeasonKey, std::vector<double>> pooled;
  for (const auto& [key, samples] : groups) {
    auto& pool = pooled[season_key(key)];
    for (const auto& s : samples) {
      pool.push_back(s.error_s);
    }
  }

  Analysis out;
  out.config = config;
  std::map<SeasonKey, std::vector<UncertaintyModel>> by_season;
  std::map<GroupKey, double> nominals;
  for (const auto& [key, samples] : groups) {
    std::vector<double> errors;
    errors.reserve(samples.size());
    for (const auto& s : samples) {
      errors.push_back(s.error_s);
    }
    auto model = quantify_group(key, errors, pooled.at(season_key(key)), config);
    by_season[season_key(key)].push_back(model);
    out.models.push_back(std::move(model));
    nominals[key] = mean_nominal(samples);
  }

  const CorrectionLookup lookup = [&](const GroupKey& key) { return predictors.correct(key, nominals.at(key)); };
  for (const auto& [sk, models] : by_season) {
    const Season season = *parse_season(sk.second);
    out.rankings.push_back(
        SequenceRanking{sk.first, season, rank_operators(models, lookup, config.normalize_area)});
  }
  return out;
}

RankingEntry suggest(const Analysis& analysis, std::string_view sequence_id, Season season) {
  const SequenceRanking* r = analysis.ranking(sequence_id, season);
  if (r == nullptr || r->entries.empty()) {
    throw NotFoundError("no data for sequence '" + std::string(sequence_id) + "' in " +
                        std::string(to_string(season)));
  }
  return r->entries.front();
}

std::vector<DegreeComparison> compare_before_after(const Snapshot& snapshot, const PredictorBank& predictors,
                                                   const AnalysisConfig& config) {
  config.validate();
  const auto groups = group_error_samples(snapshot);

  std::map<GroupKey, std::vector<double>> before;
  std::map<GroupKey, std::vector<double>> after;
  std::map<SeasonKey, std::vector<double>> pooled_before;
  std::map<SeasonKey, std::vector<double>> pooled_after;
  for (const auto& [key, samples] : groups) {
    auto& b = before[key];
    auto& a = after[key];
    for (const auto& s : samples) {
      const double residual = s.observed_s - predictors.correct(key, s.nominal_s).estimate_s;
      b.push_back(s.error_s);
      a.push_back(residual);
      pooled_before[season_key(key)].push_back(s.error_s);
      pooled_after[season_key(key)].push_back(residual);
    }
  }

  std::vector<DegreeComparison> out;
  out.reserve(groups.size());
  for (const auto& [key, samples] : groups) {
    const auto mb = quantify_group(key, before.at(key), pooled_before.at(season_key(key)), config);
    const auto ma = quantify_group(key, after.at(key), pooled_after.at(season_key(key)), config);
    DegreeComparison row{key, 0.0, 0.0};
    if (config.normalize_area) {
      const double lo = std::min(mb.band.support_min(), ma.band.support_min());
      const double hi = std::max(mb.band.support_max(), ma.band.support_max());
      row.degree_before = area_over(mb.band, hi - lo);
      row.degree_after = area_over(ma.band, hi - lo);
    } else {
      row.degree_before = raw_area(mb.band);
      row.degree_after = raw_area(ma.band);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace uqsched
