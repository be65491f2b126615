#ifndef UQSCHED_SCHEDULER_HPP
#define UQSCHED_SCHEDULER_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqsched/ingest.hpp"
#include "uqsched/pbox.hpp"
#include "uqsched/predictor.hpp"

namespace uqsched {

struct AnalysisConfig {
  std::size_t sample_threshold = 25;
  std::size_t subset_target_size = 12;
  double trust = 0.8;
  std::optional<double> epsilon_raw;  // overrides 1 - trust when set
  bool normalize_area = true;

  /// Contamination weight: epsilon_raw if set, else 1 - trust.
  double epsilon() const noexcept { return epsilon_raw.value_or(1.0 - trust); }

  /// Throws DomainError on out-of-range values.
  void validate() const;
};

enum class ModelKind { PBox, Contamination };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept;

struct UncertaintyModel {
  GroupKey group;
  ModelKind kind = ModelKind::PBox;
  PBox band;
  std::size_t sample_count = 0;
  double degree = 0.0;
};

/// Sizes of the contiguous chronological blocks used to build a p-box from n
/// samples: k = max(2, n / subset_target_size) blocks, the first n % k one
/// sample longer.
std::vector<std::size_t> block_sizes(std::size_t n, const AnalysisConfig& config);

/// Routes a group by sample count. At or above the threshold the chronological
/// errors are split into blocks and enveloped; below it the pooled
/// sequence/season ECDF is epsilon-contaminated with a vacuous contaminant over
/// the pooled support. Throws EmptySampleError on empty errors.
UncertaintyModel quantify_group(const GroupKey& group, std::span<const double> errors,
                                std::span<const double> pooled, const AnalysisConfig& config);

struct RankingEntry {
  std::string operator_id;
  double degree = 0.0;
  double nominal_s = 0.0;
  double corrected_estimate_s = 0.0;
  std::size_t sample_count = 0;
  ModelKind kind = ModelKind::PBox;
  ModelSource source = ModelSource::None;
};

using CorrectionLookup = std::function<Correction(const GroupKey&)>;

/// Orders operators of one (sequence, season) by degree, then corrected
/// estimate, then operator id. The ranking degree is each band's area over
/// the width of the union of all bands' supports (raw area when
/// `normalize_area` is off), so a tight operator beats a wide one even though
/// each band's own normalized area is scale free. Throws EmptyFamilyError on
/// an empty list and DomainError if models mix sequences/seasons or repeat
/// an operator.
std::vector<RankingEntry> rank_operators(std::span<const UncertaintyModel> models,
                                         const CorrectionLookup& corrections, bool normalize_area = true);

struct SequenceRanking {
  std::string sequence_id;
  Season season = Season::Winter;
  std::vector<RankingEntry> entries;
};

/// Result of one analysis run over a snapshot.
struct Analysis {
  AnalysisConfig config;
  std::vector<UncertaintyModel> models;       // ordered by GroupKey
  std::vector<SequenceRanking> rankings;      // ordered by (sequence, season name)

  const UncertaintyModel* find(const GroupKey& key) const noexcept;
  const SequenceRanking* ranking(std::string_view sequence_id, Season season) const noexcept;
};

/// Quantifies every group and ranks every (sequence, season). Corrected
/// estimates are evaluated at the mean nominal duration of each group.
Analysis analyze(const Snapshot& snapshot, const AnalysisConfig& config, const PredictorBank& predictors);

/// Top entry of the ranking for (sequence, season); NotFoundError if absent.
RankingEntry suggest(const Analysis& analysis, std::string_view sequence_id, Season season);

struct DegreeComparison {
  GroupKey group;
  double degree_before = 0.0;
  double degree_after = 0.0;
};

/// Degrees of raw errors vs residuals (observed - corrected estimate) per
/// group, using identical config and block boundaries. When the config asks
/// for normalized areas both bands are divided by the width of their common
/// support, so the two numbers share one axis.
std::vector<DegreeComparison> compare_before_after(const Snapshot& snapshot, const PredictorBank& predictors,
                                                   const AnalysisConfig& config);

}  // namespace uqsched

#endif  // UQSCHED_SCHEDULER_HPP
