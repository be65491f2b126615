#ifndef UQSCHED_PREDICTOR_HPP
#define UQSCHED_PREDICTOR_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uqsched/ingest.hpp"

namespace uqsched {

/// Rational-quadratic kernel hyperparameters plus the observation noise.
struct RqKernelParams {
  double signal_var = 1.0;    // sigma_f^2
  double length_scale = 1.0;  // seconds
  double alpha = 1.0;         // shape
  double noise_std = 0.0;     // seconds

  /// Throws DomainError unless all are finite, noise_std >= 0 and the rest > 0.
  void validate() const;

  friend bool operator==(const RqKernelParams&, const RqKernelParams&) = default;
};

/// sigma_f^2 * (1 + d^2 / (2 alpha l^2))^(-alpha).
double rq_kernel(double x1, double x2, const RqKernelParams& params) noexcept;

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;  // includes the noise term
  double std = 0.0;
};

/// Exact Gaussian-process regression of duration error on nominal duration.
///
/// Zero prior mean. The regularized Gram matrix K + a^2 I is factorized once
/// with Cholesky; if that fails, a diagonal jitter of 1e-10 * trace / n is
/// added and doubled up to eight times before giving up.
class GprModel {
 public:
  /// Fits on (xs, ys). With `optimize_hyper`, sigma_f^2, length scale and alpha
  /// are chosen from `hyper_grid` by exact log marginal likelihood (first best
  /// wins on ties); noise_std always stays at `params.noise_std`.
  /// Throws DomainError on bad input, SingularKernelError if no factorization.
  static GprModel fit(std::vector<double> xs, std::vector<double> ys, const RqKernelParams& params,
                      bool optimize_hyper);

  Posterior predict(double x) const;
  double log_marginal_likelihood() const noexcept { return lml_; }

  const std::vector<double>& train_x() const noexcept { return xs_; }
  const std::vector<double>& train_y() const noexcept { return ys_; }
  const RqKernelParams& params() const noexcept { return params_; }
  double jitter() const noexcept { return jitter_; }

 private:
  GprModel() = default;
  static std::optional<GprModel> factorize(const std::vector<double>& xs, const std::vector<double>& ys,
                                           const RqKernelParams& params);

  std::vector<double> xs_;
  std::vector<double> ys_;
  RqKernelParams params_;
  double jitter_ = 0.0;
  std::vector<double> chol_;   // column-major lower Cholesky factor, n x n
  std::vector<double> alpha_;  // (K + a^2 I)^-1 y
  double lml_ = 0.0;
};

/// Candidate hyperparameters searched by `GprModel::fit` when optimizing:
/// five log-spaced length scales around std(xs), three signal variances
/// around the second moment of ys, alpha in {0.5, 1, 2}.
std::vector<RqKernelParams> hyper_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                       double noise_std);

struct CorrectedEstimate {
  double estimate_s = 0.0;
  double mean_error_s = 0.0;
  double std_s = 0.0;
  bool clamped = false;  // nominal + mean error was negative
};

/// nominal + predicted mean error, floored at 0. Throws DomainError if nominal <= 0.
CorrectedEstimate corrected_estimate(const GprModel& model, double nominal_s);

struct PredictorConfig {
  double noise_std = 4430.0;
  double length_scale = 7734.0;
  double alpha = 1.0;
  std::optional<double> signal_var;  // derived from the data when unset
  bool optimize = true;
  std::size_t min_train_size = 5;

  void validate() const;
};

/// Where a correction came from.
enum class ModelSource { Group, Pooled, None };

std::string_view to_string(ModelSource source) noexcept;
std::optional<ModelSource> parse_model_source(std::string_view text) noexcept;

struct Correction {
  double nominal_s = 0.0;
  double estimate_s = 0.0;
  double mean_error_s = 0.0;
  double std_s = 0.0;
  bool clamped = false;
  ModelSource source = ModelSource::None;
};

/// (sequence, season) key of a pooled model.
using PooledKey = std::pair<std::string, Season>;

/// Per-group models with a pooled (sequence, season) fallback.
///
/// A group with at least `min_train_size` samples gets its own model. Groups
/// below that use the pooled model of their sequence and season, which exists
/// only if the pool itself reaches `min_train_size`; otherwise no correction.
class PredictorBank {
 public:
  PredictorBank() = default;
  explicit PredictorBank(std::size_t min_train_size) : min_train_size_(min_train_size) {}

  static PredictorBank fit(const Snapshot& snapshot, const PredictorConfig& config);

  /// Model serving `key`, with its provenance; nullptr/None if uncorrected.
  std::pair<const GprModel*, ModelSource> lookup(const GroupKey& key) const;

  Correction correct(const GroupKey& key, double nominal_s) const;

  bool empty() const noexcept { return group_models_.empty() && pooled_models_.empty(); }
  std::size_t min_train_size() const noexcept { return min_train_size_; }
  const std::map<GroupKey, GprModel>& group_models() const noexcept { return group_models_; }
  const std::map<PooledKey, GprModel>& pooled_models() const noexcept { return pooled_models_; }

  void add_group_model(GroupKey key, GprModel model) { group_models_.insert_or_assign(std::move(key), std::move(model)); }
  void add_pooled_model(PooledKey key, GprModel model) { pooled_models_.insert_or_assign(std::move(key), std::move(model)); }

 private:
  std::size_t min_train_size_ = 5;
  std::map<GroupKey, GprModel> group_models_;
  std::map<PooledKey, GprModel> pooled_models_;
};

}  // namespace uqsched

#endif  // UQSCHED_PREDICTOR_HPP
