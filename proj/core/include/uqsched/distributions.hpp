#ifndef UQSCHED_DISTRIBUTIONS_HPP
#define UQSCHED_DISTRIBUTIONS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace uqsched {

/// Right-continuous step CDF on a finite, strictly increasing knot set.
///
/// F(x) = cum_probs[i] for the largest knots[i] <= x, and 0 below the first
/// knot. The last cumulative probability is exactly 1. Flat steps (a knot
/// whose value equals its predecessor) are permitted so that bounds built on
/// a shared grid stay representable; `canonical()` removes them.
class StepCdf {
 public:
  /// Validates the invariants; throws DomainError on violation.
  StepCdf(std::vector<double> knots, std::vector<double> cum_probs);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& cum_probs() const noexcept { return cum_probs_; }
  std::size_t size() const noexcept { return knots_.size(); }

  double min_knot() const noexcept { return knots_.front(); }
  double max_knot() const noexcept { return knots_.back(); }

  /// Probability mass carried by knot i (jump height).
  double mass(std::size_t i) const noexcept {
    return i == 0 ? cum_probs_[0] : cum_probs_[i] - cum_probs_[i - 1];
  }

  /// Same function with zero-height steps (including leading zeros) removed.
  StepCdf canonical() const;

  /// Point mass at `x`.
  static StepCdf point_mass(double x);

  friend bool operator==(const StepCdf&, const StepCdf&) = default;

 private:
  std::vector<double> knots_;
  std::vector<double> cum_probs_;
};

/// Histogram approximation of the mass function.
struct MassFunction {
  std::vector<double> bin_edges;
  std::vector<double> masses;
};

/// Empirical CDF, (count of samples <= x) / n. Duplicates collapse into one
/// knot. Throws EmptySampleError on empty input, DomainError on non-finite.
StepCdf ecdf(std::span<const double> samples);

/// Evaluates F(x); 0 below the support, 1 at and above the last knot.
double eval_cdf(const StepCdf& cdf, double x) noexcept;

/// Generalized inverse inf{x : F(x) >= p}. Throws DomainError unless 0 < p <= 1.
double quantile(const StepCdf& cdf, double p);

/// Equal-width histogram over [min, max]. A zero-width support collapses to a
/// single bin holding all mass.
MassFunction histogram(std::span<const double> samples, std::size_t bin_count);

/// Sorted union of the knots of every cdf in `cdfs`.
std::vector<double> merged_grid(std::span<const StepCdf* const> cdfs);

}  // namespace uqsched

#endif  // UQSCHED_DISTRIBUTIONS_HPP
