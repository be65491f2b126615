#ifndef UQSCHED_PBOX_HPP
#define UQSCHED_PBOX_HPP

#include <span>

#include "uqsched/distributions.hpp"

namespace uqsched {

/// Slack allowed when checking lower <= upper and containment.
inline constexpr double kBoundSlack = 1e-12;

/// Discrete probability box: a lower and an upper bounding CDF.
///
/// `upper` dominates `lower` everywhere (F_upper(x) >= F_lower(x)). The
/// support [support_min, support_max] is the union of the knot ranges of
/// both bounds; it is derived, never configured.
class PBox {
 public:
  /// Throws DomainError if upper < lower - kBoundSlack anywhere.
  PBox(StepCdf lower, StepCdf upper);

  /// Degenerate box lower = upper = cdf.
  static PBox degenerate(const StepCdf& cdf) { return PBox(cdf, cdf); }

  const StepCdf& lower() const noexcept { return lower_; }
  const StepCdf& upper() const noexcept { return upper_; }
  double support_min() const noexcept { return support_min_; }
  double support_max() const noexcept { return support_max_; }

  friend bool operator==(const PBox&, const PBox&) = default;

 private:
  StepCdf lower_;
  StepCdf upper_;
  double support_min_;
  double support_max_;
};

/// Pointwise min/max envelope of a CDF family. Bounds come back in canonical
/// form. Throws EmptyFamilyError on an empty list.
PBox envelope(std::span<const StepCdf> cdfs);

/// Exact integral of (upper - lower) over [support_min, support_max].
double raw_area(const PBox& pbox) noexcept;

/// Raw area, optionally divided by the support width (0 for zero width).
double area(const PBox& pbox, bool normalize) noexcept;

/// Raw area divided by an externally chosen reference width. Used when two
/// boxes must be compared on a common axis.
double area_over(const PBox& pbox, double reference_width) noexcept;

/// True iff lower <= cdf <= upper on the merged knot grid.
bool contains(const PBox& pbox, const StepCdf& cdf) noexcept;

}  // namespace uqsched

#endif  // UQSCHED_PBOX_HPP
