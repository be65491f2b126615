#ifndef UQSCHED_CONTAMINATION_HPP
#define UQSCHED_CONTAMINATION_HPP

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "uqsched/distributions.hpp"
#include "uqsched/pbox.hpp"

namespace uqsched {

/// Vacuous contaminant: any distribution supported on [support_min, support_max].
struct VacuousContaminant {
  double support_min = 0.0;
  double support_max = 0.0;
};

/// Contaminant given as a p-box of its own.
struct ExplicitContaminant {
  StepCdf lower;
  StepCdf upper;
};

using Contaminant = std::variant<VacuousContaminant, ExplicitContaminant>;

/// (1 - epsilon) * base + epsilon * contaminant.
struct ContaminationSpec {
  double epsilon = 0.0;
  StepCdf base;
  Contaminant contaminant;
};

/// A gamble sampled at finitely many support points: (x, f(x)) pairs.
using Gamble = std::vector<std::pair<double, double>>;

/// Band of CDFs reachable by the contamination class, evaluated on indicator
/// gambles 1{X <= x}. Throws DomainError on invalid epsilon or contaminant.
PBox contaminate(const ContaminationSpec& spec);

/// Lower prevision (1 - eps) E_P[f] + eps Q_lower(f).
///
/// For the vacuous contaminant Q_lower(f) is the minimum gamble value. For an
/// explicit contaminant it is the smaller of the expectations under its two
/// bounding CDFs, which is the exact lower expectation for monotone gambles.
/// Throws DomainError if the gamble is undefined at a required knot.
double lower_prevision(const Gamble& gamble, const ContaminationSpec& spec);

/// Conjugate upper prevision; upper_prevision(f) = -lower_prevision(-f).
double upper_prevision(const Gamble& gamble, const ContaminationSpec& spec);

/// ECDF of all groups concatenated. Throws EmptySampleError if every group is empty.
StepCdf pooled_base(std::span<const std::vector<double>> groups);

}  // namespace uqsched

#endif  // UQSCHED_CONTAMINATION_HPP
