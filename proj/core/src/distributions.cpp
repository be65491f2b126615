#include "uqsched/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqsched/errors.hpp"

namespace uqsched {

StepCdf::StepCdf(std::vector<double> knots, std::vector<double> cum_probs)
    : knots_(std::move(knots)), cum_probs_(std::move(cum_probs)) {
  if (knots_.empty()) {
    throw DomainError("StepCdf requires at least one knot");
  }
  if (knots_.size() != cum_probs_.size()) {
    throw DomainError("StepCdf knots and cum_probs differ in length");
  }
  double prev_p = 0.0;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i])) {
      throw DomainError("StepCdf knot is not finite");
    }
    if (i > 0 && !(knots_[i] > knots_[i - 1])) {
      throw DomainError("StepCdf knots must be strictly increasing");
    }
    const double p = cum_probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("StepCdf probability outside [0, 1]");
    }
    if (p < prev_p) {
      throw DomainError("StepCdf probabilities must be non-decreasing");
    }
    prev_p = p;
  }
  if (cum_probs_.back() != 1.0) {
    throw DomainError("StepCdf must end at probability 1, got " +
                      std::to_string(cum_probs_.back()));
  }
}

StepCdf StepCdf::canonical() const {
  std::vector<double> k;
  std::vector<double> p;
  double prev = 0.0;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (cum_probs_[i] != prev) {
      k.push_back(knots_[i]);
      p.push_back(cum_probs_[i]);
      prev = cum_probs_[i];
    }
  }
  return StepCdf(std::move(k), std::move(p));
}

StepCdf StepCdf::point_mass(double x) { return StepCdf({x}, {1.0}); }

StepCdf ecdf(std::span<const double> samples) {
  if (samples.empty()) {
    throw EmptySampleError("ecdf of an empty sample set");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) {
      throw DomainError("sample value is not finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());

  const auto n = static_cast<double>(sorted.size());
  std::vector<double> knots;
  std::vector<double> probs;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
      continue;
    }
    knots.push_back(sorted[i]);
    probs.push_back(static_cast<double>(i + 1) / n);
  }
  return StepCdf(std::move(knots), std::move(probs));
}

double eval_cdf(const StepCdf& cdf, double x) noexcept {
  const auto& k = cdf.knots();
  auto it = std::upper_bound(k.begin(), k.end(), x);
  if (it == k.begin()) {
    return 0.0;
  }
  return cdf.cum_probs()[static_cast<std::size_t>(it - k.begin()) - 1];
}

double quantile(const StepCdf& cdf, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("quantile level must lie in (0, 1]");
  }
  const auto& probs = cdf.cum_probs();
  auto it = std::lower_bound(probs.begin(), probs.end(), p);
  // The last probability is exactly 1, so `it` is always dereferenceable.
  return cdf.knots()[static_cast<std::size_t>(it - probs.begin())];
}

MassFunction histogram(std::span<const double> samples, std::size_t bin_count) {
  if (samples.empty()) {
    throw EmptySampleError("histogram of an empty sample set");
  }
  if (bin_count == 0) {
    throw DomainError("histogram needs at least one bin");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw DomainError("sample value is not finite");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    return MassFunction{{lo, hi}, {1.0}};
  }

  MassFunction out;
  out.bin_edges.resize(bin_count + 1);
  const double width = hi - lo;
  for (std::size_t i = 0; i < bin_count; ++i) {
    out.bin_edges[i] = lo + width * static_cast<double>(i) / static_cast<double>(bin_count);
  }
  out.bin_edges[bin_count] = hi;

  std::vector<std::size_t> counts(bin_count, 0);
  for (double v : samples) {
    auto bin = static_cast<std::size_t>((v - lo) / width * static_cast<double>(bin_count));
    counts[std::min(bin, bin_count - 1)] += 1;
  }
  const auto n = static_cast<double>(samples.size());
  out.masses.reserve(bin_count);
  for (std::size_t c : counts) {
    out.masses.push_back(static_cast<double>(c) / n);
  }
  return out;
}

std::vector<double> merged_grid(std::span<const StepCdf* const> cdfs) {
  std::vector<double> grid;
  for (const StepCdf* c : cdfs) {
    grid.insert(grid.end(), c->knots().begin(), c->knots().end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace uqsched
