#include "uqsched/pbox.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "uqsched/errors.hpp"

namespace uqsched {

namespace {

std::vector<double> bound_grid(const StepCdf& a, const StepCdf& b) {
  const std::array<const StepCdf*, 2> pair{&a, &b};
  return merged_grid(pair);
}

}  // namespace

PBox::PBox(StepCdf lower, StepCdf upper)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      support_min_(std::min(lower_.min_knot(), upper_.min_knot())),
      support_max_(std::max(lower_.max_knot(), upper_.max_knot())) {
  for (double x : bound_grid(lower_, upper_)) {
    if (eval_cdf(upper_, x) < eval_cdf(lower_, x) - kBoundSlack) {
      throw DomainError("p-box upper bound falls below lower bound");
    }
  }
}

PBox envelope(std::span<const StepCdf> cdfs) {
  if (cdfs.empty()) {
    throw EmptyFamilyError("envelope of an empty CDF family");
  }
  std::vector<const StepCdf*> ptrs;
  ptrs.reserve(cdfs.size());
  for (const auto& c : cdfs) {
    ptrs.push_back(&c);
  }
  const std::vector<double> grid = merged_grid(ptrs);

  std::vector<double> lo(grid.size());
  std::vector<double> hi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mn = 1.0;
    double mx = 0.0;
    for (const auto& c : cdfs) {
      const double v = eval_cdf(c, grid[i]);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    lo[i] = mn;
    hi[i] = mx;
  }
  return PBox(StepCdf(grid, std::move(lo)).canonical(),
              StepCdf(grid, std::move(hi)).canonical());
}

double raw_area(const PBox& pbox) noexcept {
  const std::vector<double> grid = bound_grid(pbox.lower(), pbox.upper());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double gap = eval_cdf(pbox.upper(), grid[i]) - eval_cdf(pbox.lower(), grid[i]);
    total += std::max(0.0, gap) * (grid[i + 1] - grid[i]);
  }
  return total;
}

double area_over(const PBox& pbox, double reference_width) noexcept {
  if (!(reference_width > 0.0)) {
    return 0.0;
  }
  return raw_area(pbox) / reference_width;
}

double area(const PBox& pbox, bool normalize) noexcept {
  if (!normalize) {
    return raw_area(pbox);
  }
  return area_over(pbox, pbox.support_max() - pbox.support_min());
}

bool contains(const PBox& pbox, const StepCdf& cdf) noexcept {
  const std::array<const StepCdf*, 3> all{&pbox.lower(), &pbox.upper(), &cdf};
  for (double x : merged_grid(all)) {
    const double f = eval_cdf(cdf, x);
    if (f < eval_cdf(pbox.lower(), x) - kBoundSlack ||
        f > eval_cdf(pbox.upper(), x) + kBoundSlack) {
      return false;
    }
  }
  return true;
}

}  // namespace uqsched
