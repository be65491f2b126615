#include "uqsched/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "uqsched/errors.hpp"

namespace uqsched {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("contamination epsilon must lie in [0, 1]");
  }
}

// Mixes base and contaminant values on a knot; the top of both CDFs must land
// on exactly 1 regardless of how (1 - eps) + eps rounds.
double mix(double weight_base, double f, double epsilon, double g) {
  if (f == 1.0 && g == 1.0) {
    return 1.0;
  }
  return std::min(1.0, weight_base * f + epsilon * g);
}

class GambleTable {
 public:
  explicit GambleTable(const Gamble& gamble) : points_(gamble) {
    if (points_.empty()) {
      throw DomainError("gamble has no support points");
    }
    std::sort(points_.begin(), points_.end());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
        throw DomainError("gamble values must be finite");
      }
      if (i > 0 && points_[i].first == points_[i - 1].first &&
          points_[i].second != points_[i - 1].second) {
        throw DomainError("gamble assigns two values to one support point");
      }
    }
  }

  double at(double x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x,
                               [](const auto& p, double v) { return p.first < v; });
    if (it == points_.end() || it->first != x) {
      throw DomainError("gamble undefined at a distribution knot");
    }
    return it->second;
  }

  double min_value() const {
    return std::min_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->second;
  }

  double max_value() const {
    return std::max_element(points_.begin(), points_.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->second;
  }

 private:
  Gamble points_;
};

double expectation(const StepCdf& cdf, const GambleTable& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    total += cdf.mass(i) * f.at(cdf.knots()[i]);
  }
  return total;
}

// Lower/upper contaminant previsions (Q_lower(f), Q_upper(f)).
std::pair<double, double> contaminant_previsions(const Contaminant& q, const GambleTable& f) {
  if (std::holds_alternative<VacuousContaminant>(q)) {
    return {f.min_value(), f.max_value()};
  }
  const auto& ex = std::get<ExplicitContaminant>(q);
  const double a = expectation(ex.lower, f);
  const double b = expectation(ex.upper, f);
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

PBox contaminate(const ContaminationSpec& spec) {
  check_epsilon(spec.epsilon);
  const double eps = spec.epsilon;
  const double w = 1.0 - eps;

  std::vector<double> grid = spec.base.knots();
  std::function<double(double)> g_lower;
  std::function<double(double)> g_upper;

  if (const auto* vac = std::get_if<VacuousContaminant>(&spec.contaminant)) {
    const double a = vac->support_min;
    const double b = vac->support_max;
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
      throw DomainError("vacuous contaminant needs a finite support with min <= max");
    }
    grid.push_back(a);
    grid.push_back(b);
    // Lower CDF of the vacuous class is the point mass at b, upper at a.
    g_lower = [b](double x) { return x >= b ? 1.0 : 0.0; };
    g_upper = [a](double x) { return x >= a ? 1.0 : 0.0; };
  } else {
    const auto& ex = std::get<ExplicitContaminant>(spec.contaminant);
    [[maybe_unused]] const PBox check(ex.lower, ex.upper);  // upper >= lower
    grid.insert(grid.end(), ex.lower.knots().begin(), ex.lower.knots().end());
    grid.insert(grid.end(), ex.upper.knots().begin(), ex.upper.knots().end());
    g_lower = [&ex](double x) { return eval_cdf(ex.lower, x); };
    g_upper = [&ex](double x) { return eval_cdf(ex.upper, x); };
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> lo(grid.size());
  std::vector<double> hi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = eval_cdf(spec.base, grid[i]);
    lo[i] = mix(w, f, eps, g_lower(grid[i]));
    hi[i] = mix(w, f, eps, g_upper(grid[i]));
  }
  return PBox(StepCdf(grid, std::move(lo)).canonical(), StepCdf(grid, std::move(hi)).canonical());
}

double lower_prevision(const Gamble& gamble, const ContaminationSpec& spec) {
  check_epsilon(spec.epsilon);
  const GambleTable f(gamble);
  const double base = expectation(spec.base, f);
  return (1.0 - spec.epsilon) * base + spec.epsilon * contaminant_previsions(spec.contaminant, f).first;
}

double upper_prevision(const Gamble& gamble, const ContaminationSpec& spec) {
  check_epsilon(spec.epsilon);
  const GambleTable f(gamble);
  const double base = expectation(spec.base, f);
  return (1.0 - spec.epsilon) * base + spec.epsilon * contaminant_previsions(spec.contaminant, f).second;
}

StepCdf pooled_base(std::span<const std::vector<double>> groups) {
  std::vector<double> all;
  for (const auto& g : groups) {
    all.insert(all.end(), g.begin(), g.end());
  }
  if (all.empty()) {
    throw EmptySampleError("pooled base needs at least one sample");
  }
  return ecdf(all);
}

}  // namespace uqsched
