#include "uqsched/predictor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "uqsched/errors.hpp"

namespace uqsched {

namespace {

constexpr int kMaxJitterDoublings = 8;
constexpr double kJitterScale = 1e-10;

double second_moment(const std::vector<double>& v) {
  double s = 0.0;
  for (double y : v) {
    s += y * y;
  }
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) {
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

// Prior variance used when none is configured; falls back to 1 for all-zero targets.
double default_signal_var(const std::vector<double>& ys) {
  const double m2 = second_moment(ys);
  return m2 > 0.0 ? m2 : 1.0;
}

}  // namespace

void RqKernelParams::validate() const {
  const bool finite = std::isfinite(signal_var) && std::isfinite(length_scale) && std::isfinite(alpha) &&
                      std::isfinite(noise_std);
  if (!finite || !(signal_var > 0.0) || !(length_scale > 0.0) || !(alpha > 0.0) || noise_std < 0.0) {
    throw DomainError("rational-quadratic parameters must be finite, positive (noise_std >= 0)");
  }
}

double rq_kernel(double x1, double x2, const RqKernelParams& p) noexcept {
  const double d = x1 - x2;
  const double r = d * d / (2.0 * p.alpha * p.length_scale * p.length_scale);
  return p.signal_var * std::pow(1.0 + r, -p.alpha);
}

std::optional<GprModel> GprModel::factorize(const std::vector<double>& xs, const std::vector<double>& ys,
                                            const RqKernelParams& params) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const double noise_var = params.noise_std * params.noise_std;

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = rq_kernel(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], params);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) += noise_var;
  }
  const double base_jitter = kJitterScale * k.trace() / static_cast<double>(n);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);

  double jitter = 0.0;
  for (int attempt = 0; attempt <= kMaxJitterDoublings + 1; ++attempt) {
    if (attempt > 0) {
      jitter = base_jitter * std::ldexp(1.0, attempt - 1);
    }
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() != Eigen::Success) {
      continue;
    }
    const Eigen::MatrixXd l = llt.matrixL();
    const auto diag = l.diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite()) {
      continue;
    }

    GprModel m;
    m.xs_ = xs;
    m.ys_ = ys;
    m.params_ = params;
    m.jitter_ = jitter;
    m.chol_.assign(l.data(), l.data() + l.size());
    const Eigen::VectorXd alpha = llt.solve(y);
    m.alpha_.assign(alpha.data(), alpha.data() + alpha.size());
    m.lml_ = -0.5 * y.dot(alpha) - diag.array().log().sum() -
             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return m;
  }
  return std::nullopt;
}

GprModel GprModel::fit(std::vector<double> xs, std::vector<double> ys, const RqKernelParams& params,
                       bool optimize_hyper) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw DomainError("GP training needs equally sized, non-empty inputs");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw DomainError("GP training data must be finite");
    }
  }
  params.validate();

  if (!optimize_hyper) {
    if (auto m = factorize(xs, ys, params)) {
      return std::move(*m);
    }
    throw SingularKernelError("kernel matrix not positive definite after maximum jitter");
  }

  std::optional<GprModel> best;
  for (const auto& candidate : hyper_grid(xs, ys, params.noise_std)) {
    auto m = factorize(xs, ys, candidate);
    if (m && (!best || m->lml_ > best->lml_)) {
      best = std::move(m);
    }
  }
  if (!best) {
    throw SingularKernelError("no hyperparameter candidate produced a positive definite kernel");
  }
  return std::move(*best);
}

Posterior GprModel::predict(double x) const {
  const auto n = static_cast<Eigen::Index>(xs_.size());
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kstar(i) = rq_kernel(x, xs_[static_cast<std::size_t>(i)], params_);
  }
  const Eigen::Map<const Eigen::VectorXd> alpha(alpha_.data(), n);
  const Eigen::Map<const Eigen::MatrixXd> l(chol_.data(), n, n);
  const Eigen::VectorXd v = l.triangularView<Eigen::Lower>().solve(kstar);

  Posterior out;
  out.mean = kstar.dot(alpha);
  const double prior = rq_kernel(x, x, params_) + params_.noise_std * params_.noise_std;
  out.variance = std::max(0.0, prior - v.squaredNorm());
  out.std = std::sqrt(out.variance);
  return out;
}

std::vector<RqKernelParams> hyper_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                       double noise_std) {
  double x_scale = population_std(xs);
  if (!(x_scale > 0.0)) {
    x_scale = std::max(std::abs(mean_of(xs)), 1.0);
  }
  const double y_scale = default_signal_var(ys);

  std::vector<RqKernelParams> grid;
  grid.reserve(45);
  for (int li = -2; li <= 2; ++li) {
    const double ls = x_scale * std::pow(10.0, 0.5 * li);
    for (double sv_factor : {0.1, 1.0, 10.0}) {
      for (double alpha : {0.5, 1.0, 2.0}) {
        grid.push_back(RqKernelParams{y_scale * sv_factor, ls, alpha, noise_std});
      }
    }
  }
  return grid;
}

CorrectedEstimate corrected_estimate(const GprModel& model, double nominal_s) {
  if (!std::isfinite(nominal_s) || !(nominal_s > 0.0)) {
    throw DomainError("nominal duration must be positive");
  }
  const Posterior post = model.predict(nominal_s);
  CorrectedEstimate out;
  out.mean_error_s = post.mean;
  out.std_s = post.std;
  out.estimate_s = nominal_s + post.mean;
  if (out.estimate_s < 0.0) {
    out.estimate_s = 0.0;
    out.clamped = true;
  }
  return out;
}

void PredictorConfig::validate() const {
  if (!std::isfinite(noise_std) || noise_std < 0.0) {
    throw DomainError("predictor.noise_std must be finite and >= 0");
  }
  if (!std::isfinite(length_scale) || !(length_scale > 0.0)) {
    throw DomainError("predictor.length_scale must be positive");
  }
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw DomainError("predictor.alpha must be positive");
  }
  if (signal_var && (!std::isfinite(*signal_var) || !(*signal_var > 0.0))) {
    throw DomainError("predictor.signal_var must be positive");
  }
  if (min_train_size < 1) {
    throw DomainError("predictor.min_train_size must be at least 1");
  }
}

std::string_view to_string(ModelSource source) noexcept {
  switch (source) {
    case ModelSource::Group:
      return "group";
    case ModelSource::Pooled:
      return "pooled";
    case ModelSource::None:
      return "none";
  }
  return "none";
}

std::optional<ModelSource> parse_model_source(std::string_view text) noexcept {
  for (ModelSource s : {ModelSource::Group, ModelSource::Pooled, ModelSource::None}) {
    if (text == to_string(s)) {
      return s;
    }
  }
  return std::nullopt;
}

namespace {

GprModel fit_samples(const std::vector<const ErrorSample*>& samples, const PredictorConfig& config) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const ErrorSample* s : samples) {
    xs.push_back(s->nominal_s);
    ys.push_back(s->error_s);
  }
  RqKernelParams params{config.signal_var.value_or(default_signal_var(ys)), config.length_scale,
                        config.alpha, config.noise_std};
  return GprModel::fit(std::move(xs), std::move(ys), params, config.optimize);
}

}  // namespace

PredictorBank PredictorBank::fit(const Snapshot& snapshot, const PredictorConfig& config) {
  config.validate();
  PredictorBank bank(config.min_train_size);

  const auto groups = group_error_samples(snapshot);
  std::map<PooledKey, std::vector<const ErrorSample*>> pools;
  std::map<PooledKey, bool> pool_needed;
  for (const auto& [key, samples] : groups) {
    const PooledKey pk{key.sequence_id, key.season};
    auto& pool = pools[pk];
    for (const auto& s : samples) {
      pool.push_back(&s);
    }
    if (samples.size() >= config.min_train_size) {
      std::vector<const ErrorSample*> own;
      for (const auto& s : samples) {
        own.push_back(&s);
      }
      bank.add_group_model(key, fit_samples(own, config));
    } else {
      pool_needed[pk] = true;
    }
  }
  for (const auto& [pk, samples] : pools) {
    if (pool_needed.count(pk) != 0 && samples.size() >= config.min_train_size) {
      bank.add_pooled_model(pk, fit_samples(samples, config));
    }
  }
  return bank;
}

std::pair<const GprModel*, ModelSource> PredictorBank::lookup(const GroupKey& key) const {
  if (auto it = group_models_.find(key); it != group_models_.end()) {
    return {&it->second, ModelSource::Group};
  }
  if (auto it = pooled_models_.find(PooledKey{key.sequence_id, key.season}); it != pooled_models_.end()) {
    return {&it->second, ModelSource::Pooled};
  }
  return {nullptr, ModelSource::None};
}

Correction PredictorBank::correct(const GroupKey& key, double nominal_s) const {
  if (!std::isfinite(nominal_s) || !(nominal_s > 0.0)) {
    throw DomainError("nominal duration must be positive");
  }
  const auto [model, source] = lookup(key);
  Correction out;
  out.nominal_s = nominal_s;
  out.source = source;
  if (model == nullptr) {
    out.estimate_s = nominal_s;
    return out;
  }
  const CorrectedEstimate est = corrected_estimate(*model, nominal_s);
  out.estimate_s = est.estimate_s;
  out.mean_error_s = est.mean_error_s;
  out.std_s = est.std_s;
  out.clamped = est.clamped;
  return out;
}

}  // namespace uqsched
