#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "uqsched/predictor.hpp"

namespace {

using namespace uqsched;

struct Data {
  std::vector<double> xs;
  std::vector<double> ys;
};

Data biased(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xd(30.0, 600.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.xs.push_back(xd(rng));
    d.ys.push_back(0.2 * d.xs.back() + noise(rng));
  }
  return d;
}

void BM_GpFitFixed(benchmark::State& state) {
  const Data d = biased(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(GprModel::fit(d.xs, d.ys, RqKernelParams{100.0, 200.0, 1.0, 2.0}, false));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GpFitFixed)->RangeMultiplier(2)->Range(8, 512)->Complexity();

void BM_GpFitGrid(benchmark::State& state) {
  const Data d = biased(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(GprModel::fit(d.xs, d.ys, RqKernelParams{100.0, 200.0, 1.0, 2.0}, true));
  }
}
BENCHMARK(BM_GpFitGrid)->Arg(10)->Arg(50)->Arg(200);

void BM_GpPredict(benchmark::State& state) {
  const Data d = biased(static_cast<std::size_t>(state.range(0)));
  const GprModel m = GprModel::fit(d.xs, d.ys, RqKernelParams{100.0, 200.0, 1.0, 2.0}, false);
  double x = 30.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.predict(x));
    x = x > 600.0 ? 30.0 : x + 1.0;
  }
}
BENCHMARK(BM_GpPredict)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
