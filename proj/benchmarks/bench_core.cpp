#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "uqsched/contamination.hpp"
#include "uqsched/pbox.hpp"

namespace {

using namespace uqsched;

std::vector<double> normal_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 100.0);
  std::vector<double> s(n);
  for (auto& v : s) v = nd(rng);
  return s;
}

void BM_Ecdf(benchmark::State& state) {
  const auto s = normal_samples(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecdf(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ecdf)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_Envelope(benchmark::State& state) {
  std::vector<StepCdf> fam;
  for (int i = 0; i < state.range(0); ++i) fam.push_back(ecdf(normal_samples(12, 100 + i)));
  for (auto _ : state) benchmark::DoNotOptimize(envelope(fam));
}
BENCHMARK(BM_Envelope)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

void BM_Area(benchmark::State& state) {
  std::vector<StepCdf> fam;
  for (int i = 0; i < 16; ++i) fam.push_back(ecdf(normal_samples(static_cast<std::size_t>(state.range(0)), 7 + i)));
  const PBox b = envelope(fam);
  for (auto _ : state) benchmark::DoNotOptimize(area(b, true));
}
BENCHMARK(BM_Area)->Arg(12)->Arg(120)->Arg(1200);

void BM_Contaminate(benchmark::State& state) {
  const StepCdf base = ecdf(normal_samples(static_cast<std::size_t>(state.range(0)), 3));
  const ContaminationSpec spec{0.2, base, VacuousContaminant{base.min_knot(), base.max_knot()}};
  for (auto _ : state) benchmark::DoNotOptimize(contaminate(spec));
}
BENCHMARK(BM_Contaminate)->Arg(8)->Arg(24)->Arg(240);

}  // namespace

BENCHMARK_MAIN();
