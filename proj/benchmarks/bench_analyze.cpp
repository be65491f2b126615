#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "uqsched/scheduler.hpp"

namespace {

using namespace uqsched;

fixtures::BiasSpec spec_for(const benchmark::State& state) {
  fixtures::BiasSpec spec;
  spec.groups = static_cast<std::size_t>(state.range(0));
  spec.per_group = static_cast<std::size_t>(state.range(1));
  return spec;
}

void BM_AnalyzeRaw(benchmark::State& state) {
  const Snapshot s = fixtures::biased_snapshot(spec_for(state));
  const AnalysisConfig cfg;
  const PredictorBank none;
  for (auto _ : state) benchmark::DoNotOptimize(analyze(s, cfg, none));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.records.size()));
}
BENCHMARK(BM_AnalyzeRaw)->Args({4, 50})->Args({20, 50})->Args({40, 200});

void BM_TrainAndCompare(benchmark::State& state) {
  const Snapshot s = fixtures::biased_snapshot(spec_for(state));
  PredictorConfig pc;
  pc.noise_std = 2.0;
  const AnalysisConfig cfg;
  for (auto _ : state) {
    const PredictorBank bank = PredictorBank::fit(s, pc);
    benchmark::DoNotOptimize(compare_before_after(s, bank, cfg));
  }
}
BENCHMARK(BM_TrainAndCompare)->Args({4, 50})->Unit(benchmark::kMillisecond);

}  // namespace
