// Serial reference against the OpenMP drivers.
#include <benchmark/benchmark.h>

#include "popdyn/experiments.hpp"

namespace {

using namespace popdyn;

PopulationProfile six_group() {
  auto r = [](const char* s) { return Rational::parse(s); };
  return PopulationProfile::make({{r("12/30"), r("0.885")}}, {{r("3/30"), r("0.89")},
                                                               {r("3/30"), r("0.604")},
                                                               {r("3/30"), r("0.481")},
                                                               {r("1/30"), r("0.444")},
                                                               {r("8/30"), r("0.21")}});
}

SweepConfig sweep_config() {
  SweepConfig c;
  c.sizes = {30, 120, 480};
  c.replicates = 16;
  c.master_seed = 1;
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto profile = six_group();
  const auto config = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(serial::fluctuation_sweep(profile, config));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto profile = six_group();
  const auto config = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(fluctuation_sweep(profile, config));
}

void BM_DriftSerial(benchmark::State& state) {
  const auto profile = six_group();
  for (auto _ : state) benchmark::DoNotOptimize(serial::drift_consistency_check(profile, 30));
}

void BM_DriftParallel(benchmark::State& state) {
  const auto profile = six_group();
  for (auto _ : state) benchmark::DoNotOptimize(drift_consistency_check(profile, 30));
}

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DriftSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DriftParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
