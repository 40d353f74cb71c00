// Direction sweep: OpenMP kernel against the serial reference.
#include <benchmark/benchmark.h>

#include "geoobs/harness.hpp"

namespace {

std::vector<geoobs::Surface> saddle() {
  return {geoobs::Surface(geoobs::BivariateSeries::from_terms(
      12, {{2, 0, 1.0}, {0, 2, -1.0}, {3, 0, 0.3}, {1, 2, -0.2}, {0, 3, 0.1}}))};
}

geoobs::SweepConfig config(benchmark::State& state) {
  geoobs::SweepConfig cfg;
  cfg.n_dirs = static_cast<int>(state.range(0));
  cfg.refine = false;
  return cfg;
}

void BM_SweepParallel(benchmark::State& state) {
  const auto s = saddle();
  const auto cfg = config(state);
  for (auto _ : state) benchmark::DoNotOptimize(geoobs::sweep_directions(s, geoobs::Vec3::Zero(), cfg));
  state.counters["threads"] = geoobs::worker_threads();
  state.SetItemsProcessed(state.iterations() * cfg.n_dirs);
}

void BM_SweepSerial(benchmark::State& state) {
  const auto s = saddle();
  const auto cfg = config(state);
  for (auto _ : state) benchmark::DoNotOptimize(geoobs::sweep_directions_serial(s, geoobs::Vec3::Zero(), cfg));
  state.SetItemsProcessed(state.iterations() * cfg.n_dirs);
}

}  // namespace

BENCHMARK(BM_SweepParallel)->Arg(90)->Arg(360)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(90)->Arg(360)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
