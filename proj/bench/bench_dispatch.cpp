// Compares the serial reference dispatch against the OpenMP paths. Both
// produce identical results (covered by the test suite); this target measures
// what the parallel loops actually buy on the current machine.

#include <benchmark/benchmark.h>

#include "cradar/engine.hpp"

namespace {

cradar::ScenarioConfig bench_config() {
  cradar::ScenarioConfig cfg = cradar::desk_config();
  cfg.t_max = 10;
  cfg.n_sim = 400;
  cfg.n_particles = 400;
  return cfg;
}

void run_batch(benchmark::State& state, bool parallel_runs, bool parallel_planners) {
  const cradar::ScenarioConfig cfg = bench_config();
  cradar::EngineOptions opt;
  opt.parallel_runs = parallel_runs;
  opt.parallel_planners = parallel_planners;
  for (auto _ : state) {
    cradar::BatchResult batch = cradar::run_monte_carlo(cfg, 4, 42, opt);
    benchmark::DoNotOptimize(batch.runs.data());
  }
}

void BM_RunsSerial(benchmark::State& state) { run_batch(state, false, false); }
void BM_RunsParallel(benchmark::State& state) { run_batch(state, true, false); }
void BM_PlannersSerial(benchmark::State& state) { run_batch(state, false, false); }
void BM_PlannersParallel(benchmark::State& state) { run_batch(state, false, true); }

void run_episode_once(benchmark::State& state, bool parallel_planners) {
  const cradar::ScenarioConfig cfg = bench_config();
  cradar::EngineOptions opt;
  opt.parallel_planners = parallel_planners;
  std::uint64_t seed = 7;
  for (auto _ : state) {
    cradar::EpisodeResult ep = cradar::run_episode(cfg, seed++, opt);
    benchmark::DoNotOptimize(ep.steps.data());
  }
}

void BM_EpisodeSerial(benchmark::State& state) { run_episode_once(state, false); }
void BM_EpisodeParallelPlanners(benchmark::State& state) {
  run_episode_once(state, true);
}

}  // namespace

BENCHMARK(BM_RunsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlannersSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlannersParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpisodeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpisodeParallelPlanners)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
