#include <benchmark/benchmark.h>

#include "sbtm/generative.hpp"
#include "sbtm/greedy.hpp"

using namespace sbtm;

namespace {

SimOutput benchmark_instance(int n, int t, uint64_t seed) {
  return simulate(n, t, 3, Hyperparameters::jeffreys(3), seed);
}

void BM_ComputeStats(benchmark::State& state) {
  auto sim = benchmark_instance(static_cast<int>(state.range(0)), 20, 7);
  for (auto _ : state) {
    auto stats = compute_stats(sim.cube, sim.z_true);
    benchmark::DoNotOptimize(stats.total_regime_count());
  }
}
BENCHMARK(BM_ComputeStats)->Arg(50)->Arg(100)->Arg(250);

void BM_LogIclFull(benchmark::State& state) {
  auto sim = benchmark_instance(50, 20, 7);
  auto stats = compute_stats(sim.cube, sim.z_true);
  auto hyper = Hyperparameters::jeffreys(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_icl_full(stats, hyper));
  }
}
BENCHMARK(BM_LogIclFull);

void BM_DeltaMove(benchmark::State& state) {
  auto sim = benchmark_instance(50, 20, 7);
  auto hyper = Hyperparameters::jeffreys(10);
  auto z = init_random(sim.cube, 10, 3);
  auto stats = compute_stats(sim.cube, z);
  int i = sim.cube.active_nodes(5).front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_icl_delta_move(stats, hyper, sim.cube, z, 5, i, 4));
  }
}
BENCHMARK(BM_DeltaMove);

void BM_Sweep(benchmark::State& state) {
  auto sim = benchmark_instance(50, 20, 7);
  auto hyper = Hyperparameters::jeffreys(10);
  uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    GreedyState gs(sim.cube, hyper, init_random(sim.cube, 10, ++seed));
    state.ResumeTiming();
    greedy_sweep(gs, seed);
    benchmark::DoNotOptimize(gs.log_icl);
  }
}
BENCHMARK(BM_Sweep);

void BM_Fit(benchmark::State& state) {
  auto sim = benchmark_instance(static_cast<int>(state.range(0)), 20, 7);
  auto hyper = Hyperparameters::jeffreys(10);
  FitConfig config;
  config.k_up = 10;
  config.n_restarts = 1;
  config.n_threads = 1;
  for (auto _ : state) {
    config.seed = static_cast<uint64_t>(state.iterations());
    auto result = fit(sim.cube, hyper, config);
    benchmark::DoNotOptimize(result.log_icl);
  }
}
BENCHMARK(BM_Fit)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
