#include <benchmark/benchmark.h>

#include "occtime/montecarlo.hpp"

using namespace occtime;

static void BM_SimulateTwoValued(benchmark::State& state) {
  TwoValuedDriftSpec spec;
  spec.rate_left = 2.0;
  spec.rate_right = 1.0;
  spec.horizon = 1.0;
  SimConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.dt = 1e-3;
  cfg.threads = 1;
  cfg.record = Record::final_state_and_occupation;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_two_valued(spec, cfg).x.data());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SimulateTwoValued)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SimulateFilippov(benchmark::State& state) {
  const auto sys = FilippovSystem::builtin_example();
  const auto noise = NoiseSpec::builtin_example(0.1);
  const VectorXd y0 = VectorXd::Constant(1, 2.0);
  SimConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.dt = 1e-3;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_filippov(sys, noise, y0, cfg).states.data());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SimulateFilippov)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Histogram(benchmark::State& state) {
  std::vector<double> samples(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<double>(i % 997) / 997.0;
  for (auto _ : state) benchmark::DoNotOptimize(build_histogram(samples, 50, 0.0, 1.0).density.data());
}
BENCHMARK(BM_Histogram)->Arg(100000);

BENCHMARK_MAIN();
