#include <benchmark/benchmark.h>

#include "occtime/sliding_long.hpp"
#include "occtime/sliding_short.hpp"

using namespace occtime;

namespace {

FrozenDriftParams builtin_params() {
  return frozen_params_from_system(FilippovSystem::builtin_example(),
                                   NoiseSpec::builtin_example(0.1), VectorXd::Constant(1, 2.0));
}

}  // namespace

static void BM_OrthogonalPdf(benchmark::State& state) {
  const auto p = builtin_params();
  const double x = static_cast<double>(state.range(0)) * 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(orthogonal_pdf(x, 0.1, p));
}
BENCHMARK(BM_OrthogonalPdf)->Arg(-5)->Arg(0)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_ParallelPdf(benchmark::State& state) {
  const auto p = builtin_params();
  const VectorXd y = VectorXd::Constant(1, 1.9);
  for (auto _ : state) benchmark::DoNotOptimize(parallel_pdf(y, 0.1, p));
}
BENCHMARK(BM_ParallelPdf)->Unit(benchmark::kMicrosecond);

static void BM_Covariance(benchmark::State& state) {
  const auto sys = FilippovSystem::builtin_example();
  const auto noise = NoiseSpec::builtin_example(0.1);
  const VectorXd y0 = VectorXd::Constant(1, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance(sys, noise, y0, 2.0).final_state().theta(0, 0));
  }
}
BENCHMARK(BM_Covariance)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
