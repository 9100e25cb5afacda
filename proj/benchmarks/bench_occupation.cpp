#include <benchmark/benchmark.h>

#include "occtime/numerics/special.hpp"
#include "occtime/occupation.hpp"

using namespace occtime;

static void BM_erfcx(benchmark::State& state) {
  double x = -20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::erfcx(x));
    x = x > 40.0 ? -20.0 : x + 0.37;
  }
}
BENCHMARK(BM_erfcx);

static void BM_OccupationPdfZero(benchmark::State& state) {
  TwoValuedDriftSpec spec;
  spec.rate_left = 2.0;
  spec.rate_right = 1.0;
  spec.horizon = static_cast<double>(state.range(0));
  double u = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(occupation_pdf_zero(u * spec.horizon, spec));
    u = u > 0.9 ? 0.05 : u + 0.1;
  }
}
BENCHMARK(BM_OccupationPdfZero)->Arg(1)->Arg(10)->Arg(100);

static void BM_OccupationPdfGeneral(benchmark::State& state) {
  TwoValuedDriftSpec spec;
  spec.rate_left = 2.0;
  spec.rate_right = 1.0;
  spec.horizon = 1.0;
  spec.x0 = -0.5;
  for (auto _ : state) benchmark::DoNotOptimize(occupation_pdf_general(0.3, spec).density);
}
BENCHMARK(BM_OccupationPdfGeneral)->Unit(benchmark::kMicrosecond);

static void BM_OccupationCdf(benchmark::State& state) {
  TwoValuedDriftSpec spec;
  spec.rate_left = 2.0;
  spec.rate_right = 1.0;
  spec.horizon = 1.0;
  for (auto _ : state) {
    OccupationCdf cdf(spec, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(cdf.total());
  }
}
BENCHMARK(BM_OccupationCdf)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
