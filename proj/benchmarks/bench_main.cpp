#include <benchmark/benchmark.h>

#include "radtrans/kernel.hpp"
#include "radtrans/solver.hpp"
#include "radtrans/transport_oracle.hpp"

using namespace radtrans;

namespace {

ProblemConfig grey_config(std::size_t n) {
  ProblemConfig c;
  c.grid = CartesianGrid(n, 1.0);
  return c;
}

ScalarField emission(const ProblemConfig& c) {
  return assemble_source_grey(ScalarField(c.grid), initial_temperature(c, 0.07), 0.0, c.domain);
}

void BM_FftConvolution(benchmark::State& state) {
  const ProblemConfig c = grey_config(static_cast<std::size_t>(state.range(0)));
  const ScalarField s = emission(c);
  const Convolver conv(c.grid);
  const Spectrum k = conv.transform_kernel(c.kernel_for(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(conv.apply(s, k));
}
BENCHMARK(BM_FftConvolution)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_DirectConvolution(benchmark::State& state) {
  const ProblemConfig c = grey_config(static_cast<std::size_t>(state.range(0)));
  const ScalarField s = emission(c);
  const KernelSpec spec = c.kernel_for(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(direct_convolve(s, spec));
}
BENCHMARK(BM_DirectConvolution)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_RayOracle(benchmark::State& state) {
  const ProblemConfig c = grey_config(static_cast<std::size_t>(state.range(0)));
  const SourceFunction src = bilinear_source(emission(c));
  const BoundaryIntensity bnd = planet_illumination(c.illum);
  const RayQuadrature quad = RayQuadrature::defaults(c.domain);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_intensity_direct(c.grid, src, bnd, 0.5, c.domain, quad));
  }
}
BENCHMARK(BM_RayOracle)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GreyIteration(benchmark::State& state) {
  const ProblemConfig c = grey_config(static_cast<std::size_t>(state.range(0)));
  const GreyOperator op(c);
  const ScalarField T = initial_temperature(c, 0.07);
  const ScalarField J(c.grid);
  for (auto _ : state) benchmark::DoNotOptimize(op.step(T, J));
}
BENCHMARK(BM_GreyIteration)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SpectralIteration(benchmark::State& state) {
  ProblemConfig c = grey_config(static_cast<std::size_t>(state.range(0)));
  c.model = SpectralModel({0.5, 0.03}, 0.0, 0.01, 15.0);
  const SpectralOperator op(c);
  const ScalarField T = initial_temperature(c, 0.07);
  for (auto _ : state) benchmark::DoNotOptimize(op.step(T, {}));
}
BENCHMARK(BM_SpectralIteration)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
