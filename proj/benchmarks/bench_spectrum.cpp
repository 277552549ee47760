#include <benchmark/benchmark.h>

#include "spectral_embed/spectrum.hpp"

using namespace spectral_embed;

// Lowest eigenpairs of the cotangent Laplacian on an icosphere.
static void BM_icosphere_spectrum(benchmark::State& state) {
  const ManifoldHandle m = ManifoldHandle::from_mesh(make_sphere(1.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(m, 17).eigenvalue(16));
  state.counters["vertices"] = static_cast<double>(m.sample_count());
}
BENCHMARK(BM_icosphere_spectrum)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_circle_spectrum(benchmark::State& state) {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(6.283185307179586), 2048);
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(m, static_cast<int>(state.range(0))).eigenvalue(1));
}
BENCHMARK(BM_circle_spectrum)->Arg(101)->Arg(801)->Unit(benchmark::kMillisecond);
