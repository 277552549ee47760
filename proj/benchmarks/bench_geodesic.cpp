#include <benchmark/benchmark.h>

#include "spectral_embed/manifold.hpp"

using namespace spectral_embed;

// Single-source distances on a periodic grid mesh.
static void BM_torus_distances(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const ManifoldHandle m =
      ManifoldHandle::from_mesh(make_flat_torus_mesh(1.0, 1.0, cells, cells), GeodesicMethod::kWavefront);
  for (auto _ : state) benchmark::DoNotOptimize(m.distances_from(0).back());
}
BENCHMARK(BM_torus_distances)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_sphere_distances(benchmark::State& state) {
  const ManifoldHandle m = ManifoldHandle::from_mesh(make_sphere(1.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(m.distances_from(0).back());
}
BENCHMARK(BM_sphere_distances)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
