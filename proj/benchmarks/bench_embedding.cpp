#include <benchmark/benchmark.h>

#include "spectral_embed/embedding.hpp"

using namespace spectral_embed;

namespace {

struct CircleSetup {
  ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(6.283185307179586), 2048);
  HeatEvaluator ev{compute_spectrum(m, 801), 800};
  Net net = build_net(m, 0.05);
};

const CircleSetup& setup() {
  static const CircleSetup s;
  return s;
}

}  // namespace

static void BM_g_map_image(benchmark::State& state) {
  const CircleSetup& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(image_of(make_g_map(s.ev, s.net, 0.4)).images.data());
}
BENCHMARK(BM_g_map_image)->Unit(benchmark::kMillisecond);

static void BM_dilatation_report(benchmark::State& state) {
  const CircleSetup& s = setup();
  const MapImage image = image_of(make_g_map(s.ev, s.net, 0.4));
  const double h_near = default_h_near(s.m);
  for (auto _ : state) benchmark::DoNotOptimize(dilatation_report(image, s.m, h_near, PairSampling{512, 7}).dil_max);
}
BENCHMARK(BM_dilatation_report)->Unit(benchmark::kMillisecond);

static void BM_net(benchmark::State& state) {
  const CircleSetup& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(build_net(s.m, 0.05).size());
}
BENCHMARK(BM_net)->Unit(benchmark::kMillisecond);
