#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "spectral_embed/heat.hpp"

using namespace spectral_embed;

static void BM_circle_kernel(benchmark::State& state) {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(6.283185307179586), 2048);
  const int n = static_cast<int>(state.range(0));
  const HeatEvaluator ev(compute_spectrum(m, n + 1), n);
  const Point p{Eigen::VectorXd::Constant(1, 0.3), -1};
  const Point q{Eigen::VectorXd::Constant(1, 2.1), -1};
  for (auto _ : state) benchmark::DoNotOptimize(ev.kernel(p, 0.05, q));
}
BENCHMARK(BM_circle_kernel)->Arg(100)->Arg(800);

static void BM_circle_gradient(benchmark::State& state) {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(6.283185307179586), 2048);
  const HeatEvaluator ev(compute_spectrum(m, 801), 800);
  const Point p{Eigen::VectorXd::Constant(1, 0.3), -1};
  const Point q{Eigen::VectorXd::Constant(1, 2.1), -1};
  for (auto _ : state) benchmark::DoNotOptimize(ev.gradient(p, 0.05, q)[0]);
}
BENCHMARK(BM_circle_gradient);
