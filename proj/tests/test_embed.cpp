#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectral_embed/embedding.hpp"
#include "spectral_embed/error.hpp"

using namespace spectral_embed;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CircleSetup {
  ManifoldHandle manifold = ManifoldHandle::from_analytic(AnalyticManifold::circle(kTwoPi), 512);
  Spectrum spectrum = compute_spectrum(manifold, 201);
  HeatEvaluator ev{spectrum, 200};
  Net net = build_net(manifold, 0.1);
};

ScanReport synthetic_scan(const std::vector<double>& errors) {
  std::vector<double> times;
  for (std::size_t i = 0; i < errors.size(); ++i) times.push_back(std::pow(0.5, static_cast<double>(i)));
  std::size_t i = 0;
  return scan_times(times, [&](double) {
    EmbeddingReport r;
    r.dil_min = 1.0 - errors[i];
    r.dil_max = 1.0 + errors[i] / 2.0;
    r.inj_margin = 1.0;
    ++i;
    return r;
  });
}

}  // namespace

TEST_CASE_FIXTURE(CircleSetup, "farthest point net covers the sample and is delta-separated") {
  CHECK(net.covering_radius <= 0.1);
  for (Index i = 0; i < net.size(); ++i) {
    for (Index j = i + 1; j < net.size(); ++j) {
      CHECK(manifold.distance(net.points[static_cast<std::size_t>(i)], net.points[static_cast<std::size_t>(j)]) > 0.1);
    }
  }
  CHECK(net.samples.front() == 0);
  const Net again = build_net(manifold, 0.1);
  CHECK(again.samples == net.samples);
  CHECK_THROWS_WITH_AS(build_net(manifold, 1e-4), doctest::Contains("net finer than discretization"), InvalidArgument);
}

TEST_CASE("net covering holds on a mesh") {
  const ManifoldHandle m = ManifoldHandle::from_mesh(make_sphere(1.0, 3));
  const Net net = build_net(m, 0.4);
  for (Index v = 0; v < m.sample_count(); ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : net.points) best = std::min(best, m.distance(m.sample(v), q));
    CHECK(best <= 0.4 + 1e-12);
  }
}

TEST_CASE_FIXTURE(CircleSetup, "Voronoi cells partition the sample") {
  const VoronoiCells cells = voronoi_weights(manifold, net);
  CHECK(cells.weights.sum() == doctest::Approx(manifold.volume()).epsilon(1e-12));
  CHECK(cells.max_cell_radius <= net.covering_radius + 1e-12);
  for (Index i = 0; i < manifold.sample_count(); i += 7) {
    const Point p = manifold.sample(i);
    const Index owner = cells.owner[static_cast<std::size_t>(i)];
    const double d_owner = manifold.distance(p, net.points[static_cast<std::size_t>(owner)]);
    for (Index j = 0; j < net.size(); ++j) {
      const double d = manifold.distance(p, net.points[static_cast<std::size_t>(j)]);
      CHECK(d_owner <= d + 1e-12);
      if (j < owner) CHECK(d > d_owner);  // ties go to the lowest index
    }
  }
}

TEST_CASE_FIXTURE(CircleSetup, "replication repeats each net point ceil(weight / lambda) times") {
  const VoronoiCells cells = voronoi_weights(manifold, net);
  const double lambda = 0.01;
  const ReplicatedNet rep = replicate_net(net, cells.weights, lambda);
  std::size_t total = 0;
  for (Index i = 0; i < net.size(); ++i) {
    const int expected = static_cast<int>(std::ceil(cells.weights[i] / lambda * (1.0 - 1e-12)));
    CHECK(rep.counts[static_cast<std::size_t>(i)] == expected);
    total += static_cast<std::size_t>(expected);
  }
  CHECK(rep.points.size() == total);
}

TEST_CASE("map scales follow the normalising constants") {
  const double t = 0.3;
  for (int n : {1, 2, 3}) {
    const double g = std::pow(2.0 * t, (n + 1) / 2.0) * std::pow(2.0 * std::numbers::pi, n / 2.0) * std::exp(0.5);
    const double h = std::pow(2.0 * t, (n + 2) / 4.0) * std::sqrt(2.0) * std::pow(4.0 * std::numbers::pi, n / 4.0);
    CHECK(map_scale(MapKind::kG, n, t) == doctest::Approx(g));
    CHECK(map_scale(MapKind::kH, n, t) == doctest::Approx(h));
    CHECK(map_scale(MapKind::kF, n, t) == doctest::Approx(h));
    CHECK(map_scale(MapKind::kKuratowski, n, t) == 1.0);
  }
}

TEST_CASE_FIXTURE(CircleSetup, "G and H maps evaluate scaled truncated kernels") {
  const double t = 0.2;
  const Point p = manifold.sample(33);
  const EmbeddingMap g = make_g_map(ev, net, t);
  const VoronoiCells cells = voronoi_weights(manifold, net);
  const EmbeddingMap h = make_h_map(ev, net, cells, t);
  REQUIRE(g.dimension() == net.size());
  const Eigen::VectorXd gv = g.evaluate(p);
  const Eigen::VectorXd hv = h.evaluate(p);
  for (Index i = 0; i < net.size(); ++i) {
    const double k = ev.kernel(p, t, net.points[static_cast<std::size_t>(i)]);
    CHECK(gv[i] == doctest::Approx(g.scale() * k).epsilon(1e-12));
    CHECK(hv[i] == doctest::Approx(h.scale() * std::sqrt(cells.weights[i]) * k).epsilon(1e-12));
  }
  CHECK(g.norm() == TargetNorm::kMax);
  CHECK(h.norm() == TargetNorm::kEuclidean);
  // |H(p)|^2 is a Riemann sum for scale^2 K(p, 2t; p).
  CHECK(hv.squaredNorm() == doctest::Approx(h.scale() * h.scale() * ev.kernel(p, 2.0 * t, p)).epsilon(0.02));
}

TEST_CASE_FIXTURE(CircleSetup, "eigenmap drops the constant mode") {
  const EmbeddingMap f = make_eigenmap(ev, 0.1);
  CHECK(f.dimension() == 200);
  const Point p = manifold.sample(5);
  const Eigen::VectorXd v = f.evaluate(p);
  const Eigen::VectorXd phi = spectrum.values(p, 201);
  for (int k = 1; k <= 200; k += 37) {
    CHECK(v[k - 1] == doctest::Approx(f.scale() * std::exp(-spectrum.eigenvalue(k) * 0.1) * phi[k]).scale(1.0));
  }
}

TEST_CASE_FIXTURE(CircleSetup, "Kuratowski map is 1-Lipschitz and isometric from net points") {
  const EmbeddingMap k = make_kuratowski_map(manifold, net);
  const MapImage image = image_of(k);
  const EmbeddingReport r = dilatation_report(image, manifold, 0.5);
  CHECK(r.dil_max <= 1.0 + 1e-12);
  CHECK(r.dil_min > 0.0);
  const Eigen::VectorXd a = k.evaluate(net.points[0]);
  const Eigen::VectorXd b = k.evaluate(net.points[3]);
  CHECK(k.target_distance(a, b) == doctest::Approx(manifold.distance(net.points[0], net.points[3])));
  CHECK(injectivity_margin(k, {{net.points[0], net.points[3]}}) == doctest::Approx(k.target_distance(a, b)));
}

TEST_CASE_FIXTURE(CircleSetup, "dilatation report is deterministic and its statistics are ordered") {
  const MapImage image = image_of(make_g_map(ev, net, 0.4));
  PairSampling s;
  s.max_sources = 64;
  s.seed = 11;
  EmbeddingReport a = dilatation_report(image, manifold, 0.05, s);
  EmbeddingReport b = dilatation_report(image, manifold, 0.05, s);
  injectivity_report(a, image, manifold, 0.5, s);
  injectivity_report(b, image, manifold, 0.5, s);
  CHECK(a.ratios_csv() == b.ratios_csv());
  CHECK(a.summary().str() == b.summary().str());
  CHECK(a.dil_min <= a.dil_q05);
  CHECK(a.dil_q05 <= a.dil_median);
  CHECK(a.dil_median <= a.dil_q95);
  CHECK(a.dil_q95 <= a.dil_max);
  CHECK(a.fraction_in_band(a.dil_min, a.dil_max) == doctest::Approx(1.0));
  CHECK(a.inj_margin > 0.0);
  CHECK(a.far_pairs > 0);
  CHECK_THROWS_AS(dilatation_report(image, manifold, 1e-6, s), InvalidArgument);
}

TEST_CASE("scan grid halves and the best entry minimises the band error") {
  const std::vector<double> g = scan_time_grid(0.8, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[3] == doctest::Approx(0.1));

  const ScanReport dip = synthetic_scan({0.3, 0.1, 0.02, 0.05, 0.2});
  CHECK(dip.best == 2);
  CHECK(dip.non_monotone);
  CHECK(dip.entries[2].band_error == doctest::Approx(0.02));

  const ScanReport falling = synthetic_scan({0.3, 0.2, 0.1, 0.05});
  CHECK(falling.best == 3);
  CHECK_FALSE(falling.non_monotone);
}

TEST_CASE("map kind names round-trip") {
  for (MapKind k : {MapKind::kG, MapKind::kH, MapKind::kF, MapKind::kKuratowski}) {
    CHECK(parse_map_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_map_kind("Q"), InvalidArgument);
}
