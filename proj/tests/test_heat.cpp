#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectral_embed/heat.hpp"
#include "test_oracles.hpp"

using namespace spectral_embed;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// x-derivative of the method-of-images kernel.
double images_gradient(double x, double t, double y) {
  double sum = 0.0;
  for (int m = -50; m <= 50; ++m) {
    const double d = x - y + kTwoPi * m;
    sum += -d / (2.0 * t) * std::exp(-d * d / (4.0 * t));
  }
  return sum / std::sqrt(4.0 * std::numbers::pi * t);
}

Point at(double x) { return Point{Eigen::VectorXd::Constant(1, x), -1}; }

struct CircleFixture {
  ManifoldHandle manifold = ManifoldHandle::from_analytic(AnalyticManifold::circle(kTwoPi), 1024);
  Spectrum spectrum = compute_spectrum(manifold, 401);
  HeatEvaluator ev{spectrum, 400};

  GeometryBounds bounds() const {
    GeometryBounds b = GeometryBounds::defaults(1, std::numbers::pi, kTwoPi);
    b.faber_krahn = std::numbers::pi * std::numbers::pi;
    b.trace_constant = 1.0;
    b.harmonic_radius = 1.0;
    return b;
  }
};

}  // namespace

TEST_CASE_FIXTURE(CircleFixture, "circle heat kernel matches the method of images") {
  for (double t : {0.01, 0.1, 1.0, 5.0}) {
    for (double y : {0.0, 0.3, 1.7, 3.1, 6.0}) {
      const double x = 0.4;
      CHECK(ev.kernel(at(x), t, at(y)) == doctest::Approx(oracle::circle_kernel(kTwoPi, x, t, y)).epsilon(1e-10));
      CHECK(ev.gradient(at(x), t, at(y))[0] ==
            doctest::Approx(images_gradient(x, t, y)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE_FIXTURE(CircleFixture, "heat kernel is symmetric, conserves mass and forms a semigroup") {
  const auto& sample = manifold.sample_weights();
  for (double t : {0.05, 0.3}) {
    CHECK(ev.kernel(at(0.2), t, at(2.9)) == doctest::Approx(ev.kernel(at(2.9), t, at(0.2))));
    double mass = 0.0;
    double chained = 0.0;
    for (Index i = 0; i < manifold.sample_count(); ++i) {
      const Point z = manifold.sample(i);
      mass += sample[i] * ev.kernel(at(1.0), t, z);
      chained += sample[i] * ev.kernel(at(1.0), t, z) * ev.kernel(z, 2.0 * t, at(4.0));
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chained == doctest::Approx(ev.kernel(at(1.0), 3.0 * t, at(4.0))).epsilon(1e-10));
  }
}

TEST_CASE_FIXTURE(CircleFixture, "heat trace stays below its bound") {
  for (double t : {0.01, 0.1, 1.0}) {
    const HeatTrace h = heat_trace(spectrum, t, bounds());
    double oracle = 1.0;
    for (int k = 1; k <= 200; ++k) oracle += 2.0 * std::exp(-k * k * t);
    CHECK(h.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(h.pass);
  }
}

TEST_CASE_FIXTURE(CircleFixture, "decay bounds hold and an undersized constant is caught") {
  std::vector<PointPair> pairs{{at(0.0), at(0.5)}, {at(0.0), at(1.0)}, {at(0.0), at(std::numbers::pi)}};
  const std::vector<double> times{0.01, 0.03, 0.1, 0.3, 1.0};
  const DecayReport ok = decay_check(ev, bounds(), pairs, times);
  CHECK(ok.all_pass);
  CHECK(ok.rows.size() == 15);
  for (const auto& row : ok.rows) {
    CHECK(row.floor > 0.0);
    CHECK(row.floor < 1e-12);
  }

  GeometryBounds tight = bounds();
  tight.trace_constant = 1e-3;
  CHECK_FALSE(decay_check(ev, tight, pairs, times).all_pass);

  // Gradients beyond t = 2 r_h^2 are reported but never fail.
  GeometryBounds small_rh = bounds();
  small_rh.harmonic_radius = 0.1;
  small_rh.gradient_constant = 1e-9;
  const DecayReport out = decay_check(ev, small_rh, {pairs[0]}, {0.5});
  CHECK_FALSE(out.rows[0].gradient_in_range);
  CHECK(out.rows[0].gradient_pass);
  CHECK(out.gradient_csv().find("outside_theorem_range") != std::string::npos);
}

TEST_CASE_FIXTURE(CircleFixture, "a short truncation needs the certified tail in the decay allowance") {
  const HeatEvaluator short_ev(spectrum, 100);
  const std::vector<PointPair> far{{at(0.0), at(std::numbers::pi)}};
  const double c = eigenfunction_sup_bounds(spectrum).constant();
  // e^{-2500 t} terms are dropped: K_N(0, 0.01; pi) is about 1e-12, far above the bound.
  CHECK_FALSE(decay_check(short_ev, bounds(), far, {0.01}).all_pass);
  const DecayReport with_tail = decay_check(short_ev, bounds(), far, {0.01}, c);
  CHECK(with_tail.all_pass);
  CHECK(with_tail.rows[0].floor == doctest::Approx(truncation_tail(spectrum, 100, 0.01, bounds(), c)).epsilon(1e-6));
}

TEST_CASE_FIXTURE(CircleFixture, "Varadhan extrapolation recovers squared distances") {
  const std::vector<PointPair> pairs{{at(0.0), at(0.5)}, {at(0.0), at(1.0)}, {at(0.0), at(std::numbers::pi)}};
  const VaradhanReport r =
      varadhan_check(ev, pairs, varadhan_time_grid(), bounds(), eigenfunction_sup_bounds(spectrum).constant());
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.fit_times.size() == 3);
    CHECK(row.rel_error < 0.05);
    CHECK(row.extrapolated == doctest::Approx(row.distance * row.distance).epsilon(0.05));
  }
}

TEST_CASE("Varadhan time grid is geometric and decreasing") {
  const std::vector<double> g = varadhan_time_grid(0.2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == doctest::Approx(0.2));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE_FIXTURE(CircleFixture, "continuous dilatation is close to one for small t") {
  for (double x : {0.0, 1.3, 4.4}) {
    const ContinuousDilatation cd = continuous_dilatation(ev, at(x), 0.01);
    CHECK(cd.value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cd.spectral == doctest::Approx(cd.value).epsilon(1e-8));
  }
}

TEST_CASE("point labels use vertices or joined coordinates") {
  CHECK(point_label(Point{Eigen::Vector3d(1, 0, 0), 12}) == "12");
  CHECK(point_label(Point{Eigen::Vector2d(0.5, 1.5), -1}) == "0.5:1.5");
}

TEST_CASE("heat evaluator rejects a truncation past the spectrum") {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(kTwoPi), 64);
  const Spectrum s = compute_spectrum(m, 5);
  CHECK_THROWS_AS(HeatEvaluator(s, 5), InvalidArgument);
  CHECK_NOTHROW(HeatEvaluator(s, 4));
}
