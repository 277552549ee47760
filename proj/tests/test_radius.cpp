#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectral_embed/error.hpp"
#include "spectral_embed/radius.hpp"
#include "test_oracles.hpp"

using namespace spectral_embed;

TEST_CASE("segment constant at zero is a power of two") {
  for (int n = 1; n <= 8; ++n) CHECK(segment_constant(n, 0.0) == std::pow(2.0, n - 1));
  CHECK(segment_constant(3, 2.0) == doctest::Approx(4.0 * std::pow(std::cosh(1.0), 2)));
}

TEST_CASE("solid angles and model volumes") {
  CHECK(solid_angle(1) == doctest::Approx(2.0));
  CHECK(solid_angle(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(solid_angle(3) == doctest::Approx(4.0 * std::numbers::pi));
  // Small curvature recovers Euclidean balls.
  for (int n = 1; n <= 4; ++n) {
    const ModelVolumes v = model_volumes(n, 1e-6, 0.7);
    CHECK(v.ball == doctest::Approx(solid_angle(n) / n * std::pow(0.7, n)).epsilon(1e-9));
    CHECK(v.boundary == doctest::Approx(solid_angle(n) * std::pow(0.7, n - 1)).epsilon(1e-9));
  }
  // Hyperbolic plane: area 2 pi (cosh r - 1).
  CHECK(model_volumes(2, 1.0, 1.3).ball == doctest::Approx(2.0 * std::numbers::pi * (std::cosh(1.3) - 1.0)));
  CHECK(model_volume_ratio(1, 0.3, 4.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(model_volumes(2, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("Hoelder constant matches an independent implementation") {
  for (int n = 1; n <= 4; ++n) {
    for (int i = 0; i < 25; ++i) {
      const double x = 1e-4 * std::pow(5000.0, i / 24.0);
      for (double iota : {0.5, 3.0}) {
        CHECK(holder_constant_C(n, x, iota) ==
              doctest::Approx(oracle::holder_constant(n, x, iota)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("explicit and exact F agree for n = 1 and order correctly otherwise") {
  CHECK(hessian_bound_F(1, 0.3, 2.0, FForm::kExact) == 0.0);
  CHECK(hessian_bound_F(1, 0.3, 2.0, FForm::kExplicit) == 0.0);
  // r Vol(dB)/Vol(B) <= n for small balls, while the explicit form uses 2^{n-1} >= n.
  for (int n = 2; n <= 4; ++n) {
    CHECK(hessian_bound_F(n, 0.01, 1.5, FForm::kExact) <= hessian_bound_F(n, 0.01, 1.5, FForm::kExplicit));
  }
}

TEST_CASE("Abresch-Gromoll function") {
  for (double R : {0.5, 1.0, 2.0}) {
    for (double r : {0.0, 0.1, 0.4}) {
      CHECK(abresch_gromoll_L(1, 1.0, R, r) == doctest::Approx((R - r) * (R - r) / 2.0).epsilon(1e-10));
    }
  }
  CHECK(abresch_gromoll_L(3, 1.0, 1.0, 1.0) == 0.0);
  CHECK(std::isinf(abresch_gromoll_L(2, 1.0, 1.0, 0.0)));

  // Model Laplacian equals one: L'' + (n-1) Lambda coth(Lambda r) L' = 1.
  for (int n : {2, 3}) {
    const double lambda = 0.8;
    const double R = 1.5;
    const double r = 0.6;
    const double h = 1e-3;
    const double lp = abresch_gromoll_L(n, lambda, R, r + h);
    const double l0 = abresch_gromoll_L(n, lambda, R, r);
    const double lm = abresch_gromoll_L(n, lambda, R, r - h);
    const double d1 = (lp - lm) / (2.0 * h);
    const double d2 = (lp - 2.0 * l0 + lm) / (h * h);
    CHECK(d2 + (n - 1) * lambda / std::tanh(lambda * r) * d1 == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("coordinate radius bisection agrees with a grid scan") {
  for (int n = 2; n <= 3; ++n) {
    for (RadiusCondition cond : {RadiusCondition::kDistance, RadiusCondition::kHarmonicPre, RadiusCondition::kHarmonic}) {
      const double threshold = condition_threshold(n, cond);
      const CoordinateRadius cr = coordinate_radius(n, 1.0, 1.0, cond);
      CHECK(cr.binding == "inequality");
      CHECK(cr.value < threshold);
      const double scanned = oracle::scan_coordinate_radius(n, 1.0, 1.0, threshold, 1000);
      CHECK(cr.r >= scanned);
      CHECK(cr.r <= scanned * std::pow(1e8, 1.0 / 1000) * (1.0 + 1e-9));
    }
  }
  // For n = 1 the Hessian term vanishes, so the cap iota / 64 binds; a small
  // injectivity radius inflates coth(Lambda iota / 16) and the inequality binds.
  const CoordinateRadius capped = coordinate_radius(1, 1.0, 2.0, RadiusCondition::kHarmonic);
  CHECK(capped.binding == "cap");
  CHECK(capped.r == doctest::Approx(2.0 / 64.0));
  CHECK(oracle::scan_coordinate_radius(1, 1.0, 2.0, 1.0, 10) == doctest::Approx(capped.r));
  CHECK(coordinate_radius(2, 1.0, 1e-6, RadiusCondition::kHarmonic).binding == "inequality");
  // Infinite iota: the radius is still finite.
  const CoordinateRadius open = coordinate_radius(2, 1.0, std::numeric_limits<double>::infinity(), 0.25);
  CHECK(std::isfinite(open.r));
  CHECK(open.r > 0.0);
}

TEST_CASE("radius condition names and thresholds") {
  for (RadiusCondition c : {RadiusCondition::kDistance, RadiusCondition::kHarmonicPre, RadiusCondition::kHarmonic}) {
    CHECK(parse_radius_condition(to_string(c)) == c);
  }
  CHECK(condition_threshold(2, RadiusCondition::kDistance) == doctest::Approx(0.25));
  CHECK(condition_threshold(2, RadiusCondition::kHarmonicPre) == doctest::Approx(0.125));
  CHECK(condition_threshold(2, RadiusCondition::kHarmonic) == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_radius_condition("foo"), InvalidArgument);
}

TEST_CASE("constants rows are consistent with the individual functions") {
  const ConstantsRow row = constants_row(2, 1.0, 1.0, 1e-4);
  CHECK(row.C == doctest::Approx(holder_constant_C(2, 1e-4, 1.0)));
  CHECK(row.c == doctest::Approx(segment_constant(2, 3e-4)));
  CHECK(row.volume_ratio == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(row.cond_dist == (row.C * std::sqrt(1e-4) < 0.25));
  const std::string csv = constants_csv({row});
  CHECK(csv.rfind("n,Lambda,iota,r,volratio,c,F,C,cond_dist,cond_harm\n", 0) == 0);
}

TEST_CASE("coordinate experiments on a coarse flat torus") {
  const ManifoldHandle m =
      ManifoldHandle::from_mesh(make_flat_torus_mesh(1.0, 1.0, 128, 128), GeodesicMethod::kWavefront);
  CoordinateSetup setup;
  setup.iota = 0.5;
  double previous = std::numeric_limits<double>::infinity();
  for (double r : {0.1, 0.05}) {
    const DistanceCoordinates dc = distance_coordinates_experiment(m, 0, r, setup);
    CHECK(dc.ball.size() > 20);
    CHECK(dc.gram_at_base.isApprox(Eigen::Matrix2d::Identity(), 1e-2));
    const HarmonicCoordinates hc = harmonic_coordinates_experiment(m, dc);
    CHECK(hc.maximum_principle);
    CHECK(hc.maximum_principle_violations == 0);
    CHECK(hc.interior.size() + hc.boundary.size() == dc.ball.size());
    // b_i - rho_i is O(r / iota) relative to r, so it shrinks with the ball.
    CHECK(hc.sup_deviation < previous);
    previous = hc.sup_deviation;
  }

  std::vector<double> radii;
  for (int i = 1; i <= 4; ++i) radii.push_back(0.05 * i);
  CHECK(bishop_gromov_check(m, 0, 1e-3, radii).pass);
  const LaplacianDistanceCheck lc = laplacian_distance_check(m, 0, 1e-3, 0.25);
  CHECK(lc.checked > 0);
  CHECK(lc.pass);
}
