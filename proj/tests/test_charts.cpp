#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectral_embed/charts.hpp"
#include "spectral_embed/error.hpp"

using namespace spectral_embed;

TEST_CASE("Euclidean kernel integrates to one and solves the heat equation") {
  const double t = 0.3;
  double mass = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) mass += 0.01 * gamma_E(x, t, 0.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  double mass2 = 0.0;
  for (double x = -6.0; x <= 6.0; x += 0.05) {
    for (double y = -6.0; y <= 6.0; y += 0.05) mass2 += 0.0025 * gamma_E(Eigen::Vector2d(x, y), t, Eigen::Vector2d(0.2, -0.1));
  }
  CHECK(mass2 == doctest::Approx(1.0).epsilon(1e-8));

  const double x = 0.7;
  const double h = 1e-4;
  const double ut = (gamma_E(x, t + h, 0.0) - gamma_E(x, t - h, 0.0)) / (2.0 * h);
  const double uxx = (gamma_E(x + h, t, 0.0) - 2.0 * gamma_E(x, t, 0.0) + gamma_E(x - h, t, 0.0)) / (h * h);
  CHECK(ut == doctest::Approx(uxx).epsilon(1e-5));
}

TEST_CASE("frozen kernel reduces to a rescaled Euclidean kernel for constant coefficients") {
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const ChartSpec id = identity_chart(1);
  const ChartSpec c2 = constant_chart(1, 2.0);
  CHECK(c2.Q == doctest::Approx(2.0));
  for (double x : {0.0, 0.4, 1.5}) {
    const Eigen::VectorXd xv = Eigen::VectorXd::Constant(1, x);
    CHECK(frozen_kernel_Z(xv, 0.25, y, id) == doctest::Approx(gamma_E(x, 0.25, 0.0)));
    CHECK(frozen_kernel_Z(xv, 0.25, y, c2) == doctest::Approx(gamma_E(x, 0.5, 0.0)));
  }
  ChartSpec singular = identity_chart(1);
  singular.a = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  CHECK_THROWS_AS(frozen_kernel_Z(y, 0.25, y, singular), InvalidArgument);
}

TEST_CASE("chart validation enforces ellipticity and the Hoelder budget") {
  const Grid grid(1, 4.0, 0.05);
  const ChartSpec bump = bump_chart(1, 0.08, 1.0, 0.5, Eigen::VectorXd::Zero(1));
  const ChartValidation v = validate_chart(bump, grid);
  CHECK(v.min_eigenvalue >= 1.0 / bump.Q);
  CHECK(v.max_eigenvalue <= bump.Q);
  CHECK(v.measured_holder <= bump.Q - 1.0 + 1e-8);

  ChartSpec bad = constant_chart(1, 3.0);
  bad.Q = 2.0;
  CHECK_THROWS_AS(validate_chart(bad, grid), InvalidArgument);
}

TEST_CASE("grid indexing round-trips and marks the boundary") {
  const Grid g(2, 1.0, 0.25);
  CHECK(g.per_side() == 9);
  CHECK(g.size() == 81);
  CHECK(g.node(0).isApprox(Eigen::Vector2d(-1.0, -1.0)));
  CHECK(g.node(1).isApprox(Eigen::Vector2d(-0.75, -1.0)));
  for (Eigen::Index i = 0; i < g.size(); i += 5) CHECK(g.nearest(g.node(i)) == i);
  CHECK(g.is_boundary(0));
  CHECK_FALSE(g.is_boundary(g.nearest(Eigen::Vector2d::Zero())));
  CHECK(g.same_as(Grid(2, 1.0, 0.25)));
  CHECK_FALSE(g.same_as(Grid(2, 1.0, 0.125)));
}

TEST_CASE("finite-difference kernel conserves mass and tracks the Euclidean kernel") {
  const Grid grid(1, 8.0, 0.05);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  FdParams p;
  p.t_max = 0.5;
  p.steps = 512;
  p.record_every = 128;
  const GridKernel fd = solve_fd_kernel(identity_chart(1), grid, y, p);
  REQUIRE(fd.times.size() == 4);
  const GridKernel exact = euclidean_kernel(grid, y, fd.times);
  for (std::size_t k = 0; k < fd.times.size(); ++k) CHECK(fd.mass(k) == doctest::Approx(1.0).epsilon(1e-6));
  ClosenessRegion region;
  region.t_min = 0.1;
  const Closeness c = closeness_report(fd, exact, region);
  CHECK(c.points > 0);
  CHECK(c.value_sup < 1e-3);
  CHECK(closeness_report(fd, fd, region).value_sup == 0.0);
}

TEST_CASE("FD error decreases at second order under grid refinement") {
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  std::vector<double> errors;
  for (double h : {0.2, 0.1, 0.05}) {
    const Grid grid(1, 8.0, h);
    FdParams p;
    p.t_max = 0.25;
    p.steps = 2048;
    p.record_every = 2048;
    const GridKernel fd = solve_fd_kernel(identity_chart(1), grid, y, p);
    const GridKernel exact = euclidean_kernel(grid, y, fd.times);
    ClosenessRegion region;
    region.exclude_parabolic = false;
    errors.push_back(closeness_report(fd, exact, region).value_sup);
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("parametrix of depth zero is the frozen kernel") {
  const Grid grid(1, 4.0, 0.1);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const ChartSpec spec = bump_chart(1, 0.05, 1.0, 0.5, y);
  ParametrixParams p;
  p.depth = 0;
  const Eigen::VectorXd z = parametrix_kernel(spec, grid, y, 0.5, p);
  for (Eigen::Index i = 0; i < grid.size(); i += 9) {
    CHECK(z[i] == doctest::Approx(frozen_kernel_Z(grid.node(i), 0.5, y, spec)));
  }
}

TEST_CASE("log-log slope recovers a power law") {
  const std::vector<double> x{0.02, 0.04, 0.08, 0.16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  CHECK(log_log_slope(x, y) == doctest::Approx(1.5));
}

TEST_CASE("decay constant is zero when no node is far enough") {
  const Grid grid(1, 1.0, 0.1);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const GridKernel k = euclidean_kernel(grid, y, {1.0});
  CHECK(decay_constant(k, 1e-6) == 0.0);
  const Grid wide(1, 8.0, 0.1);
  const GridKernel w = euclidean_kernel(wide, y, {0.05});
  const double c = decay_constant(w, 1e-6);
  CHECK(c > 0.0);
  CHECK(c < 1.0);
}

TEST_CASE("the one-dimensional chart study passes with default settings") {
  ChartStudyConfig config;
  const ChartStudyResult r = run_chart_study(config);
  CHECK(r.convergence_pass);
  CHECK(r.slope_pass);
  CHECK(r.parametrix_pass);
  CHECK(r.parametrix_error < r.frozen_error);
  CHECK(r.gradient_sup_excluded < r.gradient_sup_included);
  const std::string csv = r.sweep_csv(config);
  CHECK(csv.rfind("q_minus_one,value_sup,gradient_sup\n", 0) == 0);
}
