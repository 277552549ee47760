#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "spectral_embed/eigensolver.hpp"
#include "spectral_embed/error.hpp"
#include "spectral_embed/laplacian.hpp"
#include "spectral_embed/spectrum.hpp"

using namespace spectral_embed;

namespace {

// Dense generalized eigenvalues of (S, diag(M)), ascending.
Eigen::VectorXd dense_eigenvalues(const OperatorPair& op) {
  const Eigen::MatrixXd s = Eigen::MatrixXd(op.stiffness);
  const Eigen::MatrixXd m = op.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, m);
  return solver.eigenvalues();
}

GeometryBounds circle_bounds() {
  GeometryBounds b = GeometryBounds::defaults(1, std::numbers::pi, 2.0 * std::numbers::pi);
  b.faber_krahn = std::numbers::pi * std::numbers::pi;
  b.trace_constant = 1.0;
  b.harmonic_radius = 1.0;
  return b;
}

}  // namespace

TEST_CASE("shift-invert Lanczos agrees with a dense generalized solver") {
  for (const TriMesh& mesh : {make_sphere(1.0, 2), make_flat_torus_mesh(1.0, 2.0, 10, 14)}) {
    const OperatorPair op = assemble_laplacian(mesh);
    const Eigen::VectorXd dense = dense_eigenvalues(op);
    const EigenResult r = solve_generalized(op.stiffness, op.mass, 24);
    REQUIRE(r.values.size() == 24);
    for (int k = 0; k < 24; ++k) CHECK(r.values[k] == doctest::Approx(dense[k]).epsilon(1e-9).scale(1.0));

    // Columns are mass-orthonormal and satisfy S phi = lambda M phi.
    const Eigen::MatrixXd gram = r.vectors.transpose() * op.mass.asDiagonal() * r.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::MatrixXd residual =
        op.stiffness * r.vectors - op.mass.asDiagonal() * r.vectors * r.values.asDiagonal();
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("eigensolver output is deterministic") {
  const OperatorPair op = assemble_laplacian(make_sphere(1.0, 2));
  const EigenResult a = solve_generalized(op.stiffness, op.mass, 16);
  const EigenResult b = solve_generalized(op.stiffness, op.mass, 16);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("analytic spectra match the closed forms") {
  const auto circle = AnalyticManifold::circle(2.0 * std::numbers::pi);
  const std::vector<double> c = circle.eigenvalues(9);
  const std::vector<double> expected{0, 1, 1, 4, 4, 9, 9, 16, 16};
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(c[k] == doctest::Approx(expected[k]));

  // Degree l appears 2l + 1 times with eigenvalue l(l + 1) / R^2.
  const auto sphere = AnalyticManifold::sphere(2.0);
  const std::vector<double> s = sphere.eigenvalues(25);
  int k = 0;
  for (int l = 0; l < 5; ++l) {
    for (int m = 0; m < 2 * l + 1; ++m, ++k) CHECK(s[static_cast<std::size_t>(k)] == doctest::Approx(l * (l + 1) / 4.0));
  }

  // Flat torus (2 pi, 0.2 pi): lambda = k1^2 + 100 k2^2.
  const auto torus = AnalyticManifold::flat_torus({2.0 * std::numbers::pi, 0.2 * std::numbers::pi});
  std::vector<double> oracle;
  for (int k1 = -20; k1 <= 20; ++k1) {
    for (int k2 = -2; k2 <= 2; ++k2) oracle.push_back(k1 * k1 + 100.0 * k2 * k2);
  }
  std::sort(oracle.begin(), oracle.end());
  const std::vector<double> t = torus.eigenvalues(40);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(oracle[i]));
}

TEST_CASE("analytic modes are orthonormal under quadrature") {
  const std::vector<AnalyticManifold> manifolds{AnalyticManifold::circle(3.0), AnalyticManifold::sphere(1.5),
                                                AnalyticManifold::flat_torus({1.0, 2.0})};
  for (const auto& m : manifolds) {
    const auto modes = m.modes(16);
    const auto sample = m.quadrature_sample(40);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(16, 16);
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
      const Eigen::VectorXd v = m.evaluate(modes, sample.points[i]);
      gram += sample.weights[static_cast<Eigen::Index>(i)] * v * v.transpose();
    }
    CHECK((gram - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("analytic gradients match central differences along the tangent frame") {
  const std::vector<AnalyticManifold> manifolds{AnalyticManifold::circle(3.0), AnalyticManifold::sphere(1.5),
                                                AnalyticManifold::flat_torus({1.0, 2.0})};
  for (const auto& m : manifolds) {
    const auto modes = m.modes(12);
    const auto sample = m.quadrature_sample(10);
    const Eigen::VectorXd x = sample.points[7];
    const Eigen::MatrixXd grad = m.gradients(modes, x);
    const Eigen::MatrixXd frame = m.tangent_frame(x);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < frame.cols(); ++j) {
      Eigen::VectorXd xp = x + h * frame.col(j);
      Eigen::VectorXd xm = x - h * frame.col(j);
      if (m.kind() == AnalyticKind::kSphere) {
        xp *= x.norm() / xp.norm();
        xm *= x.norm() / xm.norm();
      }
      const Eigen::VectorXd fd = (m.evaluate(modes, xp) - m.evaluate(modes, xm)) / (2.0 * h);
      const Eigen::VectorXd exact = frame.col(j).transpose() * grad;
      CHECK((fd - exact).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("icosphere spectrum approaches l(l+1) with the right multiplicities") {
  const ManifoldHandle m = ManifoldHandle::from_mesh(make_sphere(1.0, 3));
  const Spectrum s = compute_spectrum(m, 16);
  CHECK(std::abs(s.eigenvalue(0)) < 1e-8);
  int k = 1;
  for (int l = 1; l <= 3; ++l) {
    for (int j = 0; j < 2 * l + 1; ++j, ++k) {
      CHECK(std::abs(s.eigenvalue(k) / (l * (l + 1)) - 1.0) < 0.03);
    }
  }
}

TEST_CASE("mesh spectrum values at vertices are the eigenvector entries") {
  const ManifoldHandle m = ManifoldHandle::from_mesh(make_sphere(1.0, 2));
  const Spectrum s = compute_spectrum(m, 8);
  const Point p = m.sample(17);
  const Eigen::VectorXd v = s.values(p, 8);
  for (int k = 0; k < 8; ++k) CHECK(v[k] == doctest::Approx(s.vectors()(17, k)));
  CHECK(s.sample_values(8).row(17).transpose().isApprox(v));
}

TEST_CASE("circle sup-norm ratios use the exact sup norms") {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(2.0 * std::numbers::pi), 256);
  const Spectrum s = compute_spectrum(m, 21);
  const SupBoundReport r = eigenfunction_sup_bounds(s);
  REQUIRE(r.rows.size() == 20);
  for (const auto& row : r.rows) {
    CHECK(row.value_sup == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
    CHECK(row.gradient_sup == doctest::Approx(std::sqrt(row.lambda / std::numbers::pi)));
  }
  // Largest value ratio is attained by the first nonzero eigenvalue.
  CHECK(r.value_constant == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
}

TEST_CASE("eigenvalue growth bound holds on the circle and catches an injected fault") {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(2.0 * std::numbers::pi), 256);
  const Spectrum s = compute_spectrum(m, 41);
  const GeometryBounds b = circle_bounds();
  const GrowthReport ok = eigen_growth_check(s, b);
  CHECK(ok.all_pass);
  for (const auto& row : ok.rows) {
    // Independent formula: (n / 2e) a (k / (C V))^{2/n} with n = 1.
    const double bound = 1.0 / (2.0 * std::exp(1.0)) * b.faber_krahn * std::pow(row.k / b.volume, 2.0);
    CHECK(row.bound == doctest::Approx(bound));
  }
  const GrowthReport bad = eigen_growth_check(s.with_eigenvalue(40, 1e-3), b);
  CHECK_FALSE(bad.all_pass);
}

TEST_CASE("truncation index is minimal and certifies its tail") {
  const ManifoldHandle m = ManifoldHandle::from_analytic(AnalyticManifold::circle(2.0 * std::numbers::pi), 512);
  const Spectrum s = compute_spectrum(m, 201);
  const GeometryBounds b = circle_bounds();
  const double c = eigenfunction_sup_bounds(s).constant();
  for (double t : {0.1, 0.5, 2.0}) {
    for (double eps : {1e-3, 1e-6, 1e-9}) {
      const TruncationResult r = truncation_index(s, t, eps, b, c);
      CHECK(r.tail < eps);
      CHECK(r.tail == doctest::Approx(truncation_tail(s, r.n0, t, b, c)));
      if (r.n0 > 0) CHECK(truncation_tail(s, r.n0 - 1, t, b, c) >= eps);
    }
  }
  // Smaller eps never needs fewer terms.
  int previous = 0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
    const int n0 = truncation_index(s, 0.5, eps, b, c).n0;
    CHECK(n0 >= previous);
    previous = n0;
  }
  CHECK_THROWS_AS(truncation_index(s, 1e-4, 1e-12, b, c), TruncationError);
}
