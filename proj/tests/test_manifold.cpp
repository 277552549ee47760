#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "spectral_embed/error.hpp"
#include "spectral_embed/geodesic.hpp"
#include "spectral_embed/laplacian.hpp"
#include "spectral_embed/manifold.hpp"
#include "spectral_embed/mesh.hpp"

using namespace spectral_embed;

namespace {

// Minimum-image distance on the flat torus [0,a) x [0,b).
double torus_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q, double a, double b) {
  double dx = std::abs(p.x() - q.x());
  double dy = std::abs(p.y() - q.y());
  dx = std::min(dx, a - dx);
  dy = std::min(dy, b - dy);
  return std::hypot(dx, dy);
}

const char* kTetrahedron =
    "OFF\n"
    "4 4 0\n"
    "1 1 1\n"
    "1 -1 -1\n"
    "-1 1 -1\n"
    "-1 -1 1\n"
    "3 0 1 2\n"
    "3 0 3 1\n"
    "3 0 2 3\n"
    "3 1 3 2\n";

}  // namespace

TEST_CASE("icosphere has the expected counts and area") {
  for (int s = 0; s <= 4; ++s) {
    const TriMesh m = make_sphere(1.0, s);
    const Index f = 20 * (Index{1} << (2 * s));
    CHECK(m.triangle_count() == f);
    CHECK(m.vertex_count() == f / 2 + 2);
  }
  const TriMesh m = make_sphere(1.0, 4);
  CHECK(m.vertex_count() == 2562);
  CHECK(m.total_area() == doctest::Approx(4.0 * std::numbers::pi).epsilon(5e-3));
  CHECK(m.mass().sum() == doctest::Approx(m.total_area()).epsilon(1e-12));
  for (const auto& p : m.positions()) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("OFF text round-trips exactly") {
  const TriMesh a = make_sphere(2.5, 2);
  const TriMesh b = parse_off(to_off_string(a));
  REQUIRE(a.vertex_count() == b.vertex_count());
  REQUIRE(a.triangles() == b.triangles());
  for (Index v = 0; v < a.vertex_count(); ++v) CHECK(a.position(v) == b.position(v));
}

TEST_CASE("OFF parser accepts a tetrahedron and rejects malformed input") {
  const TriMesh t = parse_off(kTetrahedron);
  CHECK(t.vertex_count() == 4);
  CHECK(t.triangle_count() == 4);

  CHECK_THROWS_AS(parse_off("OFF\n4 4 0\n1 1 1\n"), MeshError);
  CHECK_THROWS_AS(parse_off("PLY\n"), MeshError);
  // Index out of range.
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"), MeshError);
  // A single triangle is an open surface.
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"), MeshError);
}

TEST_CASE("mesh validation rejects inconsistent orientation") {
  std::vector<Eigen::Vector3d> p{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<Triangle> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 2, 3}};  // last face flipped
  CHECK_THROWS_AS(TriMesh::create(p, f), MeshError);
}

TEST_CASE("cotangent Laplacian is symmetric with zero row sums") {
  const TriMesh m = make_sphere(1.0, 2);
  const OperatorPair op = assemble_laplacian(m);
  const Eigen::MatrixXd s = Eigen::MatrixXd(op.stiffness);
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(op.mass.minCoeff() > 0.0);
  CHECK(op.poorly_shaped.empty());

  // Dirichlet energy of a linear function on the torus grid vanishes only for constants.
  const TriMesh torus = make_flat_torus_mesh(1.0, 1.0, 8, 8);
  const OperatorPair tp = assemble_laplacian(torus);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(torus.vertex_count());
  CHECK((tp.stiffness * one).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wavefront geodesics are exact on the flat torus grid") {
  const double a = 1.0;
  const double b = 1.0;
  const TriMesh m = make_flat_torus_mesh(a, b, 32, 32);
  const std::vector<double> d = geodesic_distance(m, 0, GeodesicMethod::kWavefront);
  double worst = 0.0;
  for (Index v = 0; v < m.vertex_count(); ++v) {
    worst = std::max(worst, std::abs(d[static_cast<std::size_t>(v)] - torus_distance(m.position(0), m.position(v), a, b)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("unfolded geodesics bracket the true distance on the sphere") {
  const TriMesh m = make_sphere(1.0, 3);
  const std::vector<double> d = geodesic_distance(m, 0, GeodesicMethod::kUnfolded);
  const Eigen::Vector3d p0 = m.position(0);
  for (Index v = 1; v < m.vertex_count(); ++v) {
    const double exact = std::acos(std::clamp(p0.dot(m.position(v)), -1.0, 1.0));
    const double ratio = d[static_cast<std::size_t>(v)] / exact;
    CHECK(ratio > 0.99);
    CHECK(ratio < 1.1);
  }
}

TEST_CASE("geodesic distances are symmetric and satisfy the triangle inequality") {
  const TriMesh m = make_sphere(1.0, 2);
  const GeodesicSolver solver(m);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> pick(0, m.vertex_count() - 1);
  for (int i = 0; i < 20; ++i) {
    const Index x = pick(rng);
    const Index y = pick(rng);
    const Index z = pick(rng);
    const auto dx = solver.distances(x);
    const auto dy = solver.distances(y);
    CHECK(dx[static_cast<std::size_t>(y)] == doctest::Approx(dy[static_cast<std::size_t>(x)]).epsilon(1e-12));
    CHECK(dx[static_cast<std::size_t>(z)] <= dx[static_cast<std::size_t>(y)] + dy[static_cast<std::size_t>(z)] + 1e-12);
  }
}

TEST_CASE("analytic manifolds: volumes, distances, quadrature and frames") {
  const auto circle = AnalyticManifold::circle(2.0 * std::numbers::pi);
  CHECK(circle.volume() == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(circle.distance(Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Constant(1, 6.2)) ==
        doctest::Approx(2.0 * std::numbers::pi - 6.1));
  CHECK(circle.injectivity_radius() == doctest::Approx(std::numbers::pi));

  const auto sphere = AnalyticManifold::sphere(2.0);
  CHECK(sphere.volume() == doctest::Approx(16.0 * std::numbers::pi));
  CHECK(sphere.distance(Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0, 0, -2)) == doctest::Approx(2.0 * std::numbers::pi));

  const auto torus = AnalyticManifold::flat_torus({2.0, 3.0});
  CHECK(torus.volume() == doctest::Approx(6.0));
  CHECK(torus.distance(Eigen::Vector2d(0.1, 0.1), Eigen::Vector2d(1.9, 2.9)) == doctest::Approx(std::hypot(0.2, 0.2)));

  for (const auto& m : {circle, sphere, torus}) {
    const auto s = m.quadrature_sample(24);
    CHECK(s.weights.sum() == doctest::Approx(m.volume()).epsilon(1e-10));
    const Eigen::MatrixXd frame = m.tangent_frame(s.points[5]);
    CHECK((frame.transpose() * frame - Eigen::MatrixXd::Identity(m.dimension(), m.dimension())).norm() < 1e-12);
  }
  CHECK_THROWS_AS(AnalyticManifold::circle(-1.0), InvalidArgument);
  CHECK_THROWS_AS(AnalyticManifold::flat_torus({1.0, 0.0}), InvalidArgument);
}

TEST_CASE("sphere quadrature integrates low-degree polynomials exactly") {
  const auto sphere = AnalyticManifold::sphere(1.0);
  const auto s = sphere.quadrature_sample(16);
  double z2 = 0.0;
  double xy = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    z2 += s.weights[static_cast<Eigen::Index>(i)] * s.points[i][2] * s.points[i][2];
    xy += s.weights[static_cast<Eigen::Index>(i)] * s.points[i][0] * s.points[i][1];
  }
  CHECK(z2 == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-12));
  CHECK(std::abs(xy) < 1e-12);
}

TEST_CASE("manifold handle wraps meshes and analytic manifolds uniformly") {
  const ManifoldHandle mesh = ManifoldHandle::from_mesh(make_sphere(1.0, 2));
  CHECK(mesh.is_mesh());
  CHECK(mesh.dimension() == 2);
  CHECK(mesh.sample_count() == mesh.mesh().vertex_count());
  CHECK(mesh.sample_weights().sum() == doctest::Approx(mesh.volume()));
  CHECK(mesh.diameter() == doctest::Approx(std::numbers::pi).epsilon(0.1));

  const ManifoldHandle circle = ManifoldHandle::from_analytic(AnalyticManifold::circle(1.0), 100);
  CHECK_FALSE(circle.is_mesh());
  CHECK(circle.sample_count() == 100);
  CHECK(circle.resolution() == doctest::Approx(0.01));
  CHECK(circle.distance(circle.sample(0), circle.sample(50)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(circle.mesh(), InvalidArgument);
}
