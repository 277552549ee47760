#include "spectral_embed/laplacian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

namespace spectral_embed {

OperatorPair assemble_laplacian(const TriMesh& mesh) {
  const Index nv = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 12);
  OperatorPair ops;
  for (Index f = 0; f < mesh.triangle_count(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const auto p = mesh.corners(f);
    const double area = mesh.triangle_area(f);
    double longest = 0.0;
    for (int k = 0; k < 3; ++k) {
      // Corner k sits opposite edge (i, j).
      const int i = (k + 1) % 3;
      const int j = (k + 2) % 3;
      const Eigen::Vector3d u = p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(k)];
      const Eigen::Vector3d w = p[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(k)];
      const double cot = u.dot(w) / u.cross(w).norm();
      const double weight = 0.5 * cot;
      const Index a = t[static_cast<std::size_t>(i)];
      const Index b = t[static_cast<std::size_t>(j)];
      triplets.emplace_back(a, b, -weight);
      triplets.emplace_back(b, a, -weight);
      triplets.emplace_back(a, a, weight);
      triplets.emplace_back(b, b, weight);
      longest = std::max(longest, (p[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(i)]).norm());
    }
    const double shortest_altitude = 2.0 * area / longest;
    if (longest / shortest_altitude > kAspectWarning) ops.poorly_shaped.push_back(f);
  }
  ops.stiffness.resize(nv, nv);
  ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  ops.stiffness.makeCompressed();
  ops.mass = mesh.mass();
  return ops;
}

Eigen::MatrixXd triangle_gradients(const TriMesh& mesh, Index f,
                                   const Eigen::Ref<const Eigen::MatrixXd>& fields) {
  const Triangle& t = mesh.triangle(f);
  const auto p = mesh.corners(f);
  const Eigen::Vector3d n = mesh.triangle_normal(f);
  const double twice_area = 2.0 * mesh.triangle_area(f);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(3, fields.cols());
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d e = p[static_cast<std::size_t>((k + 2) % 3)] - p[static_cast<std::size_t>((k + 1) % 3)];
    const Eigen::Vector3d g = n.cross(e) / twice_area;
    grad += g * fields.row(t[static_cast<std::size_t>(k)]);
  }
  return grad;
}

Eigen::MatrixXd vertex_gradients(const TriMesh& mesh, Index v,
                                 const Eigen::Ref<const Eigen::MatrixXd>& fields) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(3, fields.cols());
  double total = 0.0;
  for (Index f : mesh.vertex_triangles(v)) {
    const double a = mesh.triangle_area(f);
    grad += a * triangle_gradients(mesh, f, fields);
    total += a;
  }
  grad /= total;
  const Eigen::MatrixXd frame = vertex_tangent_frame(mesh, v);
  return frame * (frame.transpose() * grad);
}

Eigen::MatrixXd vertex_tangent_frame(const TriMesh& mesh, Index v) {
  Eigen::MatrixXd frame(3, 2);
  if (mesh.period()) {
    frame << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    return frame;
  }
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (Index u : mesh.neighbors(v)) {
    const Eigen::Vector3d e = mesh.edge_vector(v, u);
    scatter += e * e.transpose();
  }
  Eigen::Vector3d area_normal = Eigen::Vector3d::Zero();
  for (Index f : mesh.vertex_triangles(v)) area_normal += mesh.triangle_area(f) * mesh.triangle_normal(f);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  Eigen::Vector3d normal = eig.eigenvectors().col(0);
  if (normal.dot(area_normal) < 0.0) normal = -normal;
  Eigen::Vector3d t1 = eig.eigenvectors().col(2);
  t1 = (t1 - t1.dot(normal) * normal).normalized();
  frame.col(0) = t1;
  frame.col(1) = normal.cross(t1);
  return frame;
}

}  // namespace spectral_embed
