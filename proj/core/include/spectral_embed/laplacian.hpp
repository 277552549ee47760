#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spectral_embed/mesh.hpp"

namespace spectral_embed {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete -Laplacian as a generalized pair: S phi = lambda M phi.
struct OperatorPair {
  SparseMatrix stiffness;  // symmetric positive semidefinite, rows sum to 0
  Eigen::VectorXd mass;    // lumped (diagonal) mass, strictly positive
  /// Triangles whose aspect ratio exceeds the warning threshold.
  std::vector<Index> poorly_shaped;
};

/// Aspect ratio (longest edge / shortest altitude) above which a triangle is
/// reported in OperatorPair::poorly_shaped.
inline constexpr double kAspectWarning = 1e3;

/// Cotangent stiffness with lumped barycentric mass.
OperatorPair assemble_laplacian(const TriMesh& mesh);

/// Gradients (3 x count) of the piecewise linear interpolants of the columns
/// of `fields` on triangle f.
Eigen::MatrixXd triangle_gradients(const TriMesh& mesh, Index f,
                                   const Eigen::Ref<const Eigen::MatrixXd>& fields);

/// Area-weighted average of incident triangle gradients, projected onto the
/// tangent plane at v. `fields` has one row per vertex.
Eigen::MatrixXd vertex_gradients(const TriMesh& mesh, Index v,
                                 const Eigen::Ref<const Eigen::MatrixXd>& fields);

/// Orthonormal basis (3 x 2) of the least-squares plane through v and its
/// one-ring; the implied normal agrees with the area-weighted face normals.
Eigen::MatrixXd vertex_tangent_frame(const TriMesh& mesh, Index v);

}  // namespace spectral_embed
