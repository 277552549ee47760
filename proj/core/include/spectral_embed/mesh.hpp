#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectral_embed {

using Index = std::int64_t;
using Triangle = std::array<Index, 3>;

/// Closed, oriented triangle mesh with lumped (barycentric) vertex masses.
///
/// A mesh may be periodic in the xy-plane: vertices then live in the
/// fundamental domain [0, a1) x [0, a2) with z = 0, and every edge vector is
/// taken with the minimum-image convention. This is how flat tori are
/// represented without an (impossible) isometric embedding in R^3.
///
/// Instances are immutable; construction validates topology and geometry.
class TriMesh {
 public:
  /// Validates and builds a mesh. Throws MeshError on open/non-manifold
  /// edges, inconsistent orientation, out-of-range indices or triangles with
  /// area below 1e-12 * (bounding-box diagonal)^2.
  static TriMesh create(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles,
                        std::optional<Eigen::Vector2d> period = std::nullopt);

  Index vertex_count() const { return static_cast<Index>(positions_.size()); }
  Index triangle_count() const { return static_cast<Index>(triangles_.size()); }

  const std::vector<Eigen::Vector3d>& positions() const { return positions_; }
  const Eigen::Vector3d& position(Index v) const { return positions_[static_cast<std::size_t>(v)]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(Index f) const { return triangles_[static_cast<std::size_t>(f)]; }
  const std::optional<Eigen::Vector2d>& period() const { return period_; }

  /// Vector from vertex a to vertex b (minimum image on periodic meshes).
  Eigen::Vector3d edge_vector(Index a, Index b) const;
  double edge_length(Index a, Index b) const { return edge_vector(a, b).norm(); }

  /// Corner positions of a triangle in one consistent local chart.
  std::array<Eigen::Vector3d, 3> corners(Index f) const;
  double triangle_area(Index f) const { return areas_[static_cast<std::size_t>(f)]; }
  const std::vector<double>& triangle_areas() const { return areas_; }

  /// Lumped mass: one third of the area of every incident triangle.
  const Eigen::VectorXd& mass() const { return mass_; }
  double total_area() const { return total_area_; }

  /// One-ring neighbours of v, ascending.
  std::span<const Index> neighbors(Index v) const;
  /// Triangles incident to v.
  std::span<const Index> vertex_triangles(Index v) const;

  double mean_edge_length() const { return mean_edge_length_; }
  double min_edge_length() const { return min_edge_length_; }
  double bounding_diagonal() const { return bounding_diagonal_; }

  /// Unit normal of a triangle (z-axis on periodic planar meshes).
  Eigen::Vector3d triangle_normal(Index f) const;

 private:
  TriMesh() = default;

  std::vector<Eigen::Vector3d> positions_;
  std::vector<Triangle> triangles_;
  std::optional<Eigen::Vector2d> period_;
  std::vector<double> areas_;
  Eigen::VectorXd mass_;
  double total_area_ = 0.0;
  std::vector<Index> neighbor_offsets_;
  std::vector<Index> neighbor_list_;
  std::vector<Index> triangle_offsets_;
  std::vector<Index> triangle_list_;
  double mean_edge_length_ = 0.0;
  double min_edge_length_ = 0.0;
  double bounding_diagonal_ = 0.0;
};

/// Reads an ASCII OFF file. Vertex order is preserved.
TriMesh load_mesh(const std::string& path);
/// Parses OFF text; `source_name` is used in error messages.
TriMesh parse_off(const std::string& text, const std::string& source_name = "<string>");
/// Writes OFF with round-trip precision.
void save_off(const TriMesh& mesh, const std::string& path);
std::string to_off_string(const TriMesh& mesh);

/// Icosahedron refined `subdivisions` times by edge midpoints, projected to the sphere.
TriMesh make_sphere(double radius, int subdivisions);

/// Regular periodic grid on the flat torus [0,a1) x [0,a2), each cell split
/// along its diagonal.
TriMesh make_flat_torus_mesh(double period_x, double period_y, int cells_x, int cells_y);

/// Regular octahedron with unit circumradius.
TriMesh make_octahedron();

}  // namespace spectral_embed
