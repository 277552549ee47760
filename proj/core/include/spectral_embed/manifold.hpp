#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/analytic.hpp"
#include "spectral_embed/geodesic.hpp"
#include "spectral_embed/mesh.hpp"

namespace spectral_embed {

/// A point of a manifold: ambient coordinates plus, on meshes, the vertex it
/// coincides with (mesh computations are vertex based).
struct Point {
  Eigen::VectorXd coords;
  Index vertex = -1;
};

/// Uniform front for mesh and analytic manifolds.
///
/// Both backends expose a finite sample: mesh vertices with lumped masses, or
/// an analytic quadrature grid with its weights. Nets, Voronoi cells and
/// embedding reports are computed on this sample. Copies share the
/// underlying (immutable) data.
class ManifoldHandle {
 public:
  static ManifoldHandle from_mesh(TriMesh mesh, GeodesicMethod method = GeodesicMethod::kUnfolded);
  /// `resolution` is passed to AnalyticManifold::quadrature_sample.
  static ManifoldHandle from_analytic(AnalyticManifold manifold, int resolution);

  bool is_mesh() const { return static_cast<bool>(mesh_); }
  const TriMesh& mesh() const;
  const AnalyticManifold& analytic() const;
  const GeodesicSolver& geodesics() const;

  int dimension() const;
  int ambient_dimension() const;
  double volume() const;

  Index sample_count() const;
  Point sample(Index i) const;
  const Eigen::VectorXd& sample_weights() const;
  /// Typical spacing of the sample: mean edge length, or the largest grid
  /// step of the analytic quadrature.
  double resolution() const;
  /// Known or estimated diameter (mesh: twice the largest distance from vertex 0).
  double diameter() const;

  /// Geodesic distance between two points (mesh: both must carry vertices).
  double distance(const Point& a, const Point& b) const;
  /// Distances from sample `source` to every sample; entries beyond
  /// `max_distance` may be +infinity on meshes.
  std::vector<double> distances_from(Index source,
                                     double max_distance = std::numeric_limits<double>::infinity()) const;
  /// Orthonormal tangent basis at p (ambient_dimension x dimension).
  Eigen::MatrixXd tangent_frame(const Point& p) const;

 private:
  struct MeshData {
    TriMesh mesh;
    std::unique_ptr<GeodesicSolver> solver;
    double diameter = 0.0;
  };
  struct AnalyticData {
    AnalyticManifold manifold;
    AnalyticManifold::Sample sample;
    double spacing = 0.0;
  };

  std::shared_ptr<const MeshData> mesh_;
  std::shared_ptr<const AnalyticData> analytic_;
};

}  // namespace spectral_embed
