#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spectral_embed/mesh.hpp"

namespace spectral_embed {

enum class GeodesicMethod {
  /// Dijkstra on the edge graph plus one shortcut per interior edge: the two
  /// opposite vertices of the adjacent triangles, joined by their distance
  /// in the unfolded (planar) quad when that quad is convex.
  kUnfolded,
  /// Dijkstra ordering with a two-point triangle update that reconstructs a
  /// planar virtual source (fast-marching style). Exact on flat meshes away
  /// from the cut locus.
  kWavefront,
};

std::string to_string(GeodesicMethod method);
GeodesicMethod parse_geodesic_method(const std::string& name);

/// Precomputed search graph of a mesh; cheap to query repeatedly.
class GeodesicSolver {
 public:
  explicit GeodesicSolver(const TriMesh& mesh, GeodesicMethod method = GeodesicMethod::kUnfolded);

  GeodesicMethod method() const { return method_; }

  /// Distance from `source` to every vertex. Vertices farther than
  /// `max_distance` may be left at +infinity.
  std::vector<double> distances(Index source,
                                double max_distance = std::numeric_limits<double>::infinity()) const;

 private:
  std::vector<double> unfolded(Index source, double max_distance) const;
  std::vector<double> wavefront(Index source, double max_distance) const;

  const TriMesh* mesh_;
  GeodesicMethod method_;
  // CSR adjacency with lengths (edges plus unfolded shortcuts).
  std::vector<Index> offsets_;
  std::vector<Index> targets_;
  std::vector<double> lengths_;
};

/// Convenience wrapper: one query with a temporary solver.
std::vector<double> geodesic_distance(const TriMesh& mesh, Index source,
                                      GeodesicMethod method = GeodesicMethod::kUnfolded);

/// CSV with header `vertex,distance`.
std::string distance_field_csv(const std::vector<double>& field);

}  // namespace spectral_embed
