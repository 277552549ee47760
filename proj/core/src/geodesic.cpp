#include "spectral_embed/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "spectral_embed/error.hpp"
#include "spectral_embed/report.hpp"

namespace spectral_embed {

namespace {

using QueueItem = std::pair<double, Index>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

// Vertex opposite the directed edge (a, b) in triangle t, or -1 if t does not
// contain that directed edge.
Index opposite(const Triangle& t, Index a, Index b) {
  for (int k = 0; k < 3; ++k) {
    if (t[static_cast<std::size_t>(k)] == a && t[static_cast<std::size_t>((k + 1) % 3)] == b) {
      return t[static_cast<std::size_t>((k + 2) % 3)];
    }
  }
  return -1;
}

// Unfolds the two triangles sharing edge (a, b) into the plane, c and d on
// opposite sides. Returns the planar |c - d| if segment cd crosses ab
// strictly inside, else a negative value.
double unfolded_length(const TriMesh& mesh, Index a, Index b, Index c, Index d) {
  const Eigen::Vector3d e = mesh.edge_vector(a, b);
  const double len = e.norm();
  const Eigen::Vector3d x = e / len;
  const Eigen::Vector3d vc = mesh.edge_vector(a, c);
  const Eigen::Vector3d vd = mesh.edge_vector(a, d);
  const double cx = vc.dot(x);
  const double cy = (vc - cx * x).norm();
  const double dx = vd.dot(x);
  const double dy = -(vd - dx * x).norm();
  if (cy <= 0.0 || dy >= 0.0) return -1.0;
  const double cross = cx + (dx - cx) * cy / (cy - dy);
  if (cross <= 0.0 || cross >= len) return -1.0;
  return std::hypot(cx - dx, cy - dy);
}

}  // namespace

std::string to_string(GeodesicMethod method) {
  return method == GeodesicMethod::kUnfolded ? "unfolded" : "wavefront";
}

GeodesicMethod parse_geodesic_method(const std::string& name) {
  if (name == "unfolded") return GeodesicMethod::kUnfolded;
  if (name == "wavefront") return GeodesicMethod::kWavefront;
  throw InvalidArgument("unknown geodesic method '" + name + "' (expected unfolded or wavefront)");
}

GeodesicSolver::GeodesicSolver(const TriMesh& mesh, GeodesicMethod method)
    : mesh_(&mesh), method_(method) {
  const Index nv = mesh.vertex_count();
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(nv));
  for (Index v = 0; v < nv; ++v) {
    for (Index u : mesh.neighbors(v)) adj[static_cast<std::size_t>(v)].emplace_back(u, mesh.edge_length(v, u));
  }
  if (method == GeodesicMethod::kUnfolded) {
    for (Index f = 0; f < mesh.triangle_count(); ++f) {
      const Triangle& t = mesh.triangle(f);
      for (int k = 0; k < 3; ++k) {
        const Index a = t[static_cast<std::size_t>(k)];
        const Index b = t[static_cast<std::size_t>((k + 1) % 3)];
        if (a > b) continue;  // visit each undirected edge once
        const Index c = t[static_cast<std::size_t>((k + 2) % 3)];
        Index d = -1;
        for (Index g : mesh.vertex_triangles(a)) {
          d = opposite(mesh.triangle(g), b, a);
          if (d >= 0) break;
        }
        if (d < 0 || d == c) continue;
        const double len = unfolded_length(mesh, a, b, c, d);
        if (len > 0.0) {
          adj[static_cast<std::size_t>(c)].emplace_back(d, len);
          adj[static_cast<std::size_t>(d)].emplace_back(c, len);
        }
      }
    }
  }
  offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  for (Index v = 0; v < nv; ++v) {
    auto& list = adj[static_cast<std::size_t>(v)];
    std::sort(list.begin(), list.end());
    // Keep the shortest length per target.
    list.erase(std::unique(list.begin(), list.end(),
                           [](const auto& x, const auto& y) { return x.first == y.first; }),
               list.end());
    offsets_[static_cast<std::size_t>(v) + 1] = offsets_[static_cast<std::size_t>(v)] + static_cast<Index>(list.size());
  }
  targets_.reserve(static_cast<std::size_t>(offsets_.back()));
  lengths_.reserve(static_cast<std::size_t>(offsets_.back()));
  for (const auto& list : adj) {
    for (const auto& [u, len] : list) {
      targets_.push_back(u);
      lengths_.push_back(len);
    }
  }
}

std::vector<double> GeodesicSolver::distances(Index source, double max_distance) const {
  if (source < 0 || source >= mesh_->vertex_count()) {
    throw InvalidArgument("geodesic source vertex " + std::to_string(source) + " out of range");
  }
  return method_ == GeodesicMethod::kUnfolded ? unfolded(source, max_distance)
                                              : wavefront(source, max_distance);
}

std::vector<double> GeodesicSolver::unfolded(Index source, double max_distance) const {
  const auto n = static_cast<std::size_t>(mesh_->vertex_count());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  MinQueue queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    if (d > max_distance) break;
    done[static_cast<std::size_t>(v)] = 1;
    for (Index e = offsets_[static_cast<std::size_t>(v)]; e < offsets_[static_cast<std::size_t>(v) + 1]; ++e) {
      const Index u = targets_[static_cast<std::size_t>(e)];
      const double cand = d + lengths_[static_cast<std::size_t>(e)];
      if (cand < dist[static_cast<std::size_t>(u)]) {
        dist[static_cast<std::size_t>(u)] = cand;
        queue.emplace(cand, u);
      }
    }
  }
  return dist;
}

std::vector<double> GeodesicSolver::wavefront(Index source, double max_distance) const {
  const TriMesh& mesh = *mesh_;
  const auto n = static_cast<std::size_t>(mesh.vertex_count());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  MinQueue queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);

  auto relax = [&](Index u, double cand) {
    if (cand < dist[static_cast<std::size_t>(u)]) {
      dist[static_cast<std::size_t>(u)] = cand;
      queue.emplace(cand, u);
    }
  };

  // Distance to u through triangle (v, w, u) with v, w final: place v at the
  // origin, w on the x-axis and u above it; the virtual source lies below.
  auto triangle_update = [&](Index v, Index w, Index u) -> double {
    const Eigen::Vector3d e = mesh.edge_vector(v, w);
    const double len = e.norm();
    const Eigen::Vector3d x = e / len;
    const Eigen::Vector3d vu = mesh.edge_vector(v, u);
    const double ux = vu.dot(x);
    const double uy = (vu - ux * x).norm();
    const double dv = dist[static_cast<std::size_t>(v)];
    const double dw = dist[static_cast<std::size_t>(w)];
    const double sx = (dv * dv - dw * dw + len * len) / (2.0 * len);
    const double sy2 = dv * dv - sx * sx;
    if (sy2 < 0.0 || uy <= 0.0) return std::numeric_limits<double>::infinity();
    const double sy = -std::sqrt(sy2);
    const double cross = sx + (ux - sx) * (-sy) / (uy - sy);
    if (cross < 0.0 || cross > len) return std::numeric_limits<double>::infinity();
    return std::hypot(ux - sx, uy - sy);
  };

  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    if (d > max_distance) break;
    done[static_cast<std::size_t>(v)] = 1;
    for (Index u : mesh.neighbors(v)) {
      if (!done[static_cast<std::size_t>(u)]) relax(u, d + mesh.edge_length(v, u));
    }
    for (Index f : mesh.vertex_triangles(v)) {
      const Triangle& t = mesh.triangle(f);
      Index a = -1;
      Index b = -1;
      for (Index c : t) {
        if (c == v) continue;
        (a < 0 ? a : b) = c;
      }
      if (done[static_cast<std::size_t>(a)] && !done[static_cast<std::size_t>(b)]) {
        relax(b, triangle_update(v, a, b));
      } else if (done[static_cast<std::size_t>(b)] && !done[static_cast<std::size_t>(a)]) {
        relax(a, triangle_update(v, b, a));
      }
    }
  }
  return dist;
}

std::vector<double> geodesic_distance(const TriMesh& mesh, Index source, GeodesicMethod method) {
  return GeodesicSolver(mesh, method).distances(source);
}

std::string distance_field_csv(const std::vector<double>& field) {
  CsvTable table({"vertex", "distance"});
  for (std::size_t v = 0; v < field.size(); ++v) {
    table.add_row({std::to_string(v), format_double(field[v])});
  }
  return table.str();
}

}  // namespace spectral_embed
