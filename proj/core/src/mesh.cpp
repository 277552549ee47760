#include "spectral_embed/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Geometry>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

double wrap(double d, double period) {
  return d - period * std::floor(d / period + 0.5);
}

struct DirectedEdge {
  Index from;
  Index to;
  Index face;
  bool operator<(const DirectedEdge& o) const {
    const auto a = std::minmax(from, to);
    const auto b = std::minmax(o.from, o.to);
    return a < b;
  }
};

}  // namespace

Eigen::Vector3d TriMesh::edge_vector(Index a, Index b) const {
  Eigen::Vector3d d = position(b) - position(a);
  if (period_) {
    d.x() = wrap(d.x(), period_->x());
    d.y() = wrap(d.y(), period_->y());
  }
  return d;
}

std::array<Eigen::Vector3d, 3> TriMesh::corners(Index f) const {
  const Triangle& t = triangle(f);
  const Eigen::Vector3d& p0 = position(t[0]);
  return {p0, p0 + edge_vector(t[0], t[1]), p0 + edge_vector(t[0], t[2])};
}

Eigen::Vector3d TriMesh::triangle_normal(Index f) const {
  const auto c = corners(f);
  return (c[1] - c[0]).cross(c[2] - c[0]).normalized();
}

std::span<const Index> TriMesh::neighbors(Index v) const {
  const auto b = static_cast<std::size_t>(neighbor_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(neighbor_offsets_[static_cast<std::size_t>(v) + 1]);
  return {neighbor_list_.data() + b, e - b};
}

std::span<const Index> TriMesh::vertex_triangles(Index v) const {
  const auto b = static_cast<std::size_t>(triangle_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(triangle_offsets_[static_cast<std::size_t>(v) + 1]);
  return {triangle_list_.data() + b, e - b};
}

TriMesh TriMesh::create(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles,
                        std::optional<Eigen::Vector2d> period) {
  TriMesh mesh;
  const Index nv = static_cast<Index>(positions.size());
  if (nv == 0 || triangles.empty()) throw MeshError("empty mesh");
  if (period && (period->x() <= 0.0 || period->y() <= 0.0)) {
    throw MeshError("periodic mesh requires positive periods");
  }
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    for (Index v : triangles[f]) {
      if (v < 0 || v >= nv) {
        throw MeshError("parse failure: face " + std::to_string(f) + " references vertex " +
                        std::to_string(v) + " out of range [0, " + std::to_string(nv) + ")");
      }
    }
    const Triangle& t = triangles[f];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError("degenerate triangle " + std::to_string(f) + ": repeated vertex");
    }
  }
  mesh.positions_ = std::move(positions);
  mesh.triangles_ = std::move(triangles);
  mesh.period_ = period;

  if (period) {
    mesh.bounding_diagonal_ = period->norm();
  } else {
    Eigen::Vector3d lo = mesh.positions_.front();
    Eigen::Vector3d hi = lo;
    for (const auto& p : mesh.positions_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    mesh.bounding_diagonal_ = (hi - lo).norm();
  }

  // Every undirected edge must be used exactly twice, once in each direction.
  std::vector<DirectedEdge> edges;
  edges.reserve(mesh.triangles_.size() * 3);
  for (std::size_t f = 0; f < mesh.triangles_.size(); ++f) {
    const Triangle& t = mesh.triangles_[f];
    for (int k = 0; k < 3; ++k) {
      edges.push_back({t[k], t[(k + 1) % 3], static_cast<Index>(f)});
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && !(edges[i] < edges[j])) ++j;
    const std::size_t count = j - i;
    const DirectedEdge& e = edges[i];
    const std::string where = "edge (" + std::to_string(std::min(e.from, e.to)) + ", " +
                              std::to_string(std::max(e.from, e.to)) + ") of face " +
                              std::to_string(e.face);
    if (count == 1) throw MeshError("non-closed mesh: boundary " + where);
    if (count > 2) throw MeshError("non-manifold mesh: " + where + " shared by " +
                                   std::to_string(count) + " faces");
    if (edges[i].from == edges[i + 1].from) {
      throw MeshError("inconsistent orientation at " + where);
    }
    i = j;
  }

  const double area_floor = 1e-12 * mesh.bounding_diagonal_ * mesh.bounding_diagonal_;
  mesh.areas_.resize(mesh.triangles_.size());
  mesh.mass_ = Eigen::VectorXd::Zero(nv);
  for (std::size_t f = 0; f < mesh.triangles_.size(); ++f) {
    const auto c = mesh.corners(static_cast<Index>(f));
    const double area = 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
    if (!(area >= area_floor) || area == 0.0) {
      throw MeshError("degenerate triangle " + std::to_string(f) + ": area " +
                      std::to_string(area) + " below threshold");
    }
    mesh.areas_[f] = area;
    for (Index v : mesh.triangles_[f]) mesh.mass_[v] += area / 3.0;
  }
  mesh.total_area_ = 0.0;
  for (double a : mesh.areas_) mesh.total_area_ += a;

  // Adjacency in CSR form.
  std::vector<std::vector<Index>> nbr(static_cast<std::size_t>(nv));
  std::vector<std::vector<Index>> tri(static_cast<std::size_t>(nv));
  for (std::size_t f = 0; f < mesh.triangles_.size(); ++f) {
    const Triangle& t = mesh.triangles_[f];
    for (int k = 0; k < 3; ++k) {
      nbr[static_cast<std::size_t>(t[k])].push_back(t[(k + 1) % 3]);
      nbr[static_cast<std::size_t>(t[k])].push_back(t[(k + 2) % 3]);
      tri[static_cast<std::size_t>(t[k])].push_back(static_cast<Index>(f));
    }
  }
  mesh.neighbor_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  mesh.triangle_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  double edge_sum = 0.0;
  Index edge_count = 0;
  double edge_min = std::numeric_limits<double>::infinity();
  for (Index v = 0; v < nv; ++v) {
    auto& n = nbr[static_cast<std::size_t>(v)];
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    if (n.empty()) throw MeshError("isolated vertex " + std::to_string(v));
    for (Index w : n) {
      if (w > v) {
        const double len = mesh.edge_length(v, w);
        edge_sum += len;
        edge_min = std::min(edge_min, len);
        ++edge_count;
      }
    }
    mesh.neighbor_list_.insert(mesh.neighbor_list_.end(), n.begin(), n.end());
    mesh.neighbor_offsets_[static_cast<std::size_t>(v) + 1] =
        static_cast<Index>(mesh.neighbor_list_.size());
    const auto& t = tri[static_cast<std::size_t>(v)];
    mesh.triangle_list_.insert(mesh.triangle_list_.end(), t.begin(), t.end());
    mesh.triangle_offsets_[static_cast<std::size_t>(v) + 1] =
        static_cast<Index>(mesh.triangle_list_.size());
  }
  mesh.mean_edge_length_ = edge_sum / static_cast<double>(edge_count);
  mesh.min_edge_length_ = edge_min;
  return mesh;
}

TriMesh make_octahedron() {
  std::vector<Eigen::Vector3d> p = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Triangle> t = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return TriMesh::create(std::move(p), std::move(t));
}

TriMesh make_sphere(double radius, int subdivisions) {
  if (subdivisions < 0) throw InvalidArgument("make_sphere: subdivisions must be >= 0");
  if (!(radius > 0.0)) throw InvalidArgument("make_sphere: radius must be positive");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> p = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : p) v.normalize();
  std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Index id = static_cast<Index>(p.size());
      p.push_back((p[static_cast<std::size_t>(a)] + p[static_cast<std::size_t>(b)]).normalized());
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(t.size() * 4);
    for (const auto& f : t) {
      const Index a = mid(f[0], f[1]);
      const Index b = mid(f[1], f[2]);
      const Index c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    t = std::move(next);
  }
  for (auto& v : p) v *= radius;
  return TriMesh::create(std::move(p), std::move(t));
}

TriMesh make_flat_torus_mesh(double period_x, double period_y, int cells_x, int cells_y) {
  if (!(period_x > 0.0) || !(period_y > 0.0)) {
    throw InvalidArgument("make_flat_torus_mesh: periods must be positive");
  }
  if (cells_x < 3 || cells_y < 3) {
    throw InvalidArgument("make_flat_torus_mesh: need at least 3 cells per direction");
  }
  std::vector<Eigen::Vector3d> p;
  p.reserve(static_cast<std::size_t>(cells_x) * static_cast<std::size_t>(cells_y));
  const double hx = period_x / cells_x;
  const double hy = period_y / cells_y;
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) p.emplace_back(i * hx, j * hy, 0.0);
  }
  auto id = [&](int i, int j) {
    return static_cast<Index>(((j + cells_y) % cells_y) * cells_x + (i + cells_x) % cells_x);
  };
  std::vector<Triangle> t;
  t.reserve(static_cast<std::size_t>(cells_x) * static_cast<std::size_t>(cells_y) * 2);
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh::create(std::move(p), std::move(t), Eigen::Vector2d(period_x, period_y));
}

}  // namespace spectral_embed
