#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "spectral_embed/error.hpp"
#include "spectral_embed/laplacian.hpp"
#include "spectral_embed/radius.hpp"

namespace spectral_embed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Corner positions of f relative to its first corner.
std::array<Eigen::Vector3d, 3> local_corners(const TriMesh& mesh, Index f) {
  const Triangle& t = mesh.triangle(f);
  return {Eigen::Vector3d::Zero(), mesh.edge_vector(t[0], t[1]), mesh.edge_vector(t[0], t[2])};
}

int corner_index(const Triangle& t, Index v) {
  for (int k = 0; k < 3; ++k) {
    if (t[static_cast<std::size_t>(k)] == v) return k;
  }
  return -1;
}

// Walks a straightest geodesic from vertex `start` with initial tangent
// `direction` for `length`, unfolding across edges, and returns the corner
// nearest to the end point.
struct TraceStart {
  Index face = -1;
  Eigen::Vector3d dir;
};

// Triangle at vertex v whose corner angle contains the projected direction
// most centrally.
TraceStart start_sector(const TriMesh& mesh, Index v, const Eigen::Vector3d& direction) {
  TraceStart out;
  double best = -kInf;
  for (Index f : mesh.vertex_triangles(v)) {
    const Triangle& t = mesh.triangle(f);
    const int k = corner_index(t, v);
    const Eigen::Vector3d a = mesh.edge_vector(v, t[static_cast<std::size_t>((k + 1) % 3)]);
    const Eigen::Vector3d b = mesh.edge_vector(v, t[static_cast<std::size_t>((k + 2) % 3)]);
    const Eigen::Vector3d nrm = a.cross(b).normalized();
    const Eigen::Vector3d d = (direction - direction.dot(nrm) * nrm).normalized();
    Eigen::Matrix2d gram;
    gram << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
    const Eigen::Vector2d coef = gram.ldlt().solve(Eigen::Vector2d(a.dot(d), b.dot(d)));
    const double score = std::min(coef[0] * a.norm(), coef[1] * b.norm());
    if (score > best) {
      best = score;
      out.face = f;
      out.dir = d;
    }
  }
  if (out.face < 0) throw MeshError("vertex " + std::to_string(v) + " has no incident triangle");
  return out;
}

// Walks a straightest geodesic from vertex `start` with initial tangent
// `direction` for `length`, unfolding across edges, and returns the corner
// nearest to the end point. A path through a vertex continues from the
// sector at that vertex that contains the incoming direction.
Index trace_geodesic(const TriMesh& mesh, Index start, const Eigen::Vector3d& direction, double length) {
  TraceStart s0 = start_sector(mesh, start, direction);
  Index face = s0.face;
  Eigen::Vector3d dir = s0.dir;
  auto corners = local_corners(mesh, face);
  Eigen::Vector3d x = corners[static_cast<std::size_t>(corner_index(mesh.triangle(face), start))];
  int on_edge = -1;  // edge index of f the point currently lies on
  double remaining = length;
  const double eps = 1e-12 * std::max(1.0, length);
  for (Index guard = 0; guard < 4 * mesh.triangle_count() + 16; ++guard) {
    const Triangle& t = mesh.triangle(face);
    const Eigen::Vector3d e1 = corners[1].normalized();
    const Eigen::Vector3d e2 = (corners[2] - corners[2].dot(e1) * e1).normalized();
    auto flat = [&](const Eigen::Vector3d& v) { return Eigen::Vector2d(v.dot(e1), v.dot(e2)); };
    const Eigen::Vector2d x2 = flat(x);
    const Eigen::Vector2d d2 = flat(dir).normalized();
    // Exit edge: the forward intersection whose parameter lies in [0, 1].
    // A path running through a vertex can miss every edge by rounding; the
    // edge with the smallest overshoot is then used and the crossing clamped.
    int exit_edge = -1;
    double exit_s = kInf;
    double exit_u = 0.0;
    double overshoot = kInf;
    for (int k = 0; k < 3; ++k) {
      if (k == on_edge) continue;
      const Eigen::Vector2d a = flat(corners[static_cast<std::size_t>(k)]);
      const Eigen::Vector2d b = flat(corners[static_cast<std::size_t>((k + 1) % 3)]);
      Eigen::Matrix2d m;
      m.col(0) = d2;
      m.col(1) = a - b;
      if (std::abs(m.determinant()) < 1e-12 * (a - b).norm()) continue;
      const Eigen::Vector2d su = m.partialPivLu().solve(a - x2);
      if (!(su[0] > eps)) continue;
      const double miss = std::max({0.0, -su[1], su[1] - 1.0});
      if (miss < overshoot - 1e-12 || (miss <= overshoot + 1e-12 && su[0] < exit_s)) {
        overshoot = miss;
        exit_s = su[0];
        exit_u = std::clamp(su[1], 1e-9, 1.0 - 1e-9);
        exit_edge = k;
      }
    }
    if (overshoot > 0.05) exit_edge = -1;
    if (exit_edge < 0) throw MeshError("geodesic trace lost its triangle near vertex " + std::to_string(t[0]));
    if (exit_s >= remaining) {
      const Eigen::Vector2d end = x2 + remaining * d2;
      Index nearest = t[0];
      double nd = kInf;
      for (int k = 0; k < 3; ++k) {
        const double dist = (flat(corners[static_cast<std::size_t>(k)]) - end).norm();
        if (dist < nd) {
          nd = dist;
          nearest = t[static_cast<std::size_t>(k)];
        }
      }
      return nearest;
    }
    const Index va = t[static_cast<std::size_t>(exit_edge)];
    const Index vb = t[static_cast<std::size_t>((exit_edge + 1) % 3)];
    constexpr double kCornerTol = 1e-6;
    if (exit_u < kCornerTol || exit_u > 1.0 - kCornerTol) {
      const Index v = exit_u < kCornerTol ? va : vb;
      remaining -= exit_s;
      const TraceStart sv = start_sector(mesh, v, dir);
      face = sv.face;
      dir = sv.dir;
      corners = local_corners(mesh, face);
      x = corners[static_cast<std::size_t>(corner_index(mesh.triangle(face), v))];
      on_edge = -1;
      continue;
    }
    Index next = -1;
    for (Index g : mesh.vertex_triangles(va)) {
      if (g != face && corner_index(mesh.triangle(g), vb) >= 0) {
        next = g;
        break;
      }
    }
    if (next < 0) throw MeshError("frame point not realizable: geodesic leaves the mesh across a boundary edge");
    // Unfold: keep the components along the edge and across it.
    const Eigen::Vector3d pa = corners[static_cast<std::size_t>(exit_edge)];
    const Eigen::Vector3d pb = corners[static_cast<std::size_t>((exit_edge + 1) % 3)];
    const Eigen::Vector3d opp = corners[static_cast<std::size_t>((exit_edge + 2) % 3)];
    const Eigen::Vector3d edge = (pb - pa).normalized();
    const Eigen::Vector3d w = opp - pa;
    const Eigen::Vector3d out_normal = -(w - w.dot(edge) * edge).normalized();
    const double along = dir.dot(edge);
    const double across = dir.dot(out_normal);

    const Triangle& tn = mesh.triangle(next);
    const auto cn = local_corners(mesh, next);
    const int ia = corner_index(tn, va);
    const int ib = corner_index(tn, vb);
    const int io = 3 - ia - ib;
    const Eigen::Vector3d qa = cn[static_cast<std::size_t>(ia)];
    const Eigen::Vector3d qb = cn[static_cast<std::size_t>(ib)];
    const Eigen::Vector3d edge_n = (qb - qa).normalized();
    const Eigen::Vector3d wn = cn[static_cast<std::size_t>(io)] - qa;
    const Eigen::Vector3d in_normal = (wn - wn.dot(edge_n) * edge_n).normalized();
    dir = (along * edge_n + across * in_normal).normalized();
    x = qa + exit_u * (qb - qa);
    remaining -= exit_s;
    face = next;
    corners = cn;
    // Edge index in the new triangle: the one joining ia and ib.
    on_edge = ((ia + 1) % 3 == ib) ? ia : ib;
  }
  throw MeshError("geodesic trace did not terminate");
}

// Gradient of the linear interpolant of corner values on f.
Eigen::Vector3d face_gradient(const TriMesh& mesh, Index f, const std::array<double, 3>& values) {
  const auto p = local_corners(mesh, f);
  const Eigen::Vector3d n = mesh.triangle_normal(f);
  const double twice_area = 2.0 * mesh.triangle_area(f);
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d e = p[static_cast<std::size_t>((k + 2) % 3)] - p[static_cast<std::size_t>((k + 1) % 3)];
    g += n.cross(e) / twice_area * values[static_cast<std::size_t>(k)];
  }
  return g;
}

// Gradients (3 x fields) on f of per-vertex fields.
Eigen::MatrixXd face_gradients(const TriMesh& mesh, Index f, const std::vector<const std::vector<double>*>& fields) {
  const Triangle& t = mesh.triangle(f);
  Eigen::MatrixXd g(3, static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& v = *fields[i];
    g.col(static_cast<Eigen::Index>(i)) = face_gradient(
        mesh, f, {v[static_cast<std::size_t>(t[0])], v[static_cast<std::size_t>(t[1])], v[static_cast<std::size_t>(t[2])]});
  }
  return g;
}

// Centroid of f relative to vertex `origin` (valid for small balls).
Eigen::Vector3d centroid_from(const TriMesh& mesh, Index origin, Index f) {
  const Triangle& t = mesh.triangle(f);
  const auto c = local_corners(mesh, f);
  return mesh.edge_vector(origin, t[0]) + (c[0] + c[1] + c[2]) / 3.0;
}

struct GramField {
  std::vector<Eigen::MatrixXd> gram;  // per ball triangle
  double min = kInf;
  double max = -kInf;
};

GramField gram_field(const TriMesh& mesh, const std::vector<Index>& triangles,
                     const std::vector<const std::vector<double>*>& fields) {
  GramField out;
  for (Index f : triangles) {
    const Eigen::MatrixXd g = face_gradients(mesh, f, fields);
    Eigen::MatrixXd gram = g.transpose() * g;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    out.min = std::min(out.min, eig.eigenvalues().minCoeff());
    out.max = std::max(out.max, eig.eigenvalues().maxCoeff());
    out.gram.push_back(std::move(gram));
  }
  return out;
}

// r^alpha times the C^alpha seminorm of a per-triangle matrix field, over
// pairs at least one mean edge length apart.
double scaled_holder(const TriMesh& mesh, Index origin, const std::vector<Index>& triangles,
                     const std::vector<Eigen::MatrixXd>& field, double alpha, double r) {
  std::vector<Eigen::Vector3d> centers;
  for (Index f : triangles) centers.push_back(centroid_from(mesh, origin, f));
  const std::size_t stride = std::max<std::size_t>(1, triangles.size() / 2000);
  const double min_gap = mesh.mean_edge_length();
  double sup = 0.0;
  for (std::size_t i = 0; i < triangles.size(); i += stride) {
    for (std::size_t j = i + stride; j < triangles.size(); j += stride) {
      const double d = (centers[i] - centers[j]).norm();
      if (d < min_gap) continue;
      sup = std::max(sup, (field[i] - field[j]).cwiseAbs().maxCoeff() / std::pow(d, alpha));
    }
  }
  return std::pow(r, alpha) * sup;
}

}  // namespace

DistanceCoordinates distance_coordinates_experiment(const ManifoldHandle& manifold, Index base, double radius,
                                                    const CoordinateSetup& setup) {
  if (!manifold.is_mesh()) throw InvalidArgument("coordinate experiments need a mesh manifold");
  if (!(radius > 0.0) || !(setup.iota > 0.0)) throw InvalidArgument("coordinate experiments need r > 0 and iota > 0");
  const TriMesh& mesh = manifold.mesh();
  if (base < 0 || base >= mesh.vertex_count()) throw InvalidArgument("base vertex out of range");
  const int n = manifold.dimension();
  const double h = mesh.mean_edge_length();
  const double reach = setup.iota / 4.0;

  DistanceCoordinates out;
  out.base = base;
  out.radius = radius;
  out.base_distance = manifold.distances_from(base, std::max(reach, radius) + 4.0 * h);
  Point p;
  p.coords = mesh.position(base);
  p.vertex = base;
  const Eigen::MatrixXd frame = manifold.tangent_frame(p);
  for (int i = 0; i < n; ++i) {
    const Index q = trace_geodesic(mesh, base, frame.col(i), reach);
    const double d = out.base_distance[static_cast<std::size_t>(q)];
    if (!std::isfinite(d) || d < 3.0 * setup.iota / 16.0 - h) {
      throw MeshError("frame point not realizable: traced point at distance " + format_double(d) +
                      " instead of iota/4 = " + format_double(reach));
    }
    out.frame_points.push_back(q);
    out.frame_distances.push_back(d);
    out.rho.push_back(manifold.distances_from(q, d + radius + 4.0 * h));
  }
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (out.base_distance[static_cast<std::size_t>(v)] <= radius) out.ball.push_back(v);
  }
  std::vector<char> in_ball(static_cast<std::size_t>(mesh.vertex_count()), 0);
  for (Index v : out.ball) in_ball[static_cast<std::size_t>(v)] = 1;
  std::vector<char> seen(static_cast<std::size_t>(mesh.triangle_count()), 0);
  for (Index v : out.ball) {
    for (Index f : mesh.vertex_triangles(v)) {
      if (seen[static_cast<std::size_t>(f)]) continue;
      seen[static_cast<std::size_t>(f)] = 1;
      const Triangle& t = mesh.triangle(f);
      if (in_ball[static_cast<std::size_t>(t[0])] && in_ball[static_cast<std::size_t>(t[1])] &&
          in_ball[static_cast<std::size_t>(t[2])]) {
        out.ball_triangles.push_back(f);
      }
    }
  }
  std::sort(out.ball_triangles.begin(), out.ball_triangles.end());
  if (out.ball_triangles.empty()) {
    throw MeshError("ball radius " + format_double(radius) + " is below the mesh resolution");
  }
  std::vector<const std::vector<double>*> fields;
  for (const auto& r : out.rho) fields.push_back(&r);
  const GramField gram = gram_field(mesh, out.ball_triangles, fields);
  out.gram_min = gram.min;
  out.gram_max = gram.max;
  out.gram_at_base = Eigen::MatrixXd::Zero(n, n);
  double area = 0.0;
  for (Index f : mesh.vertex_triangles(base)) {
    const Eigen::MatrixXd g = face_gradients(mesh, f, fields);
    out.gram_at_base += mesh.triangle_area(f) * g.transpose() * g;
    area += mesh.triangle_area(f);
  }
  out.gram_at_base /= area;
  out.holder_half = scaled_holder(mesh, base, out.ball_triangles, gram.gram, 0.5, radius);
  for (double lambda : setup.lambdas) {
    out.lambdas.push_back(lambda);
    out.holder_bounds.push_back(holder_constant_C(n, lambda * radius, lambda * setup.iota) * std::sqrt(lambda));
  }
  return out;
}

KeyValueReport DistanceCoordinates::summary() const {
  KeyValueReport r;
  r.add("base", static_cast<long long>(base));
  r.add("radius", radius);
  for (std::size_t i = 0; i < frame_points.size(); ++i) {
    r.add("frame_point_" + std::to_string(i + 1), static_cast<long long>(frame_points[i]));
    r.add("frame_distance_" + std::to_string(i + 1), frame_distances[i]);
  }
  r.add("ball_vertices", static_cast<long long>(ball.size()));
  r.add("ball_triangles", static_cast<long long>(ball_triangles.size()));
  r.add("gram_min", gram_min);
  r.add("gram_max", gram_max);
  r.add("gram_base_offdiag", gram_at_base.size() > 1 ? gram_at_base(0, 1) : 0.0);
  r.add("holder_half", holder_half);
  const double seminorm = holder_half / std::sqrt(radius);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    r.add("holder_bound_" + std::to_string(i + 1), holder_bounds[i]);
    r.add("holder_slack_" + std::to_string(i + 1), holder_bounds[i] - seminorm);
  }
  return r;
}

std::string DistanceCoordinates::fields_csv() const {
  std::vector<std::string> header{"vertex"};
  for (std::size_t i = 0; i < rho.size(); ++i) header.push_back("rho_" + std::to_string(i + 1));
  CsvTable table(header);
  for (Index v : ball) {
    std::vector<std::string> row{std::to_string(v)};
    for (const auto& r : rho) row.push_back(format_double(r[static_cast<std::size_t>(v)]));
    table.add_row(std::move(row));
  }
  return table.str();
}

HarmonicCoordinates harmonic_coordinates_experiment(const ManifoldHandle& manifold, const DistanceCoordinates& coords) {
  const TriMesh& mesh = manifold.mesh();
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  std::vector<char> in_ball(nv, 0);
  for (Index v : coords.ball) in_ball[static_cast<std::size_t>(v)] = 1;
  HarmonicCoordinates out;
  std::vector<Index> unknown(nv, -1);
  for (Index v : coords.ball) {
    bool inside = true;
    for (Index u : mesh.neighbors(v)) inside = inside && in_ball[static_cast<std::size_t>(u)];
    if (inside) {
      unknown[static_cast<std::size_t>(v)] = static_cast<Index>(out.interior.size());
      out.interior.push_back(v);
    } else {
      out.boundary.push_back(v);
    }
  }
  if (out.interior.empty()) throw ConvergenceError("singular Dirichlet system: the ball has no interior vertex");

  // Cotangent weights on triangles touching the interior.
  std::vector<Index> faces;
  for (Index v : out.interior) {
    for (Index f : mesh.vertex_triangles(v)) faces.push_back(f);
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  const auto m = static_cast<Eigen::Index>(out.interior.size());
  const auto k = coords.rho.size();
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(k));
  for (Index f : faces) {
    const Triangle& t = mesh.triangle(f);
    const auto c = local_corners(mesh, f);
    for (int corner = 0; corner < 3; ++corner) {
      const Index a = t[static_cast<std::size_t>((corner + 1) % 3)];
      const Index b = t[static_cast<std::size_t>((corner + 2) % 3)];
      const Eigen::Vector3d u = c[static_cast<std::size_t>((corner + 1) % 3)] - c[static_cast<std::size_t>(corner)];
      const Eigen::Vector3d v = c[static_cast<std::size_t>((corner + 2) % 3)] - c[static_cast<std::size_t>(corner)];
      const double w = 0.5 * u.dot(v) / u.cross(v).norm();
      for (const auto& [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
        const Index row = unknown[static_cast<std::size_t>(i)];
        if (row < 0) continue;
        trips.emplace_back(row, row, w);
        const Index col = unknown[static_cast<std::size_t>(j)];
        if (col >= 0) {
          trips.emplace_back(row, col, -w);
        } else {
          for (std::size_t q = 0; q < k; ++q) rhs(row, static_cast<Eigen::Index>(q)) += w * coords.rho[q][static_cast<std::size_t>(j)];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> system(m, m);
  system.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
  if (solver.info() != Eigen::Success) throw ConvergenceError("singular Dirichlet system on the ball");
  const Eigen::MatrixXd solution = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !solution.allFinite()) {
    throw ConvergenceError("singular Dirichlet system on the ball");
  }

  const double r = coords.radius;
  std::vector<std::vector<double>> b_full(k);
  for (std::size_t q = 0; q < k; ++q) {
    const auto& rho = coords.rho[q];
    Eigen::VectorXd b = Eigen::VectorXd::Constant(mesh.vertex_count(), std::numeric_limits<double>::quiet_NaN());
    double lo = kInf;
    double hi = -kInf;
    for (Index v : out.boundary) {
      b[v] = rho[static_cast<std::size_t>(v)];
      lo = std::min(lo, b[v]);
      hi = std::max(hi, b[v]);
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(hi));
    for (Eigen::Index i = 0; i < m; ++i) {
      const Index v = out.interior[static_cast<std::size_t>(i)];
      b[v] = solution(i, static_cast<Eigen::Index>(q));
      if (b[v] < lo - tol || b[v] > hi + tol) {
        out.maximum_principle = false;
        ++out.maximum_principle_violations;
      }
    }
    for (Index v : coords.ball) {
      out.sup_deviation = std::max(out.sup_deviation, std::abs(b[v] - rho[static_cast<std::size_t>(v)]) / r);
    }
    b_full[q].assign(b.data(), b.data() + b.size());
    out.b.push_back(std::move(b));
  }

  std::vector<const std::vector<double>*> b_fields;
  std::vector<const std::vector<double>*> rho_fields;
  for (std::size_t q = 0; q < k; ++q) {
    b_fields.push_back(&b_full[q]);
    rho_fields.push_back(&coords.rho[q]);
  }
  const GramField gram = gram_field(mesh, coords.ball_triangles, b_fields);
  out.gram_min = gram.min;
  out.gram_max = gram.max;
  out.holder_half = scaled_holder(mesh, coords.base, coords.ball_triangles, gram.gram, 0.5, r);
  out.holder_09 = scaled_holder(mesh, coords.base, coords.ball_triangles, gram.gram, 0.9, r);
  for (Index f : coords.ball_triangles) {
    const Eigen::MatrixXd gr = face_gradients(mesh, f, rho_fields);
    const Eigen::MatrixXd gb = face_gradients(mesh, f, b_fields);
    // grad b_i = sum_j J_ij grad rho_j.
    const Eigen::MatrixXd jt = (gr.transpose() * gr).ldlt().solve(gr.transpose() * gb);
    const Eigen::MatrixXd dev = jt.transpose() - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    out.jacobian_deviation = std::max(out.jacobian_deviation, dev.cwiseAbs().maxCoeff());
  }
  const double widen = static_cast<double>(k) * out.jacobian_deviation;
  const double lo = coords.gram_min * std::pow(std::max(0.0, 1.0 - widen), 2);
  const double hi = coords.gram_max * std::pow(1.0 + widen, 2);
  out.consistent = out.gram_min >= lo - 1e-12 && out.gram_max <= hi + 1e-12;
  return out;
}

KeyValueReport HarmonicCoordinates::summary() const {
  KeyValueReport r;
  r.add("interior_vertices", static_cast<long long>(interior.size()));
  r.add("boundary_vertices", static_cast<long long>(boundary.size()));
  r.add("sup_deviation", sup_deviation);
  r.add("maximum_principle", maximum_principle);
  r.add("maximum_principle_violations", static_cast<long long>(maximum_principle_violations));
  r.add("gram_min", gram_min);
  r.add("gram_max", gram_max);
  r.add("holder_half", holder_half);
  r.add("holder_09", holder_09);
  r.add("jacobian_deviation", jacobian_deviation);
  r.add("consistent", consistent);
  return r;
}

std::string HarmonicCoordinates::fields_csv() const {
  std::vector<std::string> header{"vertex"};
  for (std::size_t i = 0; i < b.size(); ++i) header.push_back("b_" + std::to_string(i + 1));
  CsvTable table(header);
  std::vector<Index> ball = interior;
  ball.insert(ball.end(), boundary.begin(), boundary.end());
  std::sort(ball.begin(), ball.end());
  for (Index v : ball) {
    std::vector<std::string> row{std::to_string(v)};
    for (const auto& field : b) row.push_back(format_double(field[v]));
    table.add_row(std::move(row));
  }
  return table.str();
}

BishopGromovCheck bishop_gromov_check(const ManifoldHandle& manifold, Index base, double lambda,
                                      const std::vector<double>& radii) {
  if (!manifold.is_mesh()) throw InvalidArgument("Bishop-Gromov check needs a mesh manifold");
  if (radii.empty()) throw InvalidArgument("Bishop-Gromov check needs at least one radius");
  const TriMesh& mesh = manifold.mesh();
  const double r_max = *std::max_element(radii.begin(), radii.end());
  const std::vector<double> d = manifold.distances_from(base, r_max);
  BishopGromovCheck out;
  for (double r : radii) {
    BishopGromovRow row;
    row.r = r;
    for (std::size_t v = 0; v < d.size(); ++v) {
      if (d[v] <= r) row.volume += mesh.mass()[static_cast<Eigen::Index>(v)];
    }
    row.model = model_volumes(manifold.dimension(), lambda, r).ball;
    row.ratio = row.volume / row.model;
    if (!out.rows.empty() && row.ratio > 1.02 * out.rows.back().ratio) out.pass = false;
    out.rows.push_back(row);
  }
  return out;
}

LaplacianDistanceCheck laplacian_distance_check(const ManifoldHandle& manifold, Index source, double lambda,
                                                double max_rho, double slack) {
  if (!manifold.is_mesh()) throw InvalidArgument("Laplacian check needs a mesh manifold");
  if (!(lambda > 0.0) || !(max_rho > 0.0)) throw InvalidArgument("Laplacian check needs Lambda > 0 and max_rho > 0");
  const TriMesh& mesh = manifold.mesh();
  const double h = mesh.mean_edge_length();
  const std::vector<double> rho = manifold.distances_from(source, max_rho + 4.0 * h);
  const OperatorPair ops = assemble_laplacian(mesh);
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  Eigen::VectorXd field(mesh.vertex_count());
  for (std::size_t v = 0; v < nv; ++v) field[static_cast<Eigen::Index>(v)] = std::isfinite(rho[v]) ? rho[v] : 0.0;

  // Ridge: an edge across which the gradient direction turns by more than 90 degrees.
  std::vector<Eigen::Vector3d> grad(nv, Eigen::Vector3d::Zero());
  for (std::size_t v = 0; v < nv; ++v) {
    if (rho[v] <= max_rho + 2.0 * h) grad[v] = vertex_gradients(mesh, static_cast<Index>(v), field).col(0);
  }
  std::vector<int> hops(nv, std::numeric_limits<int>::max());
  std::deque<Index> queue;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!(rho[v] <= max_rho + 2.0 * h)) continue;
    for (Index u : mesh.neighbors(static_cast<Index>(v))) {
      if (rho[static_cast<std::size_t>(u)] <= max_rho + 2.0 * h && grad[v].dot(grad[static_cast<std::size_t>(u)]) < 0.0) {
        hops[v] = 0;
        queue.push_back(static_cast<Index>(v));
        break;
      }
    }
  }
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    if (hops[static_cast<std::size_t>(v)] >= 2) continue;
    for (Index u : mesh.neighbors(v)) {
      if (hops[static_cast<std::size_t>(u)] > hops[static_cast<std::size_t>(v)] + 1) {
        hops[static_cast<std::size_t>(u)] = hops[static_cast<std::size_t>(v)] + 1;
        queue.push_back(u);
      }
    }
  }

  const Eigen::VectorXd s_rho = ops.stiffness * field;
  const double m = manifold.dimension() - 1;
  LaplacianDistanceCheck out;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!(rho[v] <= max_rho)) continue;
    if (rho[v] < 3.0 * h || hops[v] <= 2) {
      ++out.excluded;
      continue;
    }
    const double laplacian = -s_rho[static_cast<Eigen::Index>(v)] / ops.mass[static_cast<Eigen::Index>(v)];
    const double bound = m * lambda / std::tanh(lambda * rho[v]);
    const double ratio = std::abs(laplacian) / bound;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    ++out.checked;
    if (ratio > 1.0 + slack) ++out.violations;
  }
  out.pass = out.violations == 0;
  return out;
}

}  // namespace spectral_embed
