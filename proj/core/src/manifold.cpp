#include "spectral_embed/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "spectral_embed/error.hpp"
#include "spectral_embed/laplacian.hpp"

namespace spectral_embed {

ManifoldHandle ManifoldHandle::from_mesh(TriMesh mesh, GeodesicMethod method) {
  auto data = std::make_shared<MeshData>(MeshData{std::move(mesh), nullptr, 0.0});
  data->solver = std::make_unique<GeodesicSolver>(data->mesh, method);
  if (data->mesh.period()) {
    data->diameter = 0.5 * data->mesh.period()->norm();
  } else {
    const auto d = data->solver->distances(0);
    data->diameter = *std::max_element(d.begin(), d.end());
    // Farthest vertex from vertex 0 gives a second sweep for a tighter estimate.
    const auto far = std::max_element(d.begin(), d.end()) - d.begin();
    const auto d2 = data->solver->distances(static_cast<Index>(far));
    data->diameter = std::max(data->diameter, *std::max_element(d2.begin(), d2.end()));
  }
  ManifoldHandle h;
  h.mesh_ = std::move(data);
  return h;
}

ManifoldHandle ManifoldHandle::from_analytic(AnalyticManifold manifold, int resolution) {
  auto sample = manifold.quadrature_sample(resolution);
  double spacing = 0.0;
  if (manifold.kind() == AnalyticKind::kSphere) {
    spacing = std::acos(-1.0) * manifold.params()[0] / resolution;
  } else {
    const double amax = *std::max_element(manifold.params().begin(), manifold.params().end());
    spacing = amax / resolution;
  }
  ManifoldHandle h;
  h.analytic_ = std::make_shared<AnalyticData>(AnalyticData{std::move(manifold), std::move(sample), spacing});
  return h;
}

const TriMesh& ManifoldHandle::mesh() const {
  if (!mesh_) throw InvalidArgument("manifold is not a mesh");
  return mesh_->mesh;
}

const AnalyticManifold& ManifoldHandle::analytic() const {
  if (!analytic_) throw InvalidArgument("manifold is not analytic");
  return analytic_->manifold;
}

const GeodesicSolver& ManifoldHandle::geodesics() const {
  if (!mesh_) throw InvalidArgument("manifold is not a mesh");
  return *mesh_->solver;
}

int ManifoldHandle::dimension() const { return mesh_ ? 2 : analytic_->manifold.dimension(); }

int ManifoldHandle::ambient_dimension() const {
  return mesh_ ? 3 : analytic_->manifold.ambient_dimension();
}

double ManifoldHandle::volume() const {
  return mesh_ ? mesh_->mesh.total_area() : analytic_->manifold.volume();
}

Index ManifoldHandle::sample_count() const {
  return mesh_ ? mesh_->mesh.vertex_count() : static_cast<Index>(analytic_->sample.points.size());
}

Point ManifoldHandle::sample(Index i) const {
  if (i < 0 || i >= sample_count()) {
    throw InvalidArgument("sample index " + std::to_string(i) + " out of range");
  }
  if (mesh_) return Point{mesh_->mesh.position(i), i};
  return Point{analytic_->sample.points[static_cast<std::size_t>(i)], -1};
}

const Eigen::VectorXd& ManifoldHandle::sample_weights() const {
  return mesh_ ? mesh_->mesh.mass() : analytic_->sample.weights;
}

double ManifoldHandle::resolution() const {
  return mesh_ ? mesh_->mesh.mean_edge_length() : analytic_->spacing;
}

double ManifoldHandle::diameter() const {
  return mesh_ ? mesh_->diameter : analytic_->manifold.diameter();
}

double ManifoldHandle::distance(const Point& a, const Point& b) const {
  if (!mesh_) return analytic_->manifold.distance(a.coords, b.coords);
  if (a.vertex < 0 || b.vertex < 0) throw InvalidArgument("mesh distance needs vertex points");
  if (a.vertex == b.vertex) return 0.0;
  return mesh_->solver->distances(a.vertex)[static_cast<std::size_t>(b.vertex)];
}

std::vector<double> ManifoldHandle::distances_from(Index source, double max_distance) const {
  if (mesh_) return mesh_->solver->distances(source, max_distance);
  const auto& pts = analytic_->sample.points;
  if (source < 0 || source >= static_cast<Index>(pts.size())) {
    throw InvalidArgument("sample index " + std::to_string(source) + " out of range");
  }
  std::vector<double> out(pts.size());
  const Eigen::VectorXd& s = pts[static_cast<std::size_t>(source)];
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = analytic_->manifold.distance(s, pts[i]);
  return out;
}

Eigen::MatrixXd ManifoldHandle::tangent_frame(const Point& p) const {
  if (!mesh_) return analytic_->manifold.tangent_frame(p.coords);
  if (p.vertex < 0) throw InvalidArgument("mesh tangent frame needs a vertex point");
  return vertex_tangent_frame(mesh_->mesh, p.vertex);
}

}  // namespace spectral_embed
