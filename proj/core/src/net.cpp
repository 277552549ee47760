#include <algorithm>
#include <cmath>

#include "spectral_embed/embedding.hpp"
#include "spectral_embed/error.hpp"

namespace spectral_embed {

Net build_net(const ManifoldHandle& manifold, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("net spacing delta must be positive");
  if (delta < manifold.resolution()) {
    throw InvalidArgument("net finer than discretization: delta " + format_double(delta) +
                          " is below the sample spacing " + format_double(manifold.resolution()));
  }
  Net net;
  net.delta = delta;
  std::vector<double> nearest = manifold.distances_from(0);
  net.samples.push_back(0);
  // A sample at distance exactly delta counts as uncovered (relative slack
  // 1e-9), so equispaced configurations do not stop one step early.
  const double stop = delta * (1.0 - 1e-9);
  for (;;) {
    const auto far = std::max_element(nearest.begin(), nearest.end());
    if (*far <= stop) break;
    const Index next = far - nearest.begin();
    net.samples.push_back(next);
    const std::vector<double> d = manifold.distances_from(next);
    for (std::size_t i = 0; i < nearest.size(); ++i) nearest[i] = std::min(nearest[i], d[i]);
  }
  net.covering_radius = *std::max_element(nearest.begin(), nearest.end());
  for (Index s : net.samples) net.points.push_back(manifold.sample(s));
  return net;
}

VoronoiCells voronoi_weights(const ManifoldHandle& manifold, const Net& net) {
  const Index count = manifold.sample_count();
  VoronoiCells cells;
  cells.owner.assign(static_cast<std::size_t>(count), -1);
  std::vector<double> best(static_cast<std::size_t>(count), std::numeric_limits<double>::infinity());
  for (Index i = 0; i < net.size(); ++i) {
    const std::vector<double> d = manifold.distances_from(net.samples[static_cast<std::size_t>(i)]);
    for (std::size_t s = 0; s < d.size(); ++s) {
      // Strict comparison keeps the lowest net index on ties.
      if (d[s] < best[s]) {
        best[s] = d[s];
        cells.owner[s] = i;
      }
    }
  }
  cells.weights = Eigen::VectorXd::Zero(net.size());
  const Eigen::VectorXd& w = manifold.sample_weights();
  for (Index s = 0; s < count; ++s) {
    cells.weights[cells.owner[static_cast<std::size_t>(s)]] += w[s];
    cells.max_cell_radius = std::max(cells.max_cell_radius, best[static_cast<std::size_t>(s)]);
  }
  return cells;
}

ReplicatedNet replicate_net(const Net& net, const Eigen::VectorXd& weights, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("replication weight lambda must be positive");
  if (weights.size() != net.size()) throw InvalidArgument("one weight per net point expected");
  ReplicatedNet out;
  out.lambda = lambda;
  for (Index i = 0; i < net.size(); ++i) {
    // The relative slack keeps exact multiples (up to rounding) from gaining a copy.
    const int copies = std::max(1, static_cast<int>(std::ceil(weights[i] / lambda * (1.0 - 1e-12))));
    out.counts.push_back(copies);
    for (int c = 0; c < copies; ++c) out.points.push_back(net.points[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace spectral_embed
