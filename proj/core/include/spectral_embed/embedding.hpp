#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/heat.hpp"
#include "spectral_embed/manifold.hpp"
#include "spectral_embed/report.hpp"

namespace spectral_embed {

/// delta-net of sample points, built by farthest point sampling from sample 0.
struct Net {
  std::vector<Index> samples;
  std::vector<Point> points;
  double delta = 0.0;
  /// Largest distance from a sample to its nearest net point.
  double covering_radius = 0.0;
  Index size() const { return static_cast<Index>(samples.size()); }
};

/// Adds the sample farthest from the current net (lowest index on ties)
/// until every sample is within delta. Throws InvalidArgument with "net finer
/// than discretization" if delta is below the sample spacing.
Net build_net(const ManifoldHandle& manifold, double delta);

/// Partition of the sample into nearest-net-point cells (ties go to the
/// lowest net index) with cell measures |A_i|.
struct VoronoiCells {
  std::vector<Index> owner;  // per sample
  Eigen::VectorXd weights;   // per net point
  double max_cell_radius = 0.0;
};
VoronoiCells voronoi_weights(const ManifoldHandle& manifold, const Net& net);

/// Net point i repeated ceil(|A_i| / lambda) times.
struct ReplicatedNet {
  std::vector<Point> points;
  std::vector<int> counts;
  double lambda = 0.0;
};
ReplicatedNet replicate_net(const Net& net, const Eigen::VectorXd& weights, double lambda);

enum class MapKind { kG, kH, kF, kKuratowski };
enum class TargetNorm { kMax, kEuclidean };

std::string to_string(MapKind kind);
MapKind parse_map_kind(const std::string& name);
std::string to_string(TargetNorm norm);

/// Normalising constant of each map:
/// G: (2t)^{(n+1)/2} (2 pi)^{n/2} e^{1/2}; H and F: (2t)^{(n+2)/4} sqrt(2) (4 pi)^{n/4}; Kuratowski: 1.
double map_scale(MapKind kind, int n, double t);

/// A map M -> (R^m, norm). Heat-kernel maps are linear in the eigenfunction
/// values: f(p) = coefficients^T (phi_0(p), ..., phi_N(p)).
class EmbeddingMap {
 public:
  MapKind kind() const { return kind_; }
  TargetNorm norm() const { return norm_; }
  double t() const { return t_; }
  int truncation() const { return truncation_; }
  double scale() const { return scale_; }
  bool replicated() const { return replicated_; }
  Index dimension() const;
  const std::vector<Point>& points() const { return points_; }
  const ManifoldHandle& manifold() const { return manifold_; }

  Eigen::VectorXd evaluate(const Point& p) const;
  /// Images of the given samples, one row per sample.
  Eigen::MatrixXd evaluate_samples(const std::vector<Index>& samples) const;
  /// Distance in the target norm.
  double target_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  friend EmbeddingMap make_g_map(const HeatEvaluator&, const Net&, double);
  friend EmbeddingMap make_h_map(const HeatEvaluator&, const Net&, const VoronoiCells&, double);
  friend EmbeddingMap make_replicated_h_map(const HeatEvaluator&, const ReplicatedNet&, double);
  friend EmbeddingMap make_eigenmap(const HeatEvaluator&, double);
  friend EmbeddingMap make_kuratowski_map(const ManifoldHandle&, const Net&);

 private:
  MapKind kind_ = MapKind::kG;
  TargetNorm norm_ = TargetNorm::kMax;
  double t_ = 0.0;
  int truncation_ = 0;
  double scale_ = 1.0;
  bool replicated_ = false;
  ManifoldHandle manifold_;
  std::optional<Spectrum> spectrum_;
  Eigen::MatrixXd coefficients_;  // (N+1) x m for heat maps
  std::vector<Point> points_;     // net points (G, H, Kuratowski)
  std::vector<Index> point_samples_;
};

/// G(p) = scale (K_N(p,t;q_i))_i into the max norm.
EmbeddingMap make_g_map(const HeatEvaluator& ev, const Net& net, double t);
/// H(p) = scale (|A_i|^{1/2} K_N(p,t;q_i))_i into the Euclidean norm.
EmbeddingMap make_h_map(const HeatEvaluator& ev, const Net& net, const VoronoiCells& cells, double t);
/// H with uniform component weight sqrt(lambda) over the replicated points.
EmbeddingMap make_replicated_h_map(const HeatEvaluator& ev, const ReplicatedNet& net, double t);
/// F_N(p) = scale (e^{-lambda_k t} phi_k(p))_{k=1..N} into the Euclidean norm.
EmbeddingMap make_eigenmap(const HeatEvaluator& ev, double t);
/// (d(p, q_i))_i into the max norm.
EmbeddingMap make_kuratowski_map(const ManifoldHandle& manifold, const Net& net);

inline Eigen::VectorXd evaluate_map(const EmbeddingMap& map, const Point& p) { return map.evaluate(p); }

/// Sampled images of a map: row i is the image of sample samples[i].
struct MapImage {
  std::vector<Index> samples;
  Eigen::MatrixXd images;
  TargetNorm norm = TargetNorm::kEuclidean;
  double distance(Index row_a, Index row_b) const;
};
MapImage image_of(const EmbeddingMap& map);
/// CSV `point,coord_1,...,coord_m`.
std::string embedding_csv(const MapImage& image);

struct PairRatio {
  Index a = 0;
  Index b = 0;
  double distance = 0.0;
  double ratio = 0.0;
};

struct PairSampling {
  /// Sources used for pair enumeration; all samples when the sample is
  /// smaller. Chosen with `seed`.
  Index max_sources = 512;
  std::uint64_t seed = 0;
};

struct EmbeddingReport {
  std::vector<PairRatio> near;
  double h_near = 0.0;
  double h_far = 0.0;
  double dil_min = 0.0;
  double dil_max = 0.0;
  double dil_q05 = 0.0;
  double dil_median = 0.0;
  double dil_q95 = 0.0;
  double inj_margin = std::numeric_limits<double>::quiet_NaN();
  Index far_pairs = 0;
  double fraction_in_band(double lo, double hi) const;
  /// CSV `a,b,distance,ratio`.
  std::string ratios_csv() const;
  KeyValueReport summary() const;
};

/// Ratios ||f(x) - f(y)|| / d(x, y) over sample pairs with 0 < d <= h_near.
/// Throws InvalidArgument if there are no such pairs.
EmbeddingReport dilatation_report(const MapImage& image, const ManifoldHandle& manifold, double h_near,
                                  const PairSampling& sampling = {});
/// min ||f(x) - f(y)|| over sample pairs with d(x, y) >= h_far, stored in report.
void injectivity_report(EmbeddingReport& report, const MapImage& image, const ManifoldHandle& manifold,
                        double h_far, const PairSampling& sampling = {});
/// Margin over an explicit list of point pairs (e.g. fiber-separated pairs).
double injectivity_margin(const EmbeddingMap& map, const std::vector<PointPair>& pairs);

/// Default thresholds: h_near = 4 x sample spacing, h_far = diameter / 8.
double default_h_near(const ManifoldHandle& manifold);
double default_h_far(const ManifoldHandle& manifold);

/// One row of a t-scan.
struct ScanEntry {
  double t = 0.0;
  double dil_min = 0.0;
  double dil_max = 0.0;
  double band_error = 0.0;  // max(|dil_max - 1|, |1 - dil_min|)
  double inj_margin = 0.0;
};
struct ScanReport {
  std::vector<ScanEntry> entries;
  std::size_t best = 0;
  /// True when the band error along decreasing t first improves, then degrades.
  bool non_monotone = false;
  std::string csv() const;
  KeyValueReport summary() const;
};
/// Geometric grid t_max 2^{-j}, j = 0..steps-1.
std::vector<double> scan_time_grid(double t_max, int steps);
ScanReport scan_times(const std::vector<double>& times, const std::function<EmbeddingReport(double)>& run);

}  // namespace spectral_embed
