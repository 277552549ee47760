#include "spectral_embed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spectral_embed/error.hpp"
#include "spectral_embed/parallel.hpp"

namespace spectral_embed {

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::kG: return "G";
    case MapKind::kH: return "H";
    case MapKind::kF: return "F";
    case MapKind::kKuratowski: return "kuratowski";
  }
  return "unknown";
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "G" || name == "g") return MapKind::kG;
  if (name == "H" || name == "h") return MapKind::kH;
  if (name == "F" || name == "f") return MapKind::kF;
  if (name == "kuratowski" || name == "K") return MapKind::kKuratowski;
  throw InvalidArgument("unknown map kind '" + name + "' (expected G, H, F or kuratowski)");
}

std::string to_string(TargetNorm norm) { return norm == TargetNorm::kMax ? "max" : "euclidean"; }

double map_scale(MapKind kind, int n, double t) {
  constexpr double pi = std::numbers::pi;
  if (kind == MapKind::kKuratowski) return 1.0;
  if (!(t > 0.0)) throw InvalidArgument("map time t must be positive");
  if (kind == MapKind::kG) {
    return std::pow(2.0 * t, (n + 1) / 2.0) * std::pow(2.0 * pi, n / 2.0) * std::exp(0.5);
  }
  return std::pow(2.0 * t, (n + 2) / 4.0) * std::sqrt(2.0) * std::pow(4.0 * pi, n / 4.0);
}

Index EmbeddingMap::dimension() const {
  return kind_ == MapKind::kKuratowski ? static_cast<Index>(points_.size()) : coefficients_.cols();
}

Eigen::VectorXd EmbeddingMap::evaluate(const Point& p) const {
  if (kind_ == MapKind::kKuratowski) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i) out[static_cast<Eigen::Index>(i)] = manifold_.distance(p, points_[i]);
    return out;
  }
  return coefficients_.transpose() * spectrum_->values(p, truncation_ + 1);
}

Eigen::MatrixXd EmbeddingMap::evaluate_samples(const std::vector<Index>& samples) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), dimension());
  if (kind_ == MapKind::kKuratowski) {
    for (std::size_t i = 0; i < point_samples_.size(); ++i) {
      const std::vector<double> d = manifold_.distances_from(point_samples_[i]);
      for (std::size_t r = 0; r < samples.size(); ++r) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = d[static_cast<std::size_t>(samples[r])];
      }
    }
    return out;
  }
  const Eigen::MatrixXd values = spectrum_->sample_values(truncation_ + 1);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = values.row(samples[r]) * coefficients_;
  }
  return out;
}

double EmbeddingMap::target_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return norm_ == TargetNorm::kMax ? (a - b).cwiseAbs().maxCoeff() : (a - b).norm();
}

namespace {

// (N+1) x m matrix with entries weight_i e^{-lambda_k t} phi_k(q_i).
Eigen::MatrixXd kernel_coefficients(const HeatEvaluator& ev, const std::vector<Point>& points,
                                    const Eigen::VectorXd& weights, double t) {
  const Eigen::VectorXd decay = ev.decay(t);
  Eigen::MatrixXd c(ev.terms(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    c.col(static_cast<Eigen::Index>(i)) = weights[static_cast<Eigen::Index>(i)] * decay.cwiseProduct(ev.values(points[i]));
  }
  return c;
}

}  // namespace

EmbeddingMap make_g_map(const HeatEvaluator& ev, const Net& net, double t) {
  EmbeddingMap m;
  m.kind_ = MapKind::kG;
  m.norm_ = TargetNorm::kMax;
  m.t_ = t;
  m.truncation_ = ev.truncation();
  m.scale_ = map_scale(MapKind::kG, ev.manifold().dimension(), t);
  m.manifold_ = ev.manifold();
  m.spectrum_ = ev.spectrum();
  m.points_ = net.points;
  m.point_samples_ = net.samples;
  m.coefficients_ = m.scale_ * kernel_coefficients(ev, net.points, Eigen::VectorXd::Ones(net.size()), t);
  return m;
}

EmbeddingMap make_h_map(const HeatEvaluator& ev, const Net& net, const VoronoiCells& cells, double t) {
  if (cells.weights.size() != net.size()) throw InvalidArgument("one Voronoi weight per net point expected");
  EmbeddingMap m;
  m.kind_ = MapKind::kH;
  m.norm_ = TargetNorm::kEuclidean;
  m.t_ = t;
  m.truncation_ = ev.truncation();
  m.scale_ = map_scale(MapKind::kH, ev.manifold().dimension(), t);
  m.manifold_ = ev.manifold();
  m.spectrum_ = ev.spectrum();
  m.points_ = net.points;
  m.point_samples_ = net.samples;
  m.coefficients_ = m.scale_ * kernel_coefficients(ev, net.points, cells.weights.cwiseSqrt(), t);
  return m;
}

EmbeddingMap make_replicated_h_map(const HeatEvaluator& ev, const ReplicatedNet& net, double t) {
  EmbeddingMap m;
  m.kind_ = MapKind::kH;
  m.norm_ = TargetNorm::kEuclidean;
  m.t_ = t;
  m.truncation_ = ev.truncation();
  m.scale_ = map_scale(MapKind::kH, ev.manifold().dimension(), t);
  m.replicated_ = true;
  m.manifold_ = ev.manifold();
  m.spectrum_ = ev.spectrum();
  m.points_ = net.points;
  for (const auto& p : net.points) m.point_samples_.push_back(p.vertex);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(net.points.size()), std::sqrt(net.lambda));
  m.coefficients_ = m.scale_ * kernel_coefficients(ev, net.points, w, t);
  return m;
}

EmbeddingMap make_eigenmap(const HeatEvaluator& ev, double t) {
  if (ev.truncation() < 1) throw InvalidArgument("eigenmap needs at least one non-constant eigenfunction");
  EmbeddingMap m;
  m.kind_ = MapKind::kF;
  m.norm_ = TargetNorm::kEuclidean;
  m.t_ = t;
  m.truncation_ = ev.truncation();
  m.scale_ = map_scale(MapKind::kF, ev.manifold().dimension(), t);
  m.manifold_ = ev.manifold();
  m.spectrum_ = ev.spectrum();
  // Rows 1..N of a scaled diagonal; the constant eigenfunction is dropped.
  m.coefficients_ = Eigen::MatrixXd::Zero(ev.terms(), ev.truncation());
  const Eigen::VectorXd decay = ev.decay(t);
  for (int k = 1; k <= ev.truncation(); ++k) m.coefficients_(k, k - 1) = m.scale_ * decay[k];
  return m;
}

EmbeddingMap make_kuratowski_map(const ManifoldHandle& manifold, const Net& net) {
  EmbeddingMap m;
  m.kind_ = MapKind::kKuratowski;
  m.norm_ = TargetNorm::kMax;
  m.manifold_ = manifold;
  m.points_ = net.points;
  m.point_samples_ = net.samples;
  return m;
}

double MapImage::distance(Index row_a, Index row_b) const {
  const auto diff = images.row(row_a) - images.row(row_b);
  return norm == TargetNorm::kMax ? diff.cwiseAbs().maxCoeff() : diff.norm();
}

MapImage image_of(const EmbeddingMap& map) {
  MapImage image;
  const Index count = map.manifold().sample_count();
  image.samples.resize(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) image.samples[static_cast<std::size_t>(i)] = i;
  image.images = map.evaluate_samples(image.samples);
  image.norm = map.norm();
  return image;
}

std::string embedding_csv(const MapImage& image) {
  std::vector<std::string> header{"point"};
  for (Eigen::Index j = 0; j < image.images.cols(); ++j) header.push_back("coord_" + std::to_string(j + 1));
  CsvTable table(header);
  for (std::size_t r = 0; r < image.samples.size(); ++r) {
    std::vector<std::string> row{std::to_string(image.samples[r])};
    for (Eigen::Index j = 0; j < image.images.cols(); ++j) {
      row.push_back(format_double(image.images(static_cast<Eigen::Index>(r), j)));
    }
    table.add_row(std::move(row));
  }
  return table.str();
}

namespace {

// Rows of `image` indexed by sample; requires the image to cover every sample.
std::vector<Index> row_of_sample(const MapImage& image, Index sample_count) {
  std::vector<Index> rows(static_cast<std::size_t>(sample_count), -1);
  for (std::size_t r = 0; r < image.samples.size(); ++r) rows[static_cast<std::size_t>(image.samples[r])] = static_cast<Index>(r);
  return rows;
}

std::vector<Index> choose_sources(Index count, const PairSampling& sampling) {
  std::vector<Index> all(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) all[static_cast<std::size_t>(i)] = i;
  if (count <= sampling.max_sources) return all;
  // Partial Fisher-Yates on raw engine output: identical on every platform.
  std::mt19937_64 gen(sampling.seed);
  for (Index i = 0; i < sampling.max_sources; ++i) {
    const Index j = i + static_cast<Index>(gen() % static_cast<std::uint64_t>(count - i));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  all.resize(static_cast<std::size_t>(sampling.max_sources));
  std::sort(all.begin(), all.end());
  return all;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

EmbeddingReport dilatation_report(const MapImage& image, const ManifoldHandle& manifold, double h_near,
                                  const PairSampling& sampling) {
  if (!(h_near > 0.0)) throw InvalidArgument("h_near must be positive");
  const Index count = manifold.sample_count();
  const std::vector<Index> rows = row_of_sample(image, count);
  const std::vector<Index> sources = choose_sources(count, sampling);
  std::vector<std::vector<PairRatio>> per_source(sources.size());
  parallel_for(static_cast<std::int64_t>(sources.size()), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t s = begin; s < end; ++s) {
      const Index a = sources[static_cast<std::size_t>(s)];
      if (rows[static_cast<std::size_t>(a)] < 0) continue;
      const std::vector<double> d = manifold.distances_from(a, h_near);
      for (Index b = 0; b < count; ++b) {
        const double dist = d[static_cast<std::size_t>(b)];
        if (b == a || !(dist > 0.0) || dist > h_near || rows[static_cast<std::size_t>(b)] < 0) continue;
        const double diff = image.distance(rows[static_cast<std::size_t>(a)], rows[static_cast<std::size_t>(b)]);
        per_source[static_cast<std::size_t>(s)].push_back({a, b, dist, diff / dist});
      }
    }
  });
  EmbeddingReport report;
  report.h_near = h_near;
  for (auto& list : per_source) report.near.insert(report.near.end(), list.begin(), list.end());
  if (report.near.empty()) {
    throw InvalidArgument("no sample pairs within h_near = " + format_double(h_near));
  }
  std::vector<double> ratios;
  ratios.reserve(report.near.size());
  for (const auto& p : report.near) ratios.push_back(p.ratio);
  report.dil_min = *std::min_element(ratios.begin(), ratios.end());
  report.dil_max = *std::max_element(ratios.begin(), ratios.end());
  report.dil_q05 = quantile(ratios, 0.05);
  report.dil_median = quantile(ratios, 0.5);
  report.dil_q95 = quantile(ratios, 0.95);
  return report;
}

void injectivity_report(EmbeddingReport& report, const MapImage& image, const ManifoldHandle& manifold,
                        double h_far, const PairSampling& sampling) {
  if (!(h_far > 0.0)) throw InvalidArgument("h_far must be positive");
  const Index count = manifold.sample_count();
  const std::vector<Index> rows = row_of_sample(image, count);
  const std::vector<Index> sources = choose_sources(count, sampling);
  std::vector<double> margin(sources.size(), std::numeric_limits<double>::infinity());
  std::vector<Index> pairs(sources.size(), 0);
  parallel_for(static_cast<std::int64_t>(sources.size()), [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t s = begin; s < end; ++s) {
      const Index a = sources[static_cast<std::size_t>(s)];
      if (rows[static_cast<std::size_t>(a)] < 0) continue;
      const std::vector<double> d = manifold.distances_from(a);
      for (Index b = 0; b < count; ++b) {
        if (b == a || !(d[static_cast<std::size_t>(b)] >= h_far) || rows[static_cast<std::size_t>(b)] < 0) continue;
        margin[static_cast<std::size_t>(s)] = std::min(
            margin[static_cast<std::size_t>(s)],
            image.distance(rows[static_cast<std::size_t>(a)], rows[static_cast<std::size_t>(b)]));
        ++pairs[static_cast<std::size_t>(s)];
      }
    }
  });
  report.h_far = h_far;
  report.far_pairs = 0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sources.size(); ++s) {
    m = std::min(m, margin[s]);
    report.far_pairs += pairs[s];
  }
  report.inj_margin = report.far_pairs > 0 ? m : std::numeric_limits<double>::quiet_NaN();
}

double injectivity_margin(const EmbeddingMap& map, const std::vector<PointPair>& pairs) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pr : pairs) m = std::min(m, map.target_distance(map.evaluate(pr.p), map.evaluate(pr.q)));
  return m;
}

double default_h_near(const ManifoldHandle& manifold) { return 4.0 * manifold.resolution(); }
double default_h_far(const ManifoldHandle& manifold) { return manifold.diameter() / 8.0; }

double EmbeddingReport::fraction_in_band(double lo, double hi) const {
  if (near.empty()) return 0.0;
  std::size_t in = 0;
  for (const auto& p : near) in += (p.ratio >= lo && p.ratio <= hi) ? 1 : 0;
  return static_cast<double>(in) / static_cast<double>(near.size());
}

std::string EmbeddingReport::ratios_csv() const {
  CsvTable table({"a", "b", "distance", "ratio"});
  for (const auto& p : near) {
    table.add_row({std::to_string(p.a), std::to_string(p.b), format_double(p.distance), format_double(p.ratio)});
  }
  return table.str();
}

KeyValueReport EmbeddingReport::summary() const {
  KeyValueReport r;
  r.add("dil_min", dil_min);
  r.add("dil_max", dil_max);
  r.add("dil_q05", dil_q05);
  r.add("dil_median", dil_median);
  r.add("dil_q95", dil_q95);
  r.add("near_pairs", static_cast<long long>(near.size()));
  r.add("h_near", h_near);
  r.add("inj_margin", inj_margin);
  r.add("far_pairs", static_cast<long long>(far_pairs));
  r.add("h_far", h_far);
  return r;
}

std::vector<double> scan_time_grid(double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 1) throw InvalidArgument("scan grid needs t_max > 0 and steps >= 1");
  std::vector<double> grid;
  for (int j = 0; j < steps; ++j) grid.push_back(std::ldexp(t_max, -j));
  return grid;
}

ScanReport scan_times(const std::vector<double>& times, const std::function<EmbeddingReport(double)>& run) {
  ScanReport scan;
  for (double t : times) {
    const EmbeddingReport r = run(t);
    ScanEntry e;
    e.t = t;
    e.dil_min = r.dil_min;
    e.dil_max = r.dil_max;
    e.band_error = std::max(std::abs(r.dil_max - 1.0), std::abs(1.0 - r.dil_min));
    e.inj_margin = r.inj_margin;
    scan.entries.push_back(e);
  }
  for (std::size_t i = 1; i < scan.entries.size(); ++i) {
    if (scan.entries[i].band_error < scan.entries[scan.best].band_error) scan.best = i;
  }
  // Improves then degrades along the (decreasing) grid.
  bool improved = false;
  for (std::size_t i = 1; i < scan.entries.size(); ++i) {
    const double prev = scan.entries[i - 1].band_error;
    const double cur = scan.entries[i].band_error;
    if (cur < prev) improved = true;
    if (improved && cur > prev) scan.non_monotone = true;
  }
  return scan;
}

std::string ScanReport::csv() const {
  CsvTable table({"t", "dil_min", "dil_max", "band_error", "inj_margin"});
  for (const auto& e : entries) {
    table.add_row({format_double(e.t), format_double(e.dil_min), format_double(e.dil_max),
                   format_double(e.band_error), format_double(e.inj_margin)});
  }
  return table.str();
}

KeyValueReport ScanReport::summary() const {
  KeyValueReport r;
  r.add("scan_points", static_cast<int>(entries.size()));
  if (!entries.empty()) {
    r.add("scan_best_t", entries[best].t);
    r.add("scan_best_band_error", entries[best].band_error);
  }
  r.add("scan_non_monotone", non_monotone);
  return r;
}

}  // namespace spectral_embed
