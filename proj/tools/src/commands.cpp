#include "spectral_embed_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>

#include "spectral_embed/charts.hpp"
#include "spectral_embed/embedding.hpp"
#include "spectral_embed/error.hpp"
#include "spectral_embed/heat.hpp"
#include "spectral_embed/radius.hpp"

namespace spectral_embed::cli {

namespace {

class Output {
 public:
  Output(const RunConfig& config, std::ostream& log) : dir_(config.output_dir), log_(log) {
    std::filesystem::create_directories(dir_);
    write("run_config.cfg", serialize_config(config));
  }
  void write(const std::string& name, const std::string& content) {
    write_file_atomic((dir_ / name).string(), content);
  }
  /// Writes the summary with the config lines first and echoes the result lines.
  void summary(const std::string& name, const RunConfig& config, const KeyValueReport& result) {
    KeyValueReport full = config_report(config);
    full.append(result);
    write(name, full.str());
    log_ << result.str();
  }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
};

std::vector<double> require_params(const RunConfig& c, std::size_t count, const std::string& what) {
  if (c.manifold_params.size() < count) {
    throw ConfigError("manifold.params needs " + std::to_string(count) + " value(s) for " + what);
  }
  return c.manifold_params;
}

GeodesicMethod geodesic_method(const RunConfig& c) {
  try {
    return parse_geodesic_method(c.manifold_geodesics);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("manifold.geodesics: ") + e.what());
  }
}

int truncation_of(const RunConfig& c) {
  const int n = c.embed_truncation < 0 ? c.spectrum_count - 1 : c.embed_truncation;
  if (n >= c.spectrum_count) throw ConfigError("embed.truncation must be below spectrum.count");
  return n;
}

EigensolverOptions solver_options(const ManifoldHandle& m) {
  EigensolverOptions o;
  o.dimension = m.dimension();
  return o;
}

// A base point and points at (approximately, on meshes) the requested
// distances from it.
std::vector<PointPair> pairs_at_distances(const ManifoldHandle& m, const std::vector<double>& distances) {
  std::vector<PointPair> pairs;
  if (m.is_mesh()) {
    const Point base = m.sample(0);
    const std::vector<double> d = m.distances_from(0);
    for (double target : distances) {
      Index best = 0;
      for (Index v = 1; v < static_cast<Index>(d.size()); ++v) {
        if (std::abs(d[static_cast<std::size_t>(v)] - target) < std::abs(d[static_cast<std::size_t>(best)] - target)) {
          best = v;
        }
      }
      pairs.push_back({base, m.sample(best)});
    }
    return pairs;
  }
  const AnalyticManifold& a = m.analytic();
  for (double target : distances) {
    Point p;
    Point q;
    switch (a.kind()) {
      case AnalyticKind::kCircle:
        p.coords = Eigen::VectorXd::Zero(1);
        q.coords = Eigen::VectorXd::Constant(1, target);
        break;
      case AnalyticKind::kSphere: {
        const double r = a.params()[0];
        p.coords = Eigen::Vector3d(0.0, 0.0, r);
        q.coords = Eigen::Vector3d(r * std::sin(target / r), 0.0, r * std::cos(target / r));
        break;
      }
      case AnalyticKind::kFlatTorus:
        p.coords = Eigen::VectorXd::Zero(a.dimension());
        q.coords = p.coords;
        q.coords[0] = target;
        break;
    }
    pairs.push_back({p, q});
  }
  return pairs;
}

std::vector<Index> random_samples(const ManifoldHandle& m, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, m.sample_count() - 1);
  std::vector<Index> out;
  for (int i = 0; i < count; ++i) out.push_back(pick(rng));
  return out;
}

// Map factory shared by `embed` and the isometry / injectivity checks.
struct MapBuilder {
  const RunConfig& config;
  const ManifoldHandle& manifold;
  std::optional<HeatEvaluator> ev;
  std::optional<Net> net;
  std::optional<VoronoiCells> cells;
  std::optional<ReplicatedNet> replicated;

  MapBuilder(const RunConfig& c, const ManifoldHandle& m) : config(c), manifold(m) {
    const MapKind kind = parse_map_kind(c.embed_map);
    if (kind != MapKind::kKuratowski) {
      ev.emplace(compute_spectrum(m, c.spectrum_count, solver_options(m)), truncation_of(c));
    }
    if (kind != MapKind::kF) net = build_net(m, c.embed_delta);
    if (kind == MapKind::kH) {
      cells = voronoi_weights(m, *net);
      if (c.embed_replicate_lambda > 0.0) replicated = replicate_net(*net, cells->weights, c.embed_replicate_lambda);
    }
  }

  EmbeddingMap make(double t) const {
    switch (parse_map_kind(config.embed_map)) {
      case MapKind::kG: return make_g_map(*ev, *net, t);
      case MapKind::kH:
        return replicated ? make_replicated_h_map(*ev, *replicated, t) : make_h_map(*ev, *net, *cells, t);
      case MapKind::kF: return make_eigenmap(*ev, t);
      case MapKind::kKuratowski: return make_kuratowski_map(manifold, *net);
    }
    throw InvalidArgument("unknown map kind");
  }

  PairSampling sampling() const {
    PairSampling s;
    s.max_sources = config.embed_max_sources;
    s.seed = config.seed;
    return s;
  }
  double h_near() const { return config.embed_h_near > 0.0 ? config.embed_h_near : default_h_near(manifold); }
  double h_far() const { return config.embed_h_far > 0.0 ? config.embed_h_far : default_h_far(manifold); }

  EmbeddingReport report(const MapImage& image) const {
    EmbeddingReport r = dilatation_report(image, manifold, h_near(), sampling());
    injectivity_report(r, image, manifold, h_far(), sampling());
    return r;
  }

  KeyValueReport describe(const EmbeddingMap& map) const {
    KeyValueReport r;
    r.add("map", to_string(map.kind()));
    r.add("norm", to_string(map.norm()));
    r.add("t", map.t());
    r.add("delta", config.embed_delta);
    r.add("n", map.truncation());
    r.add("n_0", net ? net->size() : Index{0});
    r.add("dimension", map.dimension());
    r.add("scale", map.scale());
    if (replicated) r.add("replicate_lambda", replicated->lambda);
    return r;
  }
};

struct EmbedOutcome {
  EmbeddingMap map;
  MapImage image;
  EmbeddingReport report;
  std::optional<ScanReport> scan;
};

// Evaluates the map at embed.t, or scans t and keeps the best entry.
EmbedOutcome embed_at_best_t(const MapBuilder& builder, const RunConfig& c) {
  double t = c.embed_t;
  std::optional<ScanReport> scan;
  if (c.embed_scan) {
    const std::vector<double> times = scan_time_grid(c.embed_t_max, c.embed_scan_steps);
    scan = scan_times(times, [&builder](double s) { return builder.report(image_of(builder.make(s))); });
    t = scan->entries[scan->best].t;
  }
  EmbeddingMap map = builder.make(t);
  MapImage image = image_of(map);
  EmbeddingReport report = builder.report(image);
  return {std::move(map), std::move(image), std::move(report), std::move(scan)};
}

int cmd_spectrum(const RunConfig& c, std::ostream& log) {
  Output out(c, log);
  const ManifoldHandle m = make_manifold(c);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  out.write("eigenvalues.csv", eigenvalues_csv(s));
  const SupBoundReport sup = eigenfunction_sup_bounds(s);
  out.write("sup_bounds.csv", sup.csv());
  for (int k = 0; k < std::min(c.spectrum_export_functions, s.count()); ++k) {
    out.write("eigenfunction_" + std::to_string(k) + ".csv", eigenfunction_csv(s, k));
  }
  KeyValueReport r;
  r.add("count", s.count());
  r.add("volume", s.volume());
  r.add("lambda_1", s.count() > 1 ? s.eigenvalue(1) : 0.0);
  r.add("lambda_max", s.eigenvalue(s.count() - 1));
  r.append(sup.summary());
  out.summary("summary.txt", c, r);
  return kExitPass;
}

int cmd_embed(const RunConfig& c, std::ostream& log) {
  Output out(c, log);
  const ManifoldHandle m = make_manifold(c);
  const MapBuilder builder(c, m);
  const EmbedOutcome e = embed_at_best_t(builder, c);
  out.write("embedding.csv", embedding_csv(e.image));
  out.write("ratios.csv", e.report.ratios_csv());
  KeyValueReport r = builder.describe(e.map);
  r.append(e.report.summary());
  if (e.scan) {
    out.write("scan.csv", e.scan->csv());
    r.append(e.scan->summary());
  }
  out.summary("summary.txt", c, r);
  return kExitPass;
}

// sup over sample pairs of |sum_{k in [first, last]} e^{-lambda_k t} phi_k(p) phi_k(q)|
// and of the p-gradient of the same sum.
struct TailSup {
  double value = 0.0;
  double gradient = 0.0;
};

class TailProbe {
 public:
  TailProbe(const Spectrum& s, const std::vector<Point>& points) : spectrum_(s) {
    const int count = s.count();
    values_.resize(static_cast<Eigen::Index>(points.size()), count);
    for (std::size_t i = 0; i < points.size(); ++i) {
      values_.row(static_cast<Eigen::Index>(i)) = s.values(points[i], count).transpose();
      gradients_.push_back(s.gradients(points[i], count));
    }
  }

  TailSup sup(double t, int first, int last) const {
    TailSup out;
    if (last < first) return out;
    const int len = last - first + 1;
    Eigen::VectorXd decay(len);
    for (int k = 0; k < len; ++k) decay[k] = std::exp(-spectrum_.eigenvalue(first + k) * t);
    const Eigen::MatrixXd v = values_.middleCols(first, len);
    const Eigen::MatrixXd weighted = v * decay.asDiagonal();
    out.value = (weighted * v.transpose()).cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < gradients_.size(); ++i) {
      const Eigen::MatrixXd g = gradients_[i].middleCols(first, len) * decay.asDiagonal() * v.transpose();
      out.gradient = std::max(out.gradient, g.colwise().norm().maxCoeff());
    }
    return out;
  }

  // Smallest N with sup |K_N - K_{count-1}| < eps on the probe points.
  int brute_force_index(double t, double eps) const {
    const int count = spectrum_.count();
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(values_.rows(), values_.rows());
    int n = count - 1;
    for (int cut = count - 2; cut >= 0; --cut) {
      const Eigen::VectorXd col = values_.col(cut + 1);
      tail.noalias() += std::exp(-spectrum_.eigenvalue(cut + 1) * t) * col * col.transpose();
      if (!(tail.cwiseAbs().maxCoeff() < eps)) break;
      n = cut;
    }
    return n;
  }

 private:
  const Spectrum& spectrum_;
  Eigen::MatrixXd values_;
  std::vector<Eigen::MatrixXd> gradients_;
};

std::vector<Point> probe_points(const ManifoldHandle& m, Index max_points) {
  const Index n = m.sample_count();
  const Index stride = std::max<Index>(1, n / max_points);
  std::vector<Point> pts;
  for (Index i = 0; i < n; i += stride) pts.push_back(m.sample(i));
  return pts;
}

int verify_truncation(const RunConfig& c, Output& out) {
  const ManifoldHandle m = make_manifold(c);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  const GeometryBounds b = make_bounds(c, m);
  const double sup_constant = eigenfunction_sup_bounds(s).constant();
  const TruncationResult tr = truncation_index(s, c.verify_t, c.verify_eps, b, sup_constant);
  const TailProbe probe(s, probe_points(m, 128));

  // sup |K_N - K_2N| and its gradient for every N from N_0 up to the spectrum.
  CsvTable table({"N", "value_sup", "gradient_sup"});
  bool tail_pass = true;
  double worst_value = 0.0;
  double worst_gradient = 0.0;
  const int n_max = (s.count() - 1) / 2;
  for (int n = tr.n0; n <= n_max; ++n) {
    const TailSup ts = probe.sup(c.verify_t, n + 1, 2 * n);
    table.add_row({std::to_string(n), format_double(ts.value), format_double(ts.gradient)});
    worst_value = std::max(worst_value, ts.value);
    worst_gradient = std::max(worst_gradient, ts.gradient);
    tail_pass = tail_pass && ts.value < c.verify_eps && ts.gradient < c.verify_eps;
  }
  out.write("truncation_tail.csv", table.str());

  // The bound never under-reports on random (t, eps).
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CsvTable pairs({"t", "eps", "bound_n", "brute_n", "pass"});
  bool never_under = true;
  int uncertified = 0;
  for (int i = 0; i < c.verify_samples; ++i) {
    const double t = 0.05 * std::pow(40.0, unit(rng));
    const double eps = 1e-8 * std::pow(1e6, unit(rng));
    const int brute = probe.brute_force_index(t, eps);
    std::string bound_text;
    bool ok = true;
    try {
      const int bound = truncation_index(s, t, eps, b, sup_constant).n0;
      bound_text = std::to_string(bound);
      ok = bound >= brute;
    } catch (const TruncationError&) {
      // More eigenpairs would be needed than computed: not an under-report.
      bound_text = "beyond_spectrum";
      ++uncertified;
    }
    never_under = never_under && ok;
    pairs.add_row({format_double(t), format_double(eps), bound_text, std::to_string(brute), ok ? "pass" : "fail"});
  }
  out.write("truncation_pairs.csv", pairs.str());

  KeyValueReport r;
  r.add("t", c.verify_t);
  r.add("eps", c.verify_eps);
  r.add("truncation_index", tr.n0);
  r.add("tail_bound", tr.tail);
  r.add("sup_constant", sup_constant);
  r.add("checked_up_to", n_max);
  r.add("worst_value_sup", worst_value);
  r.add("worst_gradient_sup", worst_gradient);
  r.add("tail_pass", tail_pass);
  r.add("random_pairs", c.verify_samples);
  r.add("uncertified_pairs", uncertified);
  r.add("never_under_reports", never_under);
  r.append(b.describe());
  const bool pass = tail_pass && never_under;
  r.add("pass", pass);
  out.summary("truncation_summary.txt", c, r);
  return pass ? kExitPass : kExitFail;
}

int verify_varadhan(const RunConfig& c, Output& out) {
  const ManifoldHandle m = make_manifold(c);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  const HeatEvaluator ev(s, s.count() - 1);
  const GeometryBounds b = make_bounds(c, m);
  const std::vector<PointPair> pairs = pairs_at_distances(m, c.verify_distances);
  const VaradhanReport rep =
      varadhan_check(ev, pairs, varadhan_time_grid(), b, eigenfunction_sup_bounds(s).constant());
  out.write("varadhan.csv", rep.csv());
  bool pass = true;
  double worst = 0.0;
  for (const auto& row : rep.rows) {
    worst = std::max(worst, row.rel_error);
    pass = pass && row.rel_error <= c.verify_tolerance && !row.fit_times.empty();
  }
  KeyValueReport r = rep.summary();
  r.add("worst_rel_error", worst);
  r.add("tolerance", c.verify_tolerance);
  r.append(b.describe());
  r.add("pass", pass);
  out.summary("varadhan_summary.txt", c, r);
  return pass ? kExitPass : kExitFail;
}

int verify_isometry(const RunConfig& c, Output& out, bool injectivity_only) {
  const ManifoldHandle m = make_manifold(c);
  const MapBuilder builder(c, m);
  const EmbedOutcome e = embed_at_best_t(builder, c);
  KeyValueReport r = builder.describe(e.map);
  r.append(e.report.summary());
  if (e.scan) {
    out.write("scan.csv", e.scan->csv());
    r.append(e.scan->summary());
  }
  bool pass = true;
  if (injectivity_only) {
    const bool inj = std::isfinite(e.report.inj_margin) && e.report.inj_margin > 0.0;
    r.add("injective", inj);
    pass = inj;
    out.write("injectivity_ratios.csv", e.report.ratios_csv());
  } else {
    const bool band = e.report.dil_min >= 1.0 - c.verify_band && e.report.dil_max <= 1.0 + c.verify_band;
    r.add("band", c.verify_band);
    r.add("band_pass", band);
    pass = band;
    out.write("isometry_ratios.csv", e.report.ratios_csv());
    if (e.map.kind() == MapKind::kH && builder.ev) {
      // Continuous map into L2(M) at random points.
      CsvTable table({"point", "value", "spectral"});
      bool cont = true;
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (Index i : random_samples(m, c.verify_continuous_points, c.seed)) {
        const Point p = m.sample(i);
        const ContinuousDilatation cd = continuous_dilatation(*builder.ev, p, c.verify_continuous_t);
        table.add_row({point_label(p), format_double(cd.value), format_double(cd.spectral)});
        lo = std::min(lo, cd.value);
        hi = std::max(hi, cd.value);
        cont = cont && std::abs(cd.value - 1.0) <= c.verify_tolerance;
      }
      out.write("continuous_dilatation.csv", table.str());
      r.add("continuous_t", c.verify_continuous_t);
      r.add("continuous_min", lo);
      r.add("continuous_max", hi);
      r.add("continuous_pass", cont);
      pass = pass && cont;
    }
  }
  r.add("pass", pass);
  out.summary(injectivity_only ? "injectivity_summary.txt" : "isometry_summary.txt", c, r);
  return pass ? kExitPass : kExitFail;
}

int verify_counterexample(const RunConfig& c, Output& out) {
  const ManifoldHandle m = make_manifold(c);
  if (m.is_mesh() || m.analytic().kind() != AnalyticKind::kFlatTorus || m.dimension() < 2) {
    throw ConfigError("verify counterexample needs manifold.kind = flat_torus with at least two periods");
  }
  const std::vector<double>& periods = m.analytic().params();
  const auto fiber = static_cast<Eigen::Index>(std::min_element(periods.begin(), periods.end()) - periods.begin());
  const double fiber_period = periods[static_cast<std::size_t>(fiber)];
  const double gap = std::pow(2.0 * std::numbers::pi / fiber_period, 2);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  int below = -1;
  int above = -1;
  for (int k = 0; k < s.count(); ++k) {
    if (s.eigenvalue(k) < gap * (1.0 - 1e-9)) below = k;
    if (s.eigenvalue(k) <= gap * (1.0 + 1e-9)) above = k;
  }
  if (above + 1 >= s.count()) throw ConfigError("spectrum.count does not reach past the first fiber band");

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PointPair> pairs;
  for (int i = 0; i < c.verify_samples; ++i) {
    Point p;
    p.coords.resize(m.dimension());
    for (Eigen::Index j = 0; j < p.coords.size(); ++j) p.coords[j] = unit(rng) * periods[static_cast<std::size_t>(j)];
    Point q = p;
    q.coords[fiber] += 0.5 * fiber_period;
    pairs.push_back({p, q});
  }
  double separation = std::numeric_limits<double>::infinity();
  for (const auto& pq : pairs) separation = std::min(separation, m.distance(pq.p, pq.q));

  const double margin_below = injectivity_margin(make_eigenmap(HeatEvaluator(s, below), c.embed_t), pairs);
  const double margin_above = injectivity_margin(make_eigenmap(HeatEvaluator(s, above), c.embed_t), pairs);
  const bool collapse = margin_below <= c.verify_margin_below;
  const bool lifted = margin_above > c.verify_margin_above;
  KeyValueReport r;
  r.add("t", c.embed_t);
  r.add("fiber_period", fiber_period);
  r.add("gap_eigenvalue", gap);
  r.add("n_below", below);
  r.add("n_above", above);
  r.add("pairs", static_cast<int>(pairs.size()));
  r.add("geodesic_separation", separation);
  r.add("margin_below", margin_below);
  r.add("margin_above", margin_above);
  r.add("collapse", collapse);
  r.add("lifted", lifted);
  r.add("pass", collapse && lifted);
  out.summary("counterexample_summary.txt", c, r);
  return collapse && lifted ? kExitPass : kExitFail;
}

int verify_decay(const RunConfig& c, Output& out) {
  const ManifoldHandle m = make_manifold(c);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  const HeatEvaluator ev(s, s.count() - 1);
  const GeometryBounds b = make_bounds(c, m);
  if (!b.harmonic_radius) throw ConfigError("verify decay needs bounds.r_h");
  const DecayReport rep = decay_check(ev, b, pairs_at_distances(m, c.verify_distances), c.verify_times,
                                      eigenfunction_sup_bounds(s).constant());
  out.write("decay.csv", rep.csv());
  out.write("decay_gradient.csv", rep.gradient_csv());
  KeyValueReport r = rep.summary();
  r.append(b.describe());
  r.add("pass", rep.all_pass);
  out.summary("decay_summary.txt", c, r);
  return rep.all_pass ? kExitPass : kExitFail;
}

int verify_growth(const RunConfig& c, Output& out) {
  const ManifoldHandle m = make_manifold(c);
  const Spectrum s = compute_spectrum(m, c.spectrum_count, solver_options(m));
  const GeometryBounds b = make_bounds(c, m);
  if (!b.harmonic_radius) throw ConfigError("verify growth needs bounds.r_h");
  const GrowthReport rep = eigen_growth_check(s, b);
  out.write("growth.csv", rep.csv());
  KeyValueReport r = rep.summary();
  r.append(b.describe());
  r.add("pass", rep.all_pass);
  out.summary("growth_summary.txt", c, r);
  return rep.all_pass ? kExitPass : kExitFail;
}

int cmd_verify(const std::string& target, const RunConfig& c, std::ostream& log) {
  Output out(c, log);
  if (target == "varadhan") return verify_varadhan(c, out);
  if (target == "isometry") return verify_isometry(c, out, false);
  if (target == "injectivity") return verify_isometry(c, out, true);
  if (target == "truncation") return verify_truncation(c, out);
  if (target == "counterexample") return verify_counterexample(c, out);
  if (target == "decay") return verify_decay(c, out);
  if (target == "growth") return verify_growth(c, out);
  throw ConfigError("unknown verify target '" + target + "'");
}

int cmd_constants(const RunConfig& c, std::ostream& log) {
  Output out(c, log);
  if (c.constants_r_steps < 1 || !(c.constants_r_min > 0.0) || !(c.constants_r_max >= c.constants_r_min)) {
    throw ConfigError("constants needs 0 < r_min <= r_max and r_steps >= 1");
  }
  std::vector<ConstantsRow> rows;
  KeyValueReport r;
  for (double nd : c.constants_n) {
    const int n = static_cast<int>(nd);
    if (n != nd || n < 1) throw ConfigError("constants.n entries must be positive integers");
    for (int i = 0; i < c.constants_r_steps; ++i) {
      const double f = c.constants_r_steps == 1 ? 0.0 : static_cast<double>(i) / (c.constants_r_steps - 1);
      const double radius = c.constants_r_min * std::pow(c.constants_r_max / c.constants_r_min, f);
      rows.push_back(constants_row(n, c.constants_lambda, c.constants_iota, radius));
    }
    for (RadiusCondition cond : {RadiusCondition::kDistance, RadiusCondition::kHarmonicPre, RadiusCondition::kHarmonic}) {
      const CoordinateRadius cr = coordinate_radius(n, c.constants_lambda, c.constants_iota, cond);
      const std::string key = "n" + std::to_string(n) + "_" + to_string(cond);
      r.add("r_star_" + key, cr.r);
      r.add("binding_" + key, cr.binding);
    }
  }
  out.write("constants.csv", constants_csv(rows));
  bool pass = true;
  if (c.constants_experiment) {
    const ManifoldHandle m = make_manifold(c);
    if (!m.is_mesh()) throw ConfigError("constants.experiment needs a mesh manifold");
    CoordinateSetup setup;
    setup.iota = known_iota(c, m);
    setup.lambdas = c.constants_lambdas;
    const double radius = c.constants_radius > 0.0 ? c.constants_radius : setup.iota / 126.0;
    const DistanceCoordinates dc = distance_coordinates_experiment(m, c.constants_base, radius, setup);
    const HarmonicCoordinates hc = harmonic_coordinates_experiment(m, dc);
    out.write("distance_fields.csv", dc.fields_csv());
    out.write("harmonic_fields.csv", hc.fields_csv());
    r.append_prefixed("distance_", dc.summary());
    r.append_prefixed("harmonic_", hc.summary());
    std::vector<double> radii;
    for (int i = 1; i <= 8; ++i) radii.push_back(setup.iota * i / 16.0);
    const BishopGromovCheck bg = bishop_gromov_check(m, c.constants_base, c.constants_lambda, radii);
    const LaplacianDistanceCheck lc =
        laplacian_distance_check(m, c.constants_base, c.constants_lambda, setup.iota / 2.0);
    r.add("bishop_gromov_pass", bg.pass);
    r.add("laplacian_checked", lc.checked);
    r.add("laplacian_excluded", lc.excluded);
    r.add("laplacian_worst_ratio", lc.worst_ratio);
    r.add("laplacian_pass", lc.pass);
    pass = hc.maximum_principle && hc.consistent && bg.pass && lc.pass;
  }
  r.add("pass", pass);
  out.summary("constants_summary.txt", c, r);
  return pass ? kExitPass : kExitFail;
}

int cmd_charts(const RunConfig& c, std::ostream& log) {
  Output out(c, log);
  ChartStudyConfig s;
  s.half_width = c.charts_half_width;
  s.spacings = c.charts_spacings;
  s.t_compare = c.charts_t_compare;
  s.q_minus_one = c.charts_q_minus_one;
  s.bump = c.charts_bump;
  s.bump_width = c.charts_bump_width;
  s.alpha = c.charts_alpha;
  s.sweep_spacing = c.charts_sweep_spacing;
  s.t_max = c.charts_t_max;
  s.steps = c.charts_steps;
  s.window_min = c.charts_window_min;
  s.depth = c.charts_depth;
  s.parametrix_q_minus_one = c.charts_parametrix_q_minus_one;
  s.parametrix_t = c.charts_parametrix_t;
  s.parametrix_spacing = c.charts_parametrix_spacing;
  s.parametrix_time_steps = c.charts_parametrix_time_steps;
  const ChartStudyResult result = run_chart_study(s);
  out.write("sweep.csv", result.sweep_csv(s));
  out.summary("charts_summary.txt", c, result.summary());
  return result.pass() ? kExitPass : kExitFail;
}

}  // namespace

ManifoldHandle make_manifold(const RunConfig& c) {
  const std::string& kind = c.manifold_kind;
  if (kind == "circle" || kind == "sphere" || kind == "flat_torus") {
    return ManifoldHandle::from_analytic(AnalyticManifold::make(parse_analytic_kind(kind), c.manifold_params),
                                         c.manifold_resolution);
  }
  if (kind == "icosphere") {
    const double radius = c.manifold_params.empty() ? 1.0 : c.manifold_params[0];
    return ManifoldHandle::from_mesh(make_sphere(radius, c.manifold_subdivisions), geodesic_method(c));
  }
  if (kind == "torus_mesh") {
    const auto p = require_params(c, 2, "torus_mesh");
    if (c.manifold_cells.size() != 2) throw ConfigError("manifold.cells needs two values for torus_mesh");
    return ManifoldHandle::from_mesh(make_flat_torus_mesh(p[0], p[1], static_cast<int>(c.manifold_cells[0]),
                                                          static_cast<int>(c.manifold_cells[1])),
                                     geodesic_method(c));
  }
  if (kind == "mesh_file") {
    if (c.manifold_mesh.empty()) throw ConfigError("manifold.mesh is required for mesh_file");
    if (!std::filesystem::exists(c.manifold_mesh)) throw ConfigError("mesh file '" + c.manifold_mesh + "' not found");
    return ManifoldHandle::from_mesh(load_mesh(c.manifold_mesh), geodesic_method(c));
  }
  throw ConfigError("unknown manifold.kind '" + kind +
                    "' (expected circle, sphere, flat_torus, icosphere, torus_mesh or mesh_file)");
}

double known_iota(const RunConfig& c, const ManifoldHandle& m) {
  if (c.bounds_iota > 0.0) return c.bounds_iota;
  if (!m.is_mesh()) return m.analytic().injectivity_radius();
  if (c.manifold_kind == "icosphere") return std::numbers::pi * (c.manifold_params.empty() ? 1.0 : c.manifold_params[0]);
  if (c.manifold_kind == "torus_mesh") return 0.5 * std::min(c.manifold_params[0], c.manifold_params[1]);
  throw ConfigError("bounds.iota must be set for mesh_file manifolds");
}

GeometryBounds make_bounds(const RunConfig& c, const ManifoldHandle& m) {
  const double volume = c.bounds_volume > 0.0 ? c.bounds_volume : m.volume();
  GeometryBounds b = GeometryBounds::defaults(m.dimension(), known_iota(c, m), volume);
  b.kappa = c.bounds_kappa;
  if (c.bounds_a > 0.0) b.faber_krahn = c.bounds_a;
  if (c.bounds_c > 0.0) b.trace_constant = c.bounds_c;
  if (c.bounds_d > 0.0) b.gradient_constant = c.bounds_d;
  b.harmonic_radius = c.bounds_r_h;
  b.validate();
  return b;
}

int run(const std::string& subcommand, const std::string& target, const RunConfig& config, std::ostream& log) {
  if (subcommand == "spectrum") return cmd_spectrum(config, log);
  if (subcommand == "embed") return cmd_embed(config, log);
  if (subcommand == "verify") return cmd_verify(target, config, log);
  if (subcommand == "constants") return cmd_constants(config, log);
  if (subcommand == "charts") return cmd_charts(config, log);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace spectral_embed::cli
