#include <cmath>
#include <numbers>

#include "spectral_embed/error.hpp"
#include "spectral_embed/laplacian.hpp"
#include "spectral_embed/spectrum.hpp"

namespace spectral_embed {

double unit_ball_volume(int n) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

GeometryBounds GeometryBounds::defaults(int n, double iota, double volume) {
  GeometryBounds b;
  b.n = n;
  b.iota = iota;
  b.volume = volume;
  b.faber_krahn = n * std::pow(unit_ball_volume(n), 2.0 / n);
  b.trace_constant = std::pow(2.0, n);
  b.gradient_constant = std::pow(2.0, n);
  b.validate();
  return b;
}

void GeometryBounds::validate() const {
  if (n < 1) throw InvalidArgument("bounds: n must be >= 1");
  if (!(iota > 0.0)) throw InvalidArgument("bounds: injectivity radius must be positive");
  if (!(volume > 0.0)) throw InvalidArgument("bounds: volume must be positive");
  if (!(faber_krahn > 0.0)) throw InvalidArgument("bounds: a(n) must be positive");
  if (!(trace_constant > 0.0)) throw InvalidArgument("bounds: C(n) must be positive");
  if (!(gradient_constant > 0.0)) throw InvalidArgument("bounds: D(n) must be positive");
  if (harmonic_radius && !(*harmonic_radius > 0.0)) {
    throw InvalidArgument("bounds: harmonic radius must be positive");
  }
}

double GeometryBounds::require_rh() const {
  if (!harmonic_radius) throw InvalidArgument("bounds: harmonic radius r_h is not set");
  return *harmonic_radius;
}

KeyValueReport GeometryBounds::describe() const {
  KeyValueReport r;
  r.add("bounds_n", n);
  r.add("bounds_kappa", kappa);
  r.add("bounds_iota", iota);
  r.add("bounds_volume", volume);
  r.add("bounds_a", faber_krahn);
  r.add("bounds_c", trace_constant);
  r.add("bounds_d", gradient_constant);
  r.add("bounds_r_h", harmonic_radius ? format_double(*harmonic_radius) : std::string("unset"));
  return r;
}

namespace {

double growth_threshold(const GeometryBounds& b) {
  const double rh = b.require_rh();
  return b.trace_constant * b.volume * std::exp(b.n / 2.0) /
         (std::pow(b.faber_krahn, b.n / 2.0) * std::pow(rh, b.n));
}

double growth_bound(const GeometryBounds& b, double k) {
  return b.n / (2.0 * std::exp(1.0)) * b.faber_krahn * std::pow(k / (b.trace_constant * b.volume), 2.0 / b.n);
}

}  // namespace

GrowthReport eigen_growth_check(const Spectrum& spectrum, const GeometryBounds& bounds) {
  bounds.validate();
  GrowthReport report;
  report.threshold = growth_threshold(bounds);
  for (int k = 1; k < spectrum.count(); ++k) {
    GrowthRow row;
    row.k = k;
    row.lambda = spectrum.eigenvalue(k);
    row.bound = growth_bound(bounds, k);
    row.applicable = k >= report.threshold;
    row.pass = !row.applicable || row.lambda >= row.bound;
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

std::string GrowthReport::csv() const {
  CsvTable table({"k", "lambda", "bound", "flag"});
  for (const auto& r : rows) {
    table.add_row({std::to_string(r.k), format_double(r.lambda), format_double(r.bound),
                   r.applicable ? (r.pass ? "pass" : "fail") : "not_applicable"});
  }
  return table.str();
}

KeyValueReport GrowthReport::summary() const {
  KeyValueReport r;
  int applicable = 0;
  int failed = 0;
  for (const auto& row : rows) {
    applicable += row.applicable ? 1 : 0;
    failed += row.pass ? 0 : 1;
  }
  r.add("growth_threshold", threshold);
  r.add("growth_rows", static_cast<int>(rows.size()));
  r.add("growth_applicable", applicable);
  r.add("growth_failed", failed);
  r.add("growth_pass", all_pass);
  return r;
}

SupBoundReport eigenfunction_sup_bounds(const Spectrum& spectrum) {
  SupBoundReport report;
  const int count = spectrum.count();
  const int n = spectrum.dimension();
  if (count < 2) return report;
  Eigen::VectorXd value_sup = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd gradient_sup = Eigen::VectorXd::Zero(count);
  const ManifoldHandle& m = spectrum.manifold();
  if (m.is_mesh()) {
    const TriMesh& mesh = m.mesh();
    value_sup = spectrum.vectors().cwiseAbs().colwise().maxCoeff().transpose();
    for (Index f = 0; f < mesh.triangle_count(); ++f) {
      const Eigen::MatrixXd g = triangle_gradients(mesh, f, spectrum.vectors());
      gradient_sup = gradient_sup.cwiseMax(g.colwise().norm().transpose());
    }
  } else if (!m.analytic().exact_sup_norms(spectrum.modes(), value_sup, gradient_sup)) {
    // No closed form (sphere): maximise over the quadrature sample.
    for (Index i = 0; i < m.sample_count(); ++i) {
      const Point p = m.sample(i);
      value_sup = value_sup.cwiseMax(spectrum.values(p, count).cwiseAbs());
      gradient_sup = gradient_sup.cwiseMax(spectrum.gradients(p, count).colwise().norm().transpose());
    }
  }
  for (int k = 1; k < count; ++k) {
    SupBoundRow row;
    row.k = k;
    row.lambda = spectrum.eigenvalue(k);
    row.value_sup = value_sup[k];
    row.gradient_sup = gradient_sup[k];
    row.value_ratio = row.value_sup / std::pow(row.lambda, n / 4.0);
    row.gradient_ratio = row.gradient_sup / std::pow(row.lambda, (n + 2) / 4.0);
    report.value_constant = std::max(report.value_constant, row.value_ratio);
    report.gradient_constant = std::max(report.gradient_constant, row.gradient_ratio);
    report.rows.push_back(row);
  }
  return report;
}

std::string SupBoundReport::csv() const {
  CsvTable table({"k", "lambda", "value_sup", "gradient_sup", "value_ratio", "gradient_ratio"});
  for (const auto& r : rows) {
    table.add_row({std::to_string(r.k), format_double(r.lambda), format_double(r.value_sup),
                   format_double(r.gradient_sup), format_double(r.value_ratio),
                   format_double(r.gradient_ratio)});
  }
  return table.str();
}

KeyValueReport SupBoundReport::summary() const {
  KeyValueReport r;
  r.add("sup_value_constant", value_constant);
  r.add("sup_gradient_constant", gradient_constant);
  r.add("sup_constant", constant());
  return r;
}

namespace {

// sup_{y >= x} e^{-y t} max(y^{n/2}, y^{(n+1)/2}): dominates the value and
// gradient contributions of any eigenvalue known to be at least x.
double tail_weight(double x, double t, int n) {
  x = std::max(x, 0.0);
  auto f = [&](double y) { return std::exp(-y * t) * std::max(std::pow(y, n / 2.0), std::pow(y, (n + 1) / 2.0)); };
  const double peak_hi = (n + 1) / (2.0 * t);
  const double peak_lo = n / (2.0 * t);
  // f is the max of two unimodal functions; its sup over [x, inf) is attained
  // at x or at one of their maximisers beyond x.
  double best = f(x);
  if (peak_lo > x) best = std::max(best, f(peak_lo));
  if (peak_hi > x) best = std::max(best, f(peak_hi));
  return best;
}

// Sum over k >= first of tail_weight(lambda_hat_k), where lambda_hat_k is
// max(lambda_last, growth bound) and the growth bound only counts above its
// threshold.
double remainder_sum(const Spectrum& s, const GeometryBounds& b, double t, int first) {
  const double lambda_last = s.eigenvalue(s.count() - 1);
  double threshold = std::numeric_limits<double>::infinity();
  if (b.harmonic_radius) threshold = growth_threshold(b);
  double sum = 0.0;
  const int n = b.n;
  if (!std::isfinite(threshold)) {
    // Without a growth bound the remainder cannot be certified.
    return std::numeric_limits<double>::infinity();
  }
  const double kstart = std::max(static_cast<double>(first), std::ceil(threshold));
  // Indices between `first` and the threshold only know lambda >= lambda_last.
  if (kstart > first) sum += (kstart - first) * tail_weight(lambda_last, t, n);
  for (double k = kstart;; k += 1.0) {
    const double lam = std::max(lambda_last, growth_bound(b, k));
    const double term = tail_weight(lam, t, n);
    sum += term;
    // Terms decay at least geometrically once lambda t exceeds the peak; stop
    // when the remaining terms cannot change the sum.
    if (lam * t > (n + 1) / 2.0 + 40.0 && term < 1e-17 * sum) break;
    if (term == 0.0) break;
    if (k - kstart > 1e8) return std::numeric_limits<double>::infinity();
  }
  return sum;
}

}  // namespace

double truncation_tail(const Spectrum& spectrum, int n_cut, double t, const GeometryBounds& bounds,
                       double sup_constant) {
  if (!(t > 0.0)) throw InvalidArgument("truncation: t must be positive");
  const int n = bounds.n;
  double sum = 0.0;
  for (int k = std::max(n_cut + 1, 1); k < spectrum.count(); ++k) sum += tail_weight(spectrum.eigenvalue(k), t, n);
  sum += remainder_sum(spectrum, bounds, t, spectrum.count());
  return sup_constant * sup_constant * sum;
}

TruncationResult truncation_index(const Spectrum& spectrum, double t, double eps,
                                  const GeometryBounds& bounds, std::optional<double> sup_constant) {
  if (!(t > 0.0)) throw InvalidArgument("truncation: t must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("truncation: eps must be positive");
  bounds.validate();
  TruncationResult result;
  result.constant = sup_constant ? *sup_constant : eigenfunction_sup_bounds(spectrum).constant();
  const double c2 = result.constant * result.constant;
  const int n = bounds.n;
  const int count = spectrum.count();
  // tail[N] for N = count-1 down to 0, accumulated from the certified remainder.
  double tail = c2 * remainder_sum(spectrum, bounds, t, count);
  if (!(tail < eps)) {
    throw TruncationError("truncation index exceeds the " + std::to_string(count) +
                              " available eigenpairs (tail bound with all of them: " +
                              format_double(tail) + ")",
                          tail);
  }
  int n0 = count - 1;
  double tail_at_n0 = tail;
  for (int cut = count - 2; cut >= 0; --cut) {
    tail += c2 * tail_weight(spectrum.eigenvalue(cut + 1), t, n);
    if (!(tail < eps)) break;
    n0 = cut;
    tail_at_n0 = tail;
  }
  result.n0 = n0;
  result.tail = tail_at_n0;
  return result;
}

}  // namespace spectral_embed
