#include "spectral_embed/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

HeatEvaluator::HeatEvaluator(Spectrum spectrum, int truncation)
    : spectrum_(std::move(spectrum)), truncation_(truncation) {
  if (truncation < 0 || truncation >= spectrum_.count()) {
    throw InvalidArgument("truncation index " + std::to_string(truncation) + " needs " +
                          std::to_string(truncation + 1) + " eigenpairs, spectrum has " +
                          std::to_string(spectrum_.count()));
  }
}

Eigen::VectorXd HeatEvaluator::decay(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel time must be positive");
  return (-t * spectrum_.eigenvalues().head(terms()).array()).exp().matrix();
}

double HeatEvaluator::kernel(const Point& p, double t, const Point& q) const {
  const Eigen::VectorXd a = values(p);
  const Eigen::VectorXd b = values(q);
  return a.cwiseProduct(b).dot(decay(t));
}

Eigen::VectorXd HeatEvaluator::gradient(const Point& p, double t, const Point& q) const {
  return gradients(p) * decay(t).cwiseProduct(values(q));
}

double heat_kernel(const HeatEvaluator& ev, const Point& p, double t, const Point& q) {
  return ev.kernel(p, t, q);
}

Eigen::VectorXd heat_gradient(const HeatEvaluator& ev, const Point& p, double t, const Point& q) {
  return ev.gradient(p, t, q);
}

std::string point_label(const Point& p) {
  if (p.vertex >= 0) return std::to_string(p.vertex);
  std::string s;
  for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
    if (i) s += ':';
    s += format_double(p.coords[i]);
  }
  return s;
}

double heat_value_bound(const GeometryBounds& b, double d, double t) {
  const double rh = b.require_rh();
  const double n = b.n;
  return b.trace_constant * std::pow(1.0 + d * d / t, n / 2.0) /
         std::pow(b.faber_krahn * std::min(t, rh * rh), n / 2.0) * std::exp(-d * d / (4.0 * t));
}

double heat_gradient_bound(const GeometryBounds& b, double d, double t) {
  return b.gradient_constant / std::pow(t, (b.n + 1) / 2.0) * std::exp(-d * d / (8.0 * t));
}

DecayReport decay_check(const HeatEvaluator& ev, const GeometryBounds& bounds,
                        const std::vector<PointPair>& pairs, const std::vector<double>& times,
                        std::optional<double> sup_constant) {
  bounds.validate();
  const double rh = bounds.require_rh();
  const double eps = std::numeric_limits<double>::epsilon();
  DecayReport report;
  for (const auto& pair : pairs) {
    const double d = ev.manifold().distance(pair.p, pair.q);
    for (double t : times) {
      DecayRow row;
      row.p = point_label(pair.p);
      row.q = point_label(pair.q);
      row.t = t;
      row.distance = d;
      // Rounding floor of the summed series. Each factor is taken at no less
      // than its typical size (1/sqrt(vol), sqrt(lambda_k)/sqrt(vol) for
      // gradients), since an eigenfunction evaluated near one of its zeros
      // still carries an absolute error of that order.
      const Eigen::VectorXd decay = ev.decay(t);
      const Eigen::VectorXd vp = ev.values(pair.p);
      const Eigen::VectorXd vq = ev.values(pair.q);
      const Eigen::MatrixXd gp = ev.gradients(pair.p);
      const double typical = 1.0 / std::sqrt(ev.spectrum().volume());
      const Eigen::ArrayXd mp = vp.array().abs().max(typical);
      const Eigen::ArrayXd mq = vq.array().abs().max(typical);
      const Eigen::ArrayXd grad_typical =
          typical * ev.spectrum().eigenvalues().head(ev.terms()).array().max(0.0).sqrt();
      const Eigen::ArrayXd mg = gp.colwise().norm().transpose().array().max(grad_typical);
      const double scale = eps * std::sqrt(static_cast<double>(ev.terms()));
      // The bounds concern the full kernel; K_N differs from it by at most the certified tail.
      const double tail =
          sup_constant ? truncation_tail(ev.spectrum(), ev.truncation(), t, bounds, *sup_constant) : 0.0;
      row.value = ev.kernel(pair.p, t, pair.q);
      row.floor = scale * (decay.array() * mp * mq).sum() + tail;
      row.bound = heat_value_bound(bounds, d, t);
      row.pass = row.value <= row.bound + row.floor;
      row.gradient = ev.gradient(pair.p, t, pair.q).norm();
      row.gradient_floor = scale * (decay.array() * mg * mq).sum() + tail;
      row.gradient_bound = heat_gradient_bound(bounds, d, t);
      row.gradient_in_range = t <= 2.0 * rh * rh;
      row.gradient_pass = !row.gradient_in_range || row.gradient <= row.gradient_bound + row.gradient_floor;
      report.all_pass = report.all_pass && row.pass && row.gradient_pass;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string DecayReport::csv() const {
  CsvTable table({"p", "q", "t", "value", "bound", "floor", "flag"});
  for (const auto& r : rows) {
    table.add_row({r.p, r.q, format_double(r.t), format_double(r.value), format_double(r.bound),
                   format_double(r.floor), r.pass ? "pass" : "fail"});
  }
  return table.str();
}

std::string DecayReport::gradient_csv() const {
  CsvTable table({"p", "q", "t", "value", "bound", "floor", "flag"});
  for (const auto& r : rows) {
    const char* flag = !r.gradient_in_range ? "outside_theorem_range" : (r.gradient_pass ? "pass" : "fail");
    table.add_row({r.p, r.q, format_double(r.t), format_double(r.gradient), format_double(r.gradient_bound),
                   format_double(r.gradient_floor), flag});
  }
  return table.str();
}

KeyValueReport DecayReport::summary() const {
  KeyValueReport r;
  int fails = 0;
  int gradient_fails = 0;
  int outside = 0;
  double worst = 0.0;
  for (const auto& row : rows) {
    fails += row.pass ? 0 : 1;
    gradient_fails += row.gradient_pass ? 0 : 1;
    outside += row.gradient_in_range ? 0 : 1;
    if (row.bound > 0.0) worst = std::max(worst, row.value / row.bound);
  }
  r.add("decay_rows", static_cast<int>(rows.size()));
  r.add("decay_value_failures", fails);
  r.add("decay_gradient_failures", gradient_fails);
  r.add("decay_gradient_outside_range", outside);
  r.add("decay_max_value_ratio", worst);
  r.add("decay_pass", all_pass);
  return r;
}

std::vector<double> varadhan_time_grid(double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 3) throw InvalidArgument("Varadhan grid needs t_max > 0 and >= 3 steps");
  std::vector<double> grid;
  for (int j = 0; j < steps; ++j) grid.push_back(t_max * std::pow(2.0, -j / 2.0));
  return grid;
}

VaradhanReport varadhan_check(const HeatEvaluator& ev, const std::vector<PointPair>& pairs,
                              const std::vector<double>& times, const GeometryBounds& bounds,
                              double sup_constant) {
  VaradhanReport report;
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> tails(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    tails[i] = truncation_tail(ev.spectrum(), ev.truncation(), sorted[i], bounds, sup_constant);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (const auto& pair : pairs) {
    VaradhanRow row;
    row.p = point_label(pair.p);
    row.q = point_label(pair.q);
    row.distance = ev.manifold().distance(pair.p, pair.q);
    const Eigen::VectorXd a = ev.values(pair.p);
    const Eigen::VectorXd b = ev.values(pair.q);
    std::vector<double> fit_t;
    std::vector<double> fit_y;
    for (std::size_t i = 0; i < sorted.size() && fit_t.size() < 3; ++i) {
      const double t = sorted[i];
      const Eigen::VectorXd terms = a.cwiseProduct(b).cwiseProduct(ev.decay(t));
      const double k = terms.sum();
      const double noise = eps * std::sqrt(static_cast<double>(terms.size())) * terms.cwiseAbs().sum() + tails[i];
      if (!(k > 100.0 * noise) || !(k > 0.0)) {
        ++row.dropped;
        continue;
      }
      fit_t.push_back(t);
      fit_y.push_back(-4.0 * t * std::log(k));
    }
    if (row.dropped > 0) {
      report.warnings.push_back("pair (" + row.p + ", " + row.q + "): " + std::to_string(row.dropped) +
                                " times dropped (kernel below rounding/truncation level)");
    }
    if (fit_t.size() < 2) {
      throw InvalidArgument("Varadhan fit for pair (" + row.p + ", " + row.q +
                            ") has fewer than two valid times; raise the truncation index");
    }
    // Least-squares line y = c0 + c1 t; the intercept is the t -> 0 limit.
    const double m = static_cast<double>(fit_t.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < fit_t.size(); ++i) {
      st += fit_t[i];
      sy += fit_y[i];
      stt += fit_t[i] * fit_t[i];
      sty += fit_t[i] * fit_y[i];
    }
    const double slope = (m * sty - st * sy) / (m * stt - st * st);
    row.extrapolated = (sy - slope * st) / m;
    const double d2 = row.distance * row.distance;
    row.rel_error = d2 > 0.0 ? std::abs(row.extrapolated - d2) / d2 : std::abs(row.extrapolated);
    row.fit_times = fit_t;
    report.rows.push_back(row);
  }
  return report;
}

std::string VaradhanReport::csv() const {
  CsvTable table({"p", "q", "d", "d_squared", "extrapolated", "rel_error"});
  for (const auto& r : rows) {
    table.add_row({r.p, r.q, format_double(r.distance), format_double(r.distance * r.distance),
                   format_double(r.extrapolated), format_double(r.rel_error)});
  }
  return table.str();
}

KeyValueReport VaradhanReport::summary() const {
  KeyValueReport r;
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.rel_error);
  r.add("varadhan_pairs", static_cast<int>(rows.size()));
  r.add("varadhan_max_rel_error", worst);
  r.add("varadhan_warnings", static_cast<int>(warnings.size()));
  return r;
}

HeatTrace heat_trace(const Spectrum& spectrum, double t, const GeometryBounds& bounds) {
  if (!(t > 0.0)) throw InvalidArgument("heat trace time must be positive");
  const double rh = bounds.require_rh();
  HeatTrace h;
  h.t = t;
  h.value = (-t * spectrum.eigenvalues().array()).exp().sum();
  h.bound = bounds.volume * bounds.trace_constant /
            std::pow(bounds.faber_krahn * std::min(t, rh * rh), bounds.n / 2.0);
  h.pass = h.value <= h.bound;
  return h;
}

ContinuousDilatation continuous_dilatation(const HeatEvaluator& ev, const Point& p, double t) {
  const int n = ev.manifold().dimension();
  const Eigen::VectorXd decay = ev.decay(t);
  const Eigen::MatrixXd frame = ev.manifold().tangent_frame(p);
  // Row a: e^{-lambda_k t} (e_a . grad phi_k(p)).
  const Eigen::MatrixXd d = (frame.transpose() * ev.gradients(p)) * decay.asDiagonal();
  const Eigen::MatrixXd phi = ev.spectrum().sample_values(ev.terms());
  const Eigen::VectorXd& w = ev.manifold().sample_weights();
  const Eigen::MatrixXd gram_phi = phi.transpose() * w.asDiagonal() * phi;
  const double scale2 = std::pow(2.0 * t, (n + 2) / 2.0) * 2.0 * std::pow(4.0 * std::numbers::pi, n / 2.0);
  auto top = [&](const Eigen::MatrixXd& g) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scale2 * g);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  };
  ContinuousDilatation out;
  out.value = top(d * gram_phi * d.transpose());
  out.spectral = top(d * d.transpose());
  return out;
}

}  // namespace spectral_embed
