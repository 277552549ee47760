#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/report.hpp"
#include "spectral_embed/spectrum.hpp"

namespace spectral_embed {

/// Truncated heat kernel K_N(p,t;q) = sum_{k=0}^{N} e^{-lambda_k t} phi_k(p) phi_k(q).
class HeatEvaluator {
 public:
  /// Uses eigenpairs 0..N; requires N < spectrum.count().
  HeatEvaluator(Spectrum spectrum, int truncation);

  const Spectrum& spectrum() const { return spectrum_; }
  const ManifoldHandle& manifold() const { return spectrum_.manifold(); }
  int truncation() const { return truncation_; }
  int terms() const { return truncation_ + 1; }

  /// e^{-lambda_k t} for k = 0..N.
  Eigen::VectorXd decay(double t) const;
  Eigen::VectorXd values(const Point& p) const { return spectrum_.values(p, terms()); }
  Eigen::MatrixXd gradients(const Point& p) const { return spectrum_.gradients(p, terms()); }

  double kernel(const Point& p, double t, const Point& q) const;
  /// Gradient in p (ambient vector, tangent at p).
  Eigen::VectorXd gradient(const Point& p, double t, const Point& q) const;

 private:
  Spectrum spectrum_;
  int truncation_;
};

double heat_kernel(const HeatEvaluator& ev, const Point& p, double t, const Point& q);
Eigen::VectorXd heat_gradient(const HeatEvaluator& ev, const Point& p, double t, const Point& q);

/// Text label for CSV rows: the vertex index, or coordinates joined by ':'.
std::string point_label(const Point& p);

struct PointPair {
  Point p;
  Point q;
};

/// Value and gradient decay bounds checked on pairs x times.
struct DecayRow {
  std::string p;
  std::string q;
  double t = 0.0;
  double distance = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double floor = 0.0;  // rounding and truncation allowance
  bool pass = true;
  double gradient = 0.0;
  double gradient_bound = 0.0;
  double gradient_floor = 0.0;
  bool gradient_in_range = true;  // t <= 2 r_h^2
  bool gradient_pass = true;
};
struct DecayReport {
  std::vector<DecayRow> rows;
  bool all_pass = true;
  /// `p,q,t,value,bound,floor,flag` for kernel values.
  std::string csv() const;
  /// Same layout for gradient norms; flag may be `outside_theorem_range`.
  std::string gradient_csv() const;
  KeyValueReport summary() const;
};
/// Bound C(n)(1+d^2/t)^{n/2} / (a(n) min(t, r_h^2))^{n/2} e^{-d^2/4t}.
/// A row passes when the value is at most the bound plus a floor: the
/// rounding error eps sqrt(N+1) sum_k e^{-lambda_k t} |phi_k(p)| |phi_k(q)| of
/// the series (each factor taken at no less than its typical size) plus, when
/// a sup constant is given, the certified truncation tail |K - K_N|.
double heat_value_bound(const GeometryBounds& bounds, double d, double t);
/// Bound D(n) / t^{(n+1)/2} e^{-d^2/8t}.
double heat_gradient_bound(const GeometryBounds& bounds, double d, double t);
DecayReport decay_check(const HeatEvaluator& ev, const GeometryBounds& bounds,
                        const std::vector<PointPair>& pairs, const std::vector<double>& times,
                        std::optional<double> sup_constant = std::nullopt);

struct VaradhanRow {
  std::string p;
  std::string q;
  double distance = 0.0;
  double extrapolated = 0.0;
  double rel_error = 0.0;
  std::vector<double> fit_times;  // the valid times used in the fit
  int dropped = 0;                // times rejected for underflow / truncation
};
struct VaradhanReport {
  std::vector<VaradhanRow> rows;
  std::vector<std::string> warnings;
  /// `p,q,d,d_squared,extrapolated,rel_error`.
  std::string csv() const;
  KeyValueReport summary() const;
};
/// Geometric grid t_max * 2^{-j/2}, j = 0..steps-1 (decreasing).
std::vector<double> varadhan_time_grid(double t_max = 0.2, int steps = 41);
/// For each pair, fits -4t log K against t over the three smallest valid times
/// and reports the t -> 0 intercept. A time is valid when K exceeds 100 times
/// the sum of its rounding error and the certified truncation tail.
VaradhanReport varadhan_check(const HeatEvaluator& ev, const std::vector<PointPair>& pairs,
                              const std::vector<double>& times, const GeometryBounds& bounds,
                              double sup_constant);

struct HeatTrace {
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};
/// sum_k e^{-lambda_k t} against V C(n) / (a(n) min(t, r_h^2))^{n/2}.
HeatTrace heat_trace(const Spectrum& spectrum, double t, const GeometryBounds& bounds);

/// Norm of the differential of the continuous map p -> scale * K(p,t;.) into
/// L2(M), with scale^2 = (2t)^{(n+2)/2} 2 (4 pi)^{n/2}.
struct ContinuousDilatation {
  double value = 0.0;     // quadrature over the manifold sample
  double spectral = 0.0;  // same quantity from orthonormality, exact in coefficient space
};
ContinuousDilatation continuous_dilatation(const HeatEvaluator& ev, const Point& p, double t);

}  // namespace spectral_embed
