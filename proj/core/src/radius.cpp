#include "spectral_embed/radius.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

using boost::math::quadrature::gauss_kronrod;

// int_0^x sinh^{n-1}(u) du, computed as x sinh^{n-1}(x) int_0^1 (sinh(xv)/sinh(x))^{n-1} dv
// so that the adaptive tolerance acts on an O(1) integrand for every x.
double sinh_power_integral(int n, double x) {
  if (n == 1) return x;
  if (x == 0.0) return 0.0;
  const double sx = std::sinh(x);
  const auto f = [n, x, sx](double v) { return std::pow(std::sinh(x * v) / sx, n - 1); };
  return x * std::pow(sx, n - 1) * gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-12);
}

void require_dimension(int n) {
  if (n < 1) throw InvalidArgument("dimension n must be >= 1");
}

}  // namespace

double solid_angle(int n) {
  require_dimension(n);
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

ModelVolumes model_volumes(int n, double lambda, double r) {
  require_dimension(n);
  if (!(lambda > 0.0) || !(r > 0.0)) throw InvalidArgument("model volumes need Lambda > 0 and r > 0");
  const double omega = solid_angle(n);
  ModelVolumes v;
  v.boundary = omega * std::pow(std::sinh(lambda * r), n - 1) / std::pow(lambda, n - 1);
  v.ball = omega / std::pow(lambda, n) * sinh_power_integral(n, lambda * r);
  return v;
}

double model_volume_ratio(int n, double x, double k) {
  require_dimension(n);
  if (!(x > 0.0) || !(k > 0.0)) throw InvalidArgument("volume ratio needs Lambda r > 0 and k > 0");
  return sinh_power_integral(n, k * x) / sinh_power_integral(n, x);
}

double segment_constant(int n, double lambda_s) {
  require_dimension(n);
  if (!(lambda_s >= 0.0)) throw InvalidArgument("segment constant needs Lambda s >= 0");
  return std::pow(2.0, n - 1) * std::pow(std::cosh(lambda_s / 2.0), n - 1);
}

double hessian_bound_F(int n, double lambda_r, double coth_bound, FForm form) {
  require_dimension(n);
  if (!(lambda_r > 0.0) || !(coth_bound >= 1.0)) {
    throw InvalidArgument("hessian_bound_F needs Lambda r > 0 and coth bound >= 1");
  }
  const double m = n - 1;
  double volume_term = 0.0;
  if (form == FForm::kExplicit) {
    volume_term = std::pow(2.0, n - 1) * std::pow(std::cosh(lambda_r / 2.0), n - 1);
  } else {
    // r Vol(dB_r) / Vol(B_r) depends on Lambda r only.
    volume_term = lambda_r * std::pow(std::sinh(lambda_r), n - 1) / sinh_power_integral(n, lambda_r);
  }
  return m * lambda_r + m * m * lambda_r * coth_bound * coth_bound + volume_term * m * coth_bound;
}

double holder_constant_C(int n, double lambda_r, double lambda_iota, FForm form) {
  if (!(lambda_r > 0.0) || !(lambda_iota > 0.0)) throw InvalidArgument("holder constant needs positive arguments");
  const double coth = 1.0 / std::tanh(lambda_iota / 16.0);
  const double inner = 12.0 * model_volume_ratio(n, lambda_r, 4.0) * segment_constant(n, 3.0 * lambda_r) *
                       hessian_bound_F(n, 3.0 * lambda_r, coth, form);
  return 6.0 * std::sqrt(inner);
}

std::string to_string(RadiusCondition condition) {
  switch (condition) {
    case RadiusCondition::kDistance: return "distance";
    case RadiusCondition::kHarmonicPre: return "harmonic_pre";
    case RadiusCondition::kHarmonic: return "harmonic";
  }
  return "unknown";
}

RadiusCondition parse_radius_condition(const std::string& name) {
  if (name == "distance") return RadiusCondition::kDistance;
  if (name == "harmonic_pre") return RadiusCondition::kHarmonicPre;
  if (name == "harmonic") return RadiusCondition::kHarmonic;
  throw InvalidArgument("unknown radius condition '" + name + "' (expected distance, harmonic_pre or harmonic)");
}

double condition_threshold(int n, RadiusCondition condition) {
  require_dimension(n);
  switch (condition) {
    case RadiusCondition::kDistance: return 1.0 / (2.0 * n);
    case RadiusCondition::kHarmonicPre: return 1.0 / (4.0 * n);
    case RadiusCondition::kHarmonic: return 1.0 / n;
  }
  return 0.0;
}

CoordinateRadius coordinate_radius(int n, double lambda, double iota, RadiusCondition condition) {
  return coordinate_radius(n, lambda, iota, condition_threshold(n, condition));
}

CoordinateRadius coordinate_radius(int n, double lambda, double iota, double threshold) {
  if (!(lambda > 0.0) || !(iota > 0.0) || !(threshold > 0.0)) {
    throw InvalidArgument("coordinate radius needs Lambda, iota and threshold positive");
  }
  const auto g = [&](double r) { return holder_constant_C(n, lambda * r, lambda * iota) * std::sqrt(lambda * r); };
  CoordinateRadius out;
  out.threshold = threshold;
  const double cap = iota / 64.0;
  double hi = cap;
  if (std::isfinite(cap)) {
    const double at_cap = g(cap);
    if (at_cap < threshold) {
      out.r = cap;
      out.binding = "cap";
      out.value = at_cap;
      return out;
    }
  } else {
    hi = 1.0 / lambda;
    while (g(hi) < threshold) hi *= 2.0;
  }
  double lo = 0.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < threshold ? lo : hi) = mid;
  }
  out.r = lo;
  out.binding = "inequality";
  out.value = lo > 0.0 ? g(lo) : 0.0;
  return out;
}

double abresch_gromoll_L(int n, double lambda, double R, double r) {
  require_dimension(n);
  if (!(lambda > 0.0) || !(r >= 0.0) || !(R >= r)) throw InvalidArgument("abresch_gromoll_L needs Lambda > 0 and 0 <= r <= R");
  if (r == R) return 0.0;
  if (r == 0.0 && n >= 2) return std::numeric_limits<double>::infinity();
  const auto inner = [&](double s) {
    if (n == 1) return R - s;
    const double base = std::sinh(lambda * s);
    const auto ratio = [&](double tau) { return std::pow(std::sinh(lambda * tau) / base, n - 1); };
    return gauss_kronrod<double, 31>::integrate(ratio, s, R, 20, 1e-11);
  };
  return gauss_kronrod<double, 31>::integrate(inner, r, R, 20, 1e-10);
}

ConstantsRow constants_row(int n, double lambda, double iota, double r) {
  ConstantsRow row;
  row.n = n;
  row.lambda = lambda;
  row.iota = iota;
  row.r = r;
  const double x = lambda * r;
  const double coth = 1.0 / std::tanh(lambda * iota / 16.0);
  row.volume_ratio = model_volume_ratio(n, x, 4.0);
  row.c = segment_constant(n, 3.0 * x);
  row.F = hessian_bound_F(n, 3.0 * x, coth, FForm::kExact);
  row.F_explicit = hessian_bound_F(n, 3.0 * x, coth, FForm::kExplicit);
  row.C = holder_constant_C(n, x, lambda * iota);
  const double lhs = row.C * std::sqrt(x);
  const bool capped = r <= iota / 64.0;
  row.cond_dist = capped && lhs < condition_threshold(n, RadiusCondition::kDistance);
  row.cond_harm = capped && lhs < condition_threshold(n, RadiusCondition::kHarmonicPre);
  return row;
}

std::string constants_csv(const std::vector<ConstantsRow>& rows) {
  CsvTable table({"n", "Lambda", "iota", "r", "volratio", "c", "F", "C", "cond_dist", "cond_harm"});
  for (const auto& row : rows) {
    table.add_row({std::to_string(row.n), format_double(row.lambda), format_double(row.iota), format_double(row.r),
                   format_double(row.volume_ratio), format_double(row.c), format_double(row.F), format_double(row.C),
                   row.cond_dist ? "true" : "false", row.cond_harm ? "true" : "false"});
  }
  return table.str();
}

}  // namespace spectral_embed
