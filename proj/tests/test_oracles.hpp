#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They share no code with the library.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 4000) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

// Volume of the model ball of radius x (Lambda = 1) up to the solid angle.
inline double ball(int n, double x, int panels = 4000) {
  return simpson([n](double u) { return std::pow(std::sinh(u), n - 1); }, 0.0, x, panels);
}

// C(n, x, y) = 6 sqrt(12 V(4x)/V(x) c(n, 3x) F(n, 3x, coth(y/16))).
inline double holder_constant(int n, double x, double y, int panels = 4000) {
  const double m = n - 1;
  const double coth = std::cosh(y / 16.0) / std::sinh(y / 16.0);
  const double ratio = ball(n, 4.0 * x, panels) / ball(n, x, panels);
  const double c = std::pow(2.0 * std::cosh(1.5 * x), m);
  const double z = 3.0 * x;
  const double log_derivative = z * std::pow(std::sinh(z), m) / ball(n, z, panels);
  const double F = m * z + m * m * z * coth * coth + log_derivative * m * coth;
  return 6.0 * std::sqrt(12.0 * ratio * c * F);
}

// Largest r on a log grid over [cap 1e-8, cap] (cap = iota / 64) with
// C(n, Lambda r, Lambda iota) sqrt(Lambda r) below the threshold; 0 if none.
inline double scan_coordinate_radius(int n, double lambda, double iota, double threshold, int points) {
  const double cap = iota / 64.0;
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double r = cap * std::pow(1e-8, 1.0 - static_cast<double>(i) / points);
    if (holder_constant(n, lambda * r, lambda * iota, 200) * std::sqrt(lambda * r) < threshold) best = r;
  }
  return best;
}

// Heat kernel of the circle of length L by the method of images.
inline double circle_kernel(double L, double x, double t, double y) {
  double sum = 0.0;
  for (int m = -50; m <= 50; ++m) {
    const double d = x - y + L * m;
    sum += std::exp(-d * d / (4.0 * t));
  }
  return sum / std::sqrt(4.0 * std::numbers::pi * t);
}

}  // namespace oracle
