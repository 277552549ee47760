#include "spectral_embed/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Geometry>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

constexpr double kPi = std::numbers::pi;

int sh_index(int l, int m) { return l * l + l + m; }

// Real spherical harmonics of degree <= lmax, extended to R^3 as homogeneous
// (solid) harmonic polynomials. Only ring operations are used, so the same
// code runs on std::complex for complex-step differentiation.
template <typename T>
std::vector<T> solid_harmonics(int lmax, const T& x, const T& y, const T& z) {
  std::vector<T> out(static_cast<std::size_t>((lmax + 1) * (lmax + 1)), T(0.0));
  const T r2 = x * x + y * y + z * z;
  std::vector<T> cm(static_cast<std::size_t>(lmax + 1));
  std::vector<T> sm(static_cast<std::size_t>(lmax + 1));
  cm[0] = T(1.0);
  sm[0] = T(0.0);
  for (int m = 1; m <= lmax; ++m) {
    cm[static_cast<std::size_t>(m)] = x * cm[static_cast<std::size_t>(m - 1)] - y * sm[static_cast<std::size_t>(m - 1)];
    sm[static_cast<std::size_t>(m)] = x * sm[static_cast<std::size_t>(m - 1)] + y * cm[static_cast<std::size_t>(m - 1)];
  }
  double double_factorial = 1.0;  // (2m - 1)!!
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) double_factorial *= (2.0 * m - 1.0);
    T p_prev2(0.0);
    T p_prev(double_factorial);
    for (int l = m; l <= lmax; ++l) {
      T p;
      if (l == m) {
        p = p_prev;
      } else if (l == m + 1) {
        p = T(2.0 * m + 1.0) * z * p_prev;
      } else {
        p = (T(2.0 * l - 1.0) * z * p_prev - T(l + m - 1.0) * r2 * p_prev2) / T(double(l - m));
      }
      if (l > m) {
        p_prev2 = p_prev;
        p_prev = p;
      }
      const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                                    std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
      if (m == 0) {
        out[static_cast<std::size_t>(sh_index(l, 0))] = T(norm) * p;
      } else {
        out[static_cast<std::size_t>(sh_index(l, m))] = T(std::sqrt(2.0) * norm) * p * cm[static_cast<std::size_t>(m)];
        out[static_cast<std::size_t>(sh_index(l, -m))] = T(std::sqrt(2.0) * norm) * p * sm[static_cast<std::size_t>(m)];
      }
    }
  }
  return out;
}

double wrapped_gap(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

void require_positive(const std::vector<double>& params, const char* what) {
  if (params.empty()) throw InvalidArgument(std::string(what) + ": missing parameters");
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw InvalidArgument(std::string(what) + ": parameters must be positive, got " +
                            std::to_string(p));
    }
  }
}

}  // namespace

std::string to_string(AnalyticKind kind) {
  switch (kind) {
    case AnalyticKind::kCircle: return "circle";
    case AnalyticKind::kSphere: return "sphere";
    case AnalyticKind::kFlatTorus: return "torus";
  }
  return "unknown";
}

AnalyticKind parse_analytic_kind(const std::string& name) {
  if (name == "circle") return AnalyticKind::kCircle;
  if (name == "sphere") return AnalyticKind::kSphere;
  if (name == "torus" || name == "flat_torus") return AnalyticKind::kFlatTorus;
  throw InvalidArgument("unknown analytic manifold kind '" + name + "'");
}

AnalyticManifold AnalyticManifold::circle(double circumference) {
  return make(AnalyticKind::kCircle, {circumference});
}

AnalyticManifold AnalyticManifold::sphere(double radius) {
  return make(AnalyticKind::kSphere, {radius});
}

AnalyticManifold AnalyticManifold::flat_torus(std::vector<double> periods) {
  return make(AnalyticKind::kFlatTorus, periods);
}

AnalyticManifold AnalyticManifold::make(AnalyticKind kind, const std::vector<double>& params) {
  require_positive(params, to_string(kind).c_str());
  if (kind != AnalyticKind::kFlatTorus && params.size() != 1) {
    throw InvalidArgument(to_string(kind) + " takes exactly one parameter");
  }
  return AnalyticManifold(kind, params);
}

int AnalyticManifold::dimension() const {
  switch (kind_) {
    case AnalyticKind::kCircle: return 1;
    case AnalyticKind::kSphere: return 2;
    case AnalyticKind::kFlatTorus: return static_cast<int>(params_.size());
  }
  return 0;
}

int AnalyticManifold::ambient_dimension() const {
  return kind_ == AnalyticKind::kSphere ? 3 : dimension();
}

double AnalyticManifold::volume() const {
  switch (kind_) {
    case AnalyticKind::kCircle: return params_[0];
    case AnalyticKind::kSphere: return 4.0 * kPi * params_[0] * params_[0];
    case AnalyticKind::kFlatTorus: {
      double v = 1.0;
      for (double a : params_) v *= a;
      return v;
    }
  }
  return 0.0;
}

double AnalyticManifold::diameter() const {
  switch (kind_) {
    case AnalyticKind::kCircle: return params_[0] / 2.0;
    case AnalyticKind::kSphere: return kPi * params_[0];
    case AnalyticKind::kFlatTorus: {
      double s = 0.0;
      for (double a : params_) s += a * a / 4.0;
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double AnalyticManifold::injectivity_radius() const {
  switch (kind_) {
    case AnalyticKind::kCircle: return params_[0] / 2.0;
    case AnalyticKind::kSphere: return kPi * params_[0];
    case AnalyticKind::kFlatTorus:
      return *std::min_element(params_.begin(), params_.end()) / 2.0;
  }
  return 0.0;
}

double AnalyticManifold::distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  switch (kind_) {
    case AnalyticKind::kCircle: return wrapped_gap(a[0], b[0], params_[0]);
    case AnalyticKind::kFlatTorus: {
      double s = 0.0;
      for (std::size_t j = 0; j < params_.size(); ++j) {
        const double d = wrapped_gap(a[static_cast<Eigen::Index>(j)], b[static_cast<Eigen::Index>(j)], params_[j]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case AnalyticKind::kSphere: {
      const Eigen::Vector3d u = a.head<3>().normalized();
      const Eigen::Vector3d v = b.head<3>().normalized();
      return params_[0] * std::atan2(u.cross(v).norm(), u.dot(v));
    }
  }
  return 0.0;
}

Eigen::MatrixXd AnalyticManifold::tangent_frame(const Eigen::VectorXd& x) const {
  if (kind_ != AnalyticKind::kSphere) {
    return Eigen::MatrixXd::Identity(dimension(), dimension());
  }
  const Eigen::Vector3d u = x.head<3>().normalized();
  Eigen::Index axis = 0;
  u.cwiseAbs().minCoeff(&axis);
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
  const Eigen::Vector3d t1 = e.cross(u).normalized();
  const Eigen::Vector3d t2 = u.cross(t1);
  Eigen::MatrixXd frame(3, 2);
  frame.col(0) = t1;
  frame.col(1) = t2;
  return frame;
}

std::vector<AnalyticMode> AnalyticManifold::modes(int count) const {
  if (count < 0) throw InvalidArgument("mode count must be non-negative");
  std::vector<AnalyticMode> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 0) return out;
  if (kind_ == AnalyticKind::kSphere) {
    const double r2 = params_[0] * params_[0];
    for (int l = 0; static_cast<int>(out.size()) < count; ++l) {
      for (int m = -l; m <= l && static_cast<int>(out.size()) < count; ++m) {
        AnalyticMode mode;
        mode.eigenvalue = l * (l + 1.0) / r2;
        mode.degree = l;
        mode.order = m;
        out.push_back(mode);
      }
    }
    return out;
  }

  // Circle and torus: enumerate lattice vectors below a growing cutoff.
  const int n = dimension();
  double amax = *std::max_element(params_.begin(), params_.end());
  double cutoff = std::pow(2.0 * kPi / amax, 2) * std::max(4.0, static_cast<double>(count));
  for (;;) {
    std::vector<AnalyticMode> found;
    std::vector<int> bound(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      bound[static_cast<std::size_t>(j)] =
          static_cast<int>(std::floor(params_[static_cast<std::size_t>(j)] * std::sqrt(cutoff) / (2.0 * kPi))) + 1;
    }
    std::vector<int> k(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
    for (;;) {
      // Canonical representative of +-k: first non-zero component positive.
      int first = 0;
      for (int v : k) {
        if (v != 0) {
          first = v;
          break;
        }
      }
      double lam = 0.0;
      for (int j = 0; j < n; ++j) {
        const double w = 2.0 * kPi * k[static_cast<std::size_t>(j)] / params_[static_cast<std::size_t>(j)];
        lam += w * w;
      }
      if (first >= 0 && lam <= cutoff) {
        AnalyticMode mode;
        mode.eigenvalue = lam;
        mode.lattice = k;
        found.push_back(mode);
        if (first > 0) {
          mode.sine = true;
          found.push_back(mode);
        }
      }
      int j = n - 1;
      while (j >= 0 && k[static_cast<std::size_t>(j)] == bound[static_cast<std::size_t>(j)]) {
        k[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
        --j;
      }
      if (j < 0) break;
      ++k[static_cast<std::size_t>(j)];
    }
    if (static_cast<int>(found.size()) >= count) {
      std::stable_sort(found.begin(), found.end(), [](const AnalyticMode& a, const AnalyticMode& b) {
        if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
        // Lattice vectors ordered by descending components so (1,0) precedes (0,1).
        if (a.lattice != b.lattice) return a.lattice > b.lattice;
        return !a.sine && b.sine;
      });
      found.resize(static_cast<std::size_t>(count));
      return found;
    }
    cutoff *= 2.0;
  }
}

std::vector<double> AnalyticManifold::eigenvalues(int count) const {
  std::vector<double> out;
  for (const auto& m : modes(count)) out.push_back(m.eigenvalue);
  return out;
}

Eigen::VectorXd AnalyticManifold::evaluate(std::span<const AnalyticMode> modes,
                                           const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes.size()));
  if (kind_ == AnalyticKind::kSphere) {
    int lmax = 0;
    for (const auto& m : modes) lmax = std::max(lmax, m.degree);
    const double radius = params_[0];
    const Eigen::Vector3d u = x.head<3>().normalized();
    const auto sh = solid_harmonics<double>(lmax, u.x(), u.y(), u.z());
    for (std::size_t i = 0; i < modes.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = sh[static_cast<std::size_t>(sh_index(modes[i].degree, modes[i].order))] / radius;
    }
    return out;
  }
  const double amp = std::sqrt(2.0 / volume());
  const double constant = 1.0 / std::sqrt(volume());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    double phase = 0.0;
    bool zero = true;
    for (std::size_t j = 0; j < m.lattice.size(); ++j) {
      phase += 2.0 * kPi * m.lattice[j] * x[static_cast<Eigen::Index>(j)] / params_[j];
      zero = zero && m.lattice[j] == 0;
    }
    out[static_cast<Eigen::Index>(i)] = zero ? constant : amp * (m.sine ? std::sin(phase) : std::cos(phase));
  }
  return out;
}

Eigen::MatrixXd AnalyticManifold::gradients(std::span<const AnalyticMode> modes,
                                            const Eigen::VectorXd& x) const {
  const int amb = ambient_dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(amb, static_cast<Eigen::Index>(modes.size()));
  if (kind_ == AnalyticKind::kSphere) {
    int lmax = 0;
    for (const auto& m : modes) lmax = std::max(lmax, m.degree);
    const double radius = params_[0];
    const Eigen::Vector3d u = x.head<3>().normalized();
    using C = std::complex<double>;
    constexpr double h = 1e-30;
    Eigen::MatrixXd euclid(3, static_cast<Eigen::Index>(modes.size()));
    for (int d = 0; d < 3; ++d) {
      C cx(u.x(), d == 0 ? h : 0.0);
      C cy(u.y(), d == 1 ? h : 0.0);
      C cz(u.z(), d == 2 ? h : 0.0);
      const auto sh = solid_harmonics<C>(lmax, cx, cy, cz);
      for (std::size_t i = 0; i < modes.size(); ++i) {
        euclid(d, static_cast<Eigen::Index>(i)) =
            sh[static_cast<std::size_t>(sh_index(modes[i].degree, modes[i].order))].imag() / h;
      }
    }
    const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - u * u.transpose();
    out = proj * euclid / (radius * radius);
    return out;
  }
  const double amp = std::sqrt(2.0 / volume());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    double phase = 0.0;
    for (std::size_t j = 0; j < m.lattice.size(); ++j) {
      phase += 2.0 * kPi * m.lattice[j] * x[static_cast<Eigen::Index>(j)] / params_[j];
    }
    const double d = m.sine ? amp * std::cos(phase) : -amp * std::sin(phase);
    for (std::size_t j = 0; j < m.lattice.size(); ++j) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d * 2.0 * kPi * m.lattice[j] / params_[j];
    }
  }
  return out;
}

bool AnalyticManifold::exact_sup_norms(const std::vector<AnalyticMode>& modes,
                                       Eigen::VectorXd& value_sup,
                                       Eigen::VectorXd& gradient_sup) const {
  if (kind_ == AnalyticKind::kSphere) return false;
  value_sup.resize(static_cast<Eigen::Index>(modes.size()));
  gradient_sup.resize(static_cast<Eigen::Index>(modes.size()));
  const double amp = std::sqrt(2.0 / volume());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    double w2 = 0.0;
    for (std::size_t j = 0; j < modes[i].lattice.size(); ++j) {
      const double w = 2.0 * kPi * modes[i].lattice[j] / params_[j];
      w2 += w * w;
    }
    value_sup[static_cast<Eigen::Index>(i)] = w2 == 0.0 ? 1.0 / std::sqrt(volume()) : amp;
    gradient_sup[static_cast<Eigen::Index>(i)] = amp * std::sqrt(w2);
  }
  return true;
}

AnalyticManifold::Sample AnalyticManifold::quadrature_sample(int resolution) const {
  if (resolution < 2) throw InvalidArgument("quadrature resolution must be >= 2");
  Sample s;
  if (kind_ == AnalyticKind::kSphere) {
    const double r = params_[0];
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre(resolution, nodes, weights);
    const int nphi = 2 * resolution;
    s.weights.resize(static_cast<Eigen::Index>(resolution) * nphi);
    Eigen::Index idx = 0;
    for (int i = 0; i < resolution; ++i) {
      const double z = nodes[static_cast<std::size_t>(i)];
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * kPi * j / nphi;
        Eigen::VectorXd p(3);
        p << r * rho * std::cos(phi), r * rho * std::sin(phi), r * z;
        s.points.push_back(p);
        s.weights[idx++] = r * r * weights[static_cast<std::size_t>(i)] * 2.0 * kPi / nphi;
      }
    }
    return s;
  }
  const int n = dimension();
  const double amax = *std::max_element(params_.begin(), params_.end());
  std::vector<int> counts(static_cast<std::size_t>(n));
  Eigen::Index total = 1;
  for (int j = 0; j < n; ++j) {
    counts[static_cast<std::size_t>(j)] =
        std::max(4, static_cast<int>(std::lround(resolution * params_[static_cast<std::size_t>(j)] / amax)));
    total *= counts[static_cast<std::size_t>(j)];
  }
  const double w = volume() / static_cast<double>(total);
  s.weights = Eigen::VectorXd::Constant(total, w);
  s.points.reserve(static_cast<std::size_t>(total));
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (Eigen::Index c = 0; c < total; ++c) {
    Eigen::VectorXd p(n);
    for (int j = 0; j < n; ++j) {
      p[j] = params_[static_cast<std::size_t>(j)] * idx[static_cast<std::size_t>(j)] / counts[static_cast<std::size_t>(j)];
    }
    s.points.push_back(p);
    // First coordinate varies slowest: points sharing a base coordinate are contiguous.
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < counts[static_cast<std::size_t>(j)]) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
  return s;
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0, p1 = x;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace spectral_embed
