#include "spectral_embed/charts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double gamma_E(const Eigen::VectorXd& x, double t, const Eigen::VectorXd& y) {
  if (!(t > 0.0)) throw InvalidArgument("gamma_E needs t > 0");
  const double n = static_cast<double>(x.size());
  return std::pow(4.0 * kPi * t, -n / 2.0) * std::exp(-(x - y).squaredNorm() / (4.0 * t));
}

double gamma_E(double x, double t, double y) {
  return gamma_E(Eigen::VectorXd::Constant(1, x), t, Eigen::VectorXd::Constant(1, y));
}

ChartSpec identity_chart(int n, double radius) {
  ChartSpec spec;
  spec.n = n;
  spec.a = [n](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(n, n); };
  spec.radius = radius;
  spec.name = "identity";
  return spec;
}

ChartSpec constant_chart(int n, double c, double radius) {
  if (!(c > 0.0)) throw InvalidArgument("constant chart coefficient must be positive");
  ChartSpec spec;
  spec.n = n;
  spec.a = [n, c](const Eigen::VectorXd&) -> Eigen::MatrixXd { return c * Eigen::MatrixXd::Identity(n, n); };
  spec.Q = std::max(c, 1.0 / c);
  spec.radius = radius;
  spec.name = "constant";
  return spec;
}

ChartSpec bump_chart(int n, double q_minus_one, double width, double alpha, const Eigen::VectorXd& center,
                     double radius) {
  if (!(q_minus_one >= 0.0) || !(width > 0.0) || !(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("bump chart needs Q - 1 >= 0, width > 0 and alpha in (0, 1]");
  }
  if (center.size() != n) throw InvalidArgument("bump centre has the wrong dimension");
  // C^alpha seminorm of the unit Gaussian profile, measured along a line
  // through the centre where the supremum is attained.
  const int samples = 1601;
  std::vector<double> r(samples);
  std::vector<double> b(samples);
  for (int i = 0; i < samples; ++i) {
    r[i] = -8.0 * width + 16.0 * width * i / (samples - 1);
    b[i] = std::exp(-r[i] * r[i] / (2.0 * width * width));
  }
  double s0 = 0.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = i + 1; j < samples; ++j) s0 = std::max(s0, std::abs(b[i] - b[j]) / std::pow(r[j] - r[i], alpha));
  }
  const double amplitude = 1.0 / std::max(1.0, s0 * (1.0 + 1e-6));
  ChartSpec spec;
  spec.n = n;
  spec.Q = 1.0 + q_minus_one;
  spec.alpha = alpha;
  spec.holder = q_minus_one * amplitude * s0;
  spec.radius = radius;
  spec.name = "gaussian";
  spec.a = [n, q_minus_one, width, amplitude, center](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double bump = amplitude * std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
    return (1.0 + q_minus_one * bump) * Eigen::MatrixXd::Identity(n, n);
  };
  return spec;
}

Grid::Grid(int n_, double half_width_, double h_) : n(n_), half_width(half_width_), h(h_) {
  if (n < 1 || n > 2) throw InvalidArgument("grids support n = 1 or n = 2");
  if (!(half_width > 0.0) || !(h > 0.0)) throw InvalidArgument("grid needs positive half width and spacing");
  const double cells = 2.0 * half_width / h;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
    throw InvalidArgument("grid spacing must divide the box width");
  }
  side_ = static_cast<Eigen::Index>(std::llround(cells)) + 1;
  if (side_ < 3) throw InvalidArgument("grid needs at least one interior node");
}

Eigen::Index Grid::size() const { return n == 1 ? side_ : side_ * side_; }

Eigen::VectorXd Grid::node(Eigen::Index index) const {
  Eigen::VectorXd x(n);
  x[0] = -half_width + static_cast<double>(index % side_) * h;
  if (n == 2) x[1] = -half_width + static_cast<double>(index / side_) * h;
  return x;
}

Eigen::Index Grid::nearest(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw InvalidArgument("point dimension does not match the grid");
  Eigen::Index index = 0;
  Eigen::Index stride = 1;
  for (int d = 0; d < n; ++d) {
    const auto i = static_cast<Eigen::Index>(std::llround((x[d] + half_width) / h));
    if (i < 0 || i >= side_) throw InvalidArgument("point lies outside the grid box");
    index += i * stride;
    stride *= side_;
  }
  return index;
}

bool Grid::is_boundary(Eigen::Index index) const {
  const Eigen::Index i = index % side_;
  if (i == 0 || i == side_ - 1) return true;
  if (n == 2) {
    const Eigen::Index j = index / side_;
    if (j == 0 || j == side_ - 1) return true;
  }
  return false;
}

bool Grid::same_as(const Grid& other) const {
  return n == other.n && side_ == other.side_ && std::abs(h - other.h) <= 1e-12 * h &&
         std::abs(half_width - other.half_width) <= 1e-12 * half_width;
}

ChartValidation validate_chart(const ChartSpec& spec, const Grid& grid) {
  if (spec.n != grid.n) throw InvalidArgument("chart and grid dimensions differ");
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::MatrixXd> coeffs;
  ChartValidation out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd x = grid.node(i);
    if (x.norm() > spec.radius) continue;
    const Eigen::MatrixXd a = spec.a(x);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    out.min_eigenvalue = std::min(out.min_eigenvalue, eig.eigenvalues().minCoeff());
    out.max_eigenvalue = std::max(out.max_eigenvalue, eig.eigenvalues().maxCoeff());
    points.push_back(x);
    coeffs.push_back(a);
  }
  if (points.empty()) throw InvalidArgument("no grid node inside the chart ball");
  if (out.min_eigenvalue < 1.0 / spec.Q - 1e-12 || out.max_eigenvalue > spec.Q + 1e-12) {
    throw InvalidArgument("coefficients violate the ellipticity bound Q = " + format_double(spec.Q));
  }
  // Pairwise seminorm on a subsample of at most ~1500 nodes.
  const std::size_t stride = std::max<std::size_t>(1, points.size() / 1500);
  for (std::size_t i = 0; i < points.size(); i += stride) {
    for (std::size_t j = i + stride; j < points.size(); j += stride) {
      const Eigen::MatrixXd diff = coeffs[i] - coeffs[j];
      const double norm = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(diff).eigenvalues().cwiseAbs().maxCoeff();
      out.measured_holder = std::max(out.measured_holder, norm / std::pow((points[i] - points[j]).norm(), spec.alpha));
    }
  }
  if (out.measured_holder > spec.Q - 1.0 + 1e-8) {
    throw InvalidArgument("measured C^alpha seminorm " + format_double(out.measured_holder) + " exceeds Q - 1");
  }
  return out;
}

double frozen_kernel_Z(const Eigen::VectorXd& x, double t, const Eigen::VectorXd& y, const ChartSpec& spec) {
  if (!(t > 0.0)) throw InvalidArgument("frozen kernel needs t > 0");
  const Eigen::MatrixXd upper = spec.a(y);
  const double det_upper = upper.determinant();
  if (!(std::abs(det_upper) > 1e-14)) throw InvalidArgument("coefficient matrix a(y) is singular");
  const Eigen::MatrixXd lower = upper.inverse();
  const Eigen::VectorXd z = x - y;
  const double n = static_cast<double>(spec.n);
  return std::sqrt(1.0 / det_upper) / (std::pow(2.0 * std::sqrt(kPi), n) * std::pow(t, n / 2.0)) *
         std::exp(-z.dot(lower * z) / (4.0 * t));
}

double GridKernel::mass(std::size_t k) const { return values.at(k).sum() * std::pow(grid.h, grid.n); }

Eigen::VectorXd GridKernel::gradient(std::size_t k, Eigen::Index node) const {
  if (grid.is_boundary(node)) throw InvalidArgument("gradient needs an interior node");
  const Eigen::VectorXd& v = values.at(k);
  Eigen::VectorXd g(grid.n);
  Eigen::Index stride = 1;
  for (int d = 0; d < grid.n; ++d) {
    g[d] = (v[node + stride] - v[node - stride]) / (2.0 * grid.h);
    stride *= grid.per_side();
  }
  return g;
}

std::string GridKernel::csv() const {
  std::vector<std::string> header{"x"};
  if (grid.n == 2) header.push_back("y");
  header.push_back("t");
  header.push_back("value");
  CsvTable table(header);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd x = grid.node(i);
      std::vector<std::string> row;
      for (int d = 0; d < grid.n; ++d) row.push_back(format_double(x[d]));
      row.push_back(format_double(times[k]));
      row.push_back(format_double(values[k][i]));
      table.add_row(std::move(row));
    }
  }
  return table.str();
}

GridKernel solve_fd_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y, const FdParams& params) {
  if (spec.n != grid.n) throw InvalidArgument("chart and grid dimensions differ");
  if (!(params.t_max > 0.0) || params.steps < 1 || params.record_every < 1) {
    throw InvalidArgument("FD solve needs t_max > 0, steps >= 1 and record_every >= 1");
  }
  if (params.rannacher_half_steps < 0 || params.rannacher_half_steps % 2 != 0 ||
      params.rannacher_half_steps / 2 > params.steps) {
    throw InvalidArgument("Rannacher start needs an even number of half steps within the step budget");
  }
  const Eigen::Index source = grid.nearest(y);
  if (grid.is_boundary(source)) throw InvalidArgument("FD source must be an interior node");

  // Interior unknowns.
  std::vector<Eigen::Index> unknown(static_cast<std::size_t>(grid.size()), -1);
  std::vector<Eigen::Index> node_of;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!grid.is_boundary(i)) {
      unknown[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(node_of.size());
      node_of.push_back(i);
    }
  }
  const auto m = static_cast<Eigen::Index>(node_of.size());
  const Eigen::Index side = grid.per_side();
  const double h2 = grid.h * grid.h;
  std::vector<Eigen::Triplet<double>> trips;
  auto add = [&](Eigen::Index row, Eigen::Index node, double w) {
    const Eigen::Index col = unknown[static_cast<std::size_t>(node)];
    if (col >= 0) trips.emplace_back(row, col, w);
  };
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = node_of[static_cast<std::size_t>(r)];
    const Eigen::MatrixXd a = spec.a(grid.node(i));
    if (grid.n == 1) {
      add(r, i - 1, a(0, 0) / h2);
      add(r, i, -2.0 * a(0, 0) / h2);
      add(r, i + 1, a(0, 0) / h2);
    } else {
      add(r, i - 1, a(0, 0) / h2);
      add(r, i + 1, a(0, 0) / h2);
      add(r, i - side, a(1, 1) / h2);
      add(r, i + side, a(1, 1) / h2);
      add(r, i, -2.0 * (a(0, 0) + a(1, 1)) / h2);
      const double cross = 2.0 * a(0, 1) / (4.0 * h2);
      add(r, i + 1 + side, cross);
      add(r, i - 1 - side, cross);
      add(r, i + 1 - side, -cross);
      add(r, i - 1 + side, -cross);
    }
  }
  Eigen::SparseMatrix<double> op(m, m);
  op.setFromTriplets(trips.begin(), trips.end());
  const double dt = params.t_max / params.steps;
  Eigen::SparseMatrix<double> identity(m, m);
  identity.setIdentity();
  // Implicit Euler with step dt/2 and the Crank-Nicolson left-hand side share
  // the matrix I - (dt/2) A, so a single factorisation serves both.
  const Eigen::SparseMatrix<double> lhs = identity - 0.5 * dt * op;
  const Eigen::SparseMatrix<double> rhs = identity + 0.5 * dt * op;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) throw ConvergenceError("FD system factorisation failed");

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  u[unknown[static_cast<std::size_t>(source)]] = 1.0 / std::pow(grid.h, grid.n);
  double running_max = u.cwiseAbs().maxCoeff();

  GridKernel out;
  out.grid = grid;
  out.source = grid.node(source);
  auto record = [&](int step) {
    Eigen::VectorXd field = Eigen::VectorXd::Zero(grid.size());
    for (Eigen::Index r = 0; r < m; ++r) field[node_of[static_cast<std::size_t>(r)]] = u[r];
    out.times.push_back(dt * step);
    out.values.push_back(std::move(field));
  };
  auto check = [&](int step) {
    const double peak = u.cwiseAbs().maxCoeff();
    if (!std::isfinite(peak) || peak > 10.0 * running_max) {
      throw ConvergenceError("FD solve unstable at step " + std::to_string(step) + " (t = " +
                             format_double(dt * step) + "): max |u| = " + format_double(peak) +
                             " vs running max " + format_double(running_max));
    }
    running_max = std::max(running_max, peak);
  };

  int step = 0;
  for (int half = 0; half < params.rannacher_half_steps; ++half) {
    u = lu.solve(u);
    if (half % 2 == 1) {
      ++step;
      check(step);
      if (step % params.record_every == 0 || step == params.steps) record(step);
    }
  }
  while (step < params.steps) {
    u = lu.solve(rhs * u);
    ++step;
    check(step);
    if (step % params.record_every == 0 || step == params.steps) record(step);
  }
  return out;
}

GridKernel sample_kernel(const Grid& grid, const Eigen::VectorXd& y, const std::vector<double>& times,
                         const std::function<double(const Eigen::VectorXd&, double)>& kernel) {
  GridKernel out;
  out.grid = grid;
  out.source = y;
  out.times = times;
  for (double t : times) {
    Eigen::VectorXd field(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) field[i] = grid.is_boundary(i) ? 0.0 : kernel(grid.node(i), t);
    out.values.push_back(std::move(field));
  }
  return out;
}

GridKernel euclidean_kernel(const Grid& grid, const Eigen::VectorXd& y, const std::vector<double>& times) {
  return sample_kernel(grid, y, times, [&y](const Eigen::VectorXd& x, double t) { return gamma_E(x, t, y); });
}

GridKernel frozen_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y,
                         const std::vector<double>& times) {
  return sample_kernel(grid, y, times,
                       [&](const Eigen::VectorXd& x, double t) { return frozen_kernel_Z(x, t, y, spec); });
}

namespace {

// Coefficients frozen at a node, padded to 2 x 2 so the inner quadrature
// loops run on fixed-size types (n = 1 uses the leading entry only).
struct Frozen {
  Eigen::Matrix2d upper = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d lower = Eigen::Matrix2d::Zero();
  double sqrt_det = 1.0;
};

Frozen freeze(const Eigen::MatrixXd& a) {
  const double det = a.determinant();
  if (!(std::abs(det) > 1e-14)) throw InvalidArgument("coefficient matrix a(y) is singular");
  Frozen f;
  const auto n = a.rows();
  f.upper.topLeftCorner(n, n) = a;
  f.lower.topLeftCorner(n, n) = a.inverse();
  f.sqrt_det = std::sqrt(1.0 / det);
  return f;
}

Eigen::Vector2d pad(const Eigen::VectorXd& x) {
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  p.head(x.size()) = x;
  return p;
}

double z_value(const Frozen& f, const Eigen::Vector2d& z, double t, int n) {
  return f.sqrt_det / (std::pow(4.0 * kPi * t, n / 2.0)) * std::exp(-z.dot(f.lower * z) / (4.0 * t));
}

// (a(x) - a(eta)) : D^2 Z_eta(x - eta, t), the first parametrix term.
double phi_one(const Frozen& at_x, const Frozen& at_eta, const Eigen::Vector2d& z, double t, int n) {
  const double value = z_value(at_eta, z, t, n);
  if (value == 0.0) return 0.0;
  const Eigen::Vector2d az = at_eta.lower * z;
  const Eigen::Matrix2d hess = value * (az * az.transpose() / (4.0 * t * t) - at_eta.lower / (2.0 * t));
  return ((at_x.upper - at_eta.upper).array() * hess.array()).sum();
}

}  // namespace

Eigen::VectorXd parametrix_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y, double t,
                                  const ParametrixParams& params) {
  if (spec.n != grid.n || y.size() != grid.n) throw InvalidArgument("chart, grid and source dimensions differ");
  if (!(t > 0.0)) throw InvalidArgument("parametrix needs t > 0");
  if (params.depth < 0 || params.time_steps < 1) throw InvalidArgument("parametrix needs depth >= 0 and time_steps >= 1");
  const Eigen::Index size = grid.size();
  const int n = grid.n;
  const Frozen at_y = freeze(spec.a(y));
  const Eigen::Vector2d y2 = pad(y);
  std::vector<Eigen::Vector2d> nodes(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) nodes[static_cast<std::size_t>(i)] = pad(grid.node(i));
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) out[i] = z_value(at_y, nodes[static_cast<std::size_t>(i)] - y2, t, n);
  if (params.depth == 0) return out;

  const int steps = params.time_steps;
  const auto s = static_cast<double>(size);
  const double budget = s * steps + s * s * steps + (params.depth - 1) * s * s * steps * steps / 2.0;
  if (budget > params.max_evaluations) {
    throw InvalidArgument("parametrix quadrature budget exceeded: " + format_double(budget) + " evaluations > " +
                          format_double(params.max_evaluations));
  }
  const double ds = t / steps;
  const double cell = std::pow(grid.h, n);
  std::vector<Frozen> frozen;
  frozen.reserve(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) frozen.push_back(freeze(spec.a(grid.node(i))));
  auto node = [&](Eigen::Index i) -> const Eigen::Vector2d& { return nodes[static_cast<std::size_t>(i)]; };
  auto froz = [&](Eigen::Index i) -> const Frozen& { return frozen[static_cast<std::size_t>(i)]; };

  // phi(m, i): Phi at the midpoint time s_m = (m + 1/2) ds and node i.
  Eigen::MatrixXd first(steps, size);
  for (int m = 0; m < steps; ++m) {
    for (Eigen::Index i = 0; i < size; ++i) first(m, i) = phi_one(froz(i), at_y, node(i) - y2, (m + 0.5) * ds, n);
  }
  Eigen::MatrixXd phi = first;
  Eigen::MatrixXd term = first;
  for (int level = 2; level <= params.depth; ++level) {
    // term_{k+1}(x, s_m) = sum_{m' < m} sum_eta Phi_1(x, s_m - s_m'; eta) term_k(eta, s_m') ds h^n
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(steps, size);
    for (int m = 0; m < steps; ++m) {
      for (int mp = 0; mp < m; ++mp) {
        const double lag = (m - mp) * ds;
        for (Eigen::Index i = 0; i < size; ++i) {
          double acc = 0.0;
          for (Eigen::Index e = 0; e < size; ++e) {
            const double w = term(mp, e);
            if (w != 0.0) acc += phi_one(froz(i), froz(e), node(i) - node(e), lag, n) * w;
          }
          next(m, i) += acc * ds * cell;
        }
      }
    }
    term = next;
    phi += next;
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    double acc = 0.0;
    for (int m = 0; m < steps; ++m) {
      const double lag = t - (m + 0.5) * ds;
      for (Eigen::Index e = 0; e < size; ++e) {
        const double w = phi(m, e);
        if (w != 0.0) acc += z_value(froz(e), node(i) - node(e), lag, n) * w;
      }
    }
    out[i] += acc * ds * cell;
  }
  return out;
}

Closeness closeness_report(const GridKernel& a, const GridKernel& b, const ClosenessRegion& region) {
  if (!a.grid.same_as(b.grid)) throw InvalidArgument("closeness report needs kernels on the same grid");
  if (a.times.size() != b.times.size()) throw InvalidArgument("closeness report needs matching time lists");
  Closeness out;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double t = a.times[k];
    if (std::abs(t - b.times[k]) > 1e-12 * std::max(1.0, t)) {
      throw InvalidArgument("closeness report needs matching time lists");
    }
    if (t < region.t_min || t > region.t_max) continue;
    for (Eigen::Index i = 0; i < a.grid.size(); ++i) {
      if (a.grid.is_boundary(i)) continue;
      const double r = (a.grid.node(i) - a.source).norm();
      if (r > region.max_radius) continue;
      if (region.exclude_parabolic && r < region.exclude_radius && t < region.exclude_time) continue;
      out.value_sup = std::max(out.value_sup, std::abs(a.values[k][i] - b.values[k][i]));
      out.gradient_sup = std::max(out.gradient_sup, (a.gradient(k, i) - b.gradient(k, i)).norm());
      ++out.points;
    }
  }
  return out;
}

double decay_constant(const GridKernel& kernel, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("decay tolerance must lie in (0, 1)");
  double c = 0.0;
  for (std::size_t k = 0; k < kernel.times.size(); ++k) {
    const double t = kernel.times[k];
    const double threshold = 16.0 * t * std::log(1.0 / tol);
    for (Eigen::Index i = 0; i < kernel.grid.size(); ++i) {
      if ((kernel.grid.node(i) - kernel.source).squaredNorm() <= threshold) continue;
      c = std::max(c, std::abs(kernel.values[k][i]) * std::pow(t, kernel.grid.n / 2.0) / tol);
    }
  }
  return c;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs at least two matching points");
  const auto count = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace spectral_embed
