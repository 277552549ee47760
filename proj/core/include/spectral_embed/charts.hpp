#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/report.hpp"

namespace spectral_embed {

/// Euclidean heat kernel (4 pi t)^{-n/2} exp(-|x-y|^2 / 4t) with n = x.size().
double gamma_E(const Eigen::VectorXd& x, double t, const Eigen::VectorXd& y);
double gamma_E(double x, double t, double y);

/// Coefficient field a^{ij}(x) of the operator u_t - a^{ij} d_i d_j u on a ball.
struct ChartSpec {
  int n = 1;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> a;
  double Q = 1.0;
  double alpha = 0.5;
  /// C^alpha seminorm of a (operator norm of differences), at most Q - 1.
  double holder = 0.0;
  double radius = 8.0;
  std::string name;
};

/// a = I.
ChartSpec identity_chart(int n, double radius = 8.0);
/// a = c I; Q = max(c, 1/c).
ChartSpec constant_chart(int n, double c, double radius = 8.0);
/// a = (1 + (Q-1) b(x)) I with b a Gaussian bump of the given width centred
/// at `center`, rescaled (only downwards) so that [b]_alpha <= 1.
ChartSpec bump_chart(int n, double q_minus_one, double width, double alpha, const Eigen::VectorXd& center,
                     double radius = 8.0);

/// Uniform grid on the box [-half_width, half_width]^n; boundary nodes carry
/// the Dirichlet value 0. Node 0 is the corner, first coordinate fastest.
struct Grid {
  int n = 1;
  double half_width = 8.0;
  double h = 0.05;

  Grid() = default;
  Grid(int n, double half_width, double h);
  Eigen::Index per_side() const { return side_; }
  Eigen::Index size() const;
  Eigen::VectorXd node(Eigen::Index index) const;
  Eigen::Index nearest(const Eigen::VectorXd& x) const;
  bool is_boundary(Eigen::Index index) const;
  bool same_as(const Grid& other) const;

 private:
  Eigen::Index side_ = 0;
};

struct ChartValidation {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double measured_holder = 0.0;
};
/// Checks Q^{-1} I <= a <= Q I at every grid node inside the ball and that the
/// measured C^alpha seminorm is at most Q - 1 (within 1e-8). Throws
/// InvalidArgument otherwise.
ChartValidation validate_chart(const ChartSpec& spec, const Grid& grid);

/// sqrt(det a_ij(y)) / ((2 sqrt(pi))^n t^{n/2}) exp(-a_ij(y) (x-y)^i (x-y)^j / 4t)
/// with (a_ij) the matrix inverse of (a^{ij}). Throws InvalidArgument when
/// a(y) is singular.
double frozen_kernel_Z(const Eigen::VectorXd& x, double t, const Eigen::VectorXd& y, const ChartSpec& spec);

/// Kernel values on a grid for a fixed source at a list of times.
struct GridKernel {
  Grid grid;
  Eigen::VectorXd source;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;  // one field per time

  /// Grid-cell sum of the field at time index k.
  double mass(std::size_t k) const;
  /// Central-difference gradient at an interior node.
  Eigen::VectorXd gradient(std::size_t k, Eigen::Index node) const;
  /// CSV `x[,y],t,value`.
  std::string csv() const;
};

struct FdParams {
  double t_max = 1.0;
  int steps = 1024;
  /// Store a snapshot every this many steps.
  int record_every = 16;
  /// Implicit Euler half-steps before Crank-Nicolson (damps the delta start).
  int rannacher_half_steps = 4;
};

/// Numerical fundamental solution: discrete delta (mass 1/h^n at the node
/// nearest to y) evolved by u_t = a^{ij} d_i d_j u with centred differences
/// (9-point stencil for n = 2) and Dirichlet zero data. Throws
/// ConvergenceError if a value exceeds 10 times the running maximum.
GridKernel solve_fd_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y, const FdParams& params);

/// Closed-form kernels sampled on a grid.
GridKernel sample_kernel(const Grid& grid, const Eigen::VectorXd& y, const std::vector<double>& times,
                         const std::function<double(const Eigen::VectorXd&, double)>& kernel);
GridKernel euclidean_kernel(const Grid& grid, const Eigen::VectorXd& y, const std::vector<double>& times);
GridKernel frozen_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y,
                         const std::vector<double>& times);

struct ParametrixParams {
  int depth = 1;
  /// Midpoint-rule nodes on (0, t).
  int time_steps = 64;
  /// Upper bound on kernel evaluations; exceeding it throws InvalidArgument.
  double max_evaluations = 2e8;
};

/// Z + int_0^t int Z(x, t-s; xi) Phi(xi, s; y) dxi ds with Phi the first
/// `depth` terms of sum_k (LZ)_k. Depth 0 returns Z. Values on the grid nodes.
Eigen::VectorXd parametrix_kernel(const ChartSpec& spec, const Grid& grid, const Eigen::VectorXd& y, double t,
                                  const ParametrixParams& params = {});

/// Space-time window for kernel comparisons. With exclude_parabolic set, the
/// cylinder |x - y| < exclude_radius, t < exclude_time is left out.
struct ClosenessRegion {
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  double max_radius = std::numeric_limits<double>::infinity();
  bool exclude_parabolic = true;
  double exclude_radius = 0.5;
  double exclude_time = 0.25;
};
struct Closeness {
  double value_sup = 0.0;
  double gradient_sup = 0.0;
  Eigen::Index points = 0;
};
/// sup |A - B| and sup |grad A - grad B| over interior nodes of the region.
/// Both kernels must share the grid and the time list.
Closeness closeness_report(const GridKernel& a, const GridKernel& b, const ClosenessRegion& region);

/// max |value| t^{n/2} / tol over nodes with |x - y|^2 > 16 t log(1/tol); 0
/// when no node qualifies.
double decay_constant(const GridKernel& kernel, double tol);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ChartStudyConfig {
  int n = 1;
  double half_width = 8.0;
  /// Grid convergence study for a = I.
  std::vector<double> spacings{0.1, 0.05, 0.025};
  double t_compare = 0.25;
  /// Ellipticity sweep.
  std::vector<double> q_minus_one{0.02, 0.04, 0.08};
  std::string bump = "gaussian";
  double bump_width = 1.0;
  double alpha = 0.5;
  double sweep_spacing = 0.025;
  double t_max = 1.0;
  int steps = 1024;
  double window_min = 0.0625;
  /// Parametrix comparison.
  int depth = 1;
  double parametrix_q_minus_one = 0.05;
  double parametrix_t = 0.5;
  double parametrix_spacing = 0.05;
  int parametrix_time_steps = 64;
  double decay_tol = 1e-6;
};

struct ChartStudyResult {
  std::vector<double> convergence_errors;
  std::vector<double> convergence_ratios;
  bool convergence_pass = false;
  std::vector<double> sweep_value_sups;
  std::vector<double> sweep_gradient_sups;
  double slope = 0.0;
  double gradient_slope = 0.0;
  bool slope_pass = false;
  double parametrix_error = 0.0;  // sup |parametrix - FD|
  double frozen_error = 0.0;      // sup |Z - FD|
  bool parametrix_pass = false;
  double gradient_sup_excluded = 0.0;
  double gradient_sup_included = 0.0;
  double decay_constant = 0.0;
  bool pass() const { return convergence_pass && slope_pass && parametrix_pass; }
  KeyValueReport summary() const;
  /// CSV `q_minus_one,value_sup,gradient_sup`.
  std::string sweep_csv(const ChartStudyConfig& config) const;
};
ChartStudyResult run_chart_study(const ChartStudyConfig& config);

}  // namespace spectral_embed
