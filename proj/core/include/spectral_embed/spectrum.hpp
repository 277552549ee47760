#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/eigensolver.hpp"
#include "spectral_embed/error.hpp"
#include "spectral_embed/manifold.hpp"
#include "spectral_embed/report.hpp"

namespace spectral_embed {

/// Ascending eigenvalues of -Laplacian with L2-orthonormal eigenfunctions.
///
/// Mesh spectra store eigenvectors (one column per eigenfunction, vertex
/// values, mass-orthonormal); analytic spectra store closed-form modes. Both
/// evaluate values and tangential gradients at manifold points.
class Spectrum {
 public:
  static Spectrum from_mesh(ManifoldHandle manifold, EigenResult eig);
  static Spectrum from_analytic(ManifoldHandle manifold, int count);

  const ManifoldHandle& manifold() const { return manifold_; }
  int count() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  double volume() const { return manifold_.volume(); }
  int dimension() const { return manifold_.dimension(); }

  /// Eigenfunctions 0..count-1 at p.
  Eigen::VectorXd values(const Point& p, int count) const;
  /// Tangential gradients (ambient_dimension x count) at p.
  Eigen::MatrixXd gradients(const Point& p, int count) const;
  /// Values of eigenfunctions 0..count-1 at every sample (samples x count).
  Eigen::MatrixXd sample_values(int count) const;

  /// Mesh eigenvectors (vertices x count); throws for analytic spectra.
  const Eigen::MatrixXd& vectors() const;
  const std::vector<AnalyticMode>& modes() const { return modes_; }
  /// A copy with eigenvalue k replaced (for fault-injection in tests).
  Spectrum with_eigenvalue(int k, double value) const;

 private:
  ManifoldHandle manifold_;
  Eigen::VectorXd eigenvalues_;
  std::shared_ptr<const Eigen::MatrixXd> vectors_;  // shared so copies stay cheap
  std::vector<AnalyticMode> modes_;
};

/// Solves for the `count` smallest eigenpairs: numerically on meshes,
/// in closed form on analytic manifolds.
Spectrum compute_spectrum(const ManifoldHandle& manifold, int count,
                          const EigensolverOptions& options = {});

/// CSV `k,lambda`.
std::string eigenvalues_csv(const Spectrum& spectrum);
/// CSV `vertex,value` for eigenfunction k on the sample.
std::string eigenfunction_csv(const Spectrum& spectrum, int k);

/// Unit-ball volume in R^n.
double unit_ball_volume(int n);

/// Geometric constants used by the spectral and heat-kernel bounds.
struct GeometryBounds {
  int n = 1;
  double kappa = 0.0;            // Ricci lower-bound parameter
  double iota = 0.0;             // injectivity radius
  double volume = 0.0;           // volume bound V
  double faber_krahn = 0.0;      // a(n)
  double trace_constant = 0.0;   // C(n)
  double gradient_constant = 0.0;  // D(n)
  std::optional<double> harmonic_radius;  // r_h

  /// Defaults a(n) = n * omega_n^(2/n), C(n) = D(n) = 2^n.
  static GeometryBounds defaults(int n, double iota, double volume);
  void validate() const;
  double require_rh() const;
  /// Constants as `key=value` lines so every report states what it used.
  KeyValueReport describe() const;
};

/// Eigenvalue growth lower bound (n/2e) a(n) (k / (C(n) V))^(2/n).
struct GrowthRow {
  int k = 0;
  double lambda = 0.0;
  double bound = 0.0;
  bool applicable = false;
  bool pass = true;
};
struct GrowthReport {
  double threshold = 0.0;  // smallest k at which the bound applies
  std::vector<GrowthRow> rows;
  bool all_pass = true;
  std::string csv() const;
  KeyValueReport summary() const;
};
GrowthReport eigen_growth_check(const Spectrum& spectrum, const GeometryBounds& bounds);

/// Ratios ||phi_k||_inf / lambda_k^(n/4) and ||grad phi_k||_inf / lambda_k^((n+2)/4), k >= 1.
struct SupBoundRow {
  int k = 0;
  double lambda = 0.0;
  double value_sup = 0.0;
  double gradient_sup = 0.0;
  double value_ratio = 0.0;
  double gradient_ratio = 0.0;
};
struct SupBoundReport {
  std::vector<SupBoundRow> rows;
  double value_constant = 0.0;     // max value ratio
  double gradient_constant = 0.0;  // max gradient ratio
  double constant() const { return std::max(value_constant, gradient_constant); }
  std::string csv() const;
  KeyValueReport summary() const;
};
SupBoundReport eigenfunction_sup_bounds(const Spectrum& spectrum);

/// Certified truncation index: smallest N with tail bound
/// C^2 * sum_{k>N} f(lambda_hat_k) < eps. See truncation_tail for f.
struct TruncationResult {
  int n0 = 0;
  double tail = 0.0;  // bound at n0
  double constant = 0.0;
};
/// Thrown when the tail bound cannot be met with the available eigenpairs.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& message, double partial_tail)
      : Error(message), partial_tail_(partial_tail) {}
  double partial_tail() const { return partial_tail_; }

 private:
  double partial_tail_;
};
TruncationResult truncation_index(const Spectrum& spectrum, double t, double eps,
                                  const GeometryBounds& bounds,
                                  std::optional<double> sup_constant = std::nullopt);
/// The tail bound C^2 sum_{k>N} f(lambda_hat_k) itself.
double truncation_tail(const Spectrum& spectrum, int n_cut, double t, const GeometryBounds& bounds,
                       double sup_constant);

}  // namespace spectral_embed
