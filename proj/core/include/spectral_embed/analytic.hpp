#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectral_embed {

enum class AnalyticKind { kCircle, kSphere, kFlatTorus };

std::string to_string(AnalyticKind kind);
AnalyticKind parse_analytic_kind(const std::string& name);

/// One closed-form eigenpair of -Laplacian on an analytic manifold.
///
/// Circle and torus modes are cos/sin(2 pi <k, x / a>) for a lattice vector
/// k; sphere modes are real spherical harmonics of degree l and order m.
struct AnalyticMode {
  double eigenvalue = 0.0;
  std::vector<int> lattice;  // circle / torus
  int degree = 0;            // sphere: l
  int order = 0;             // sphere: m in [-l, l]; negative means sine
  bool sine = false;         // circle / torus
};

/// Closed manifold with exact geodesics, volume and spectrum: the circle of
/// circumference L, the round sphere of radius R, or the flat torus with
/// periods (a_1, ..., a_n).
///
/// Points are ambient coordinates: arclength in [0, L) for the circle,
/// R^n (taken modulo the periods) for the torus, and a point of R^3 on the
/// sphere of radius R.
class AnalyticManifold {
 public:
  static AnalyticManifold circle(double circumference);
  static AnalyticManifold sphere(double radius);
  static AnalyticManifold flat_torus(std::vector<double> periods);
  /// Circle: {L}; sphere: {R}; torus: {a_1, ..., a_n}. Throws InvalidArgument
  /// for non-positive parameters.
  static AnalyticManifold make(AnalyticKind kind, const std::vector<double>& params);

  AnalyticKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  int dimension() const;
  int ambient_dimension() const;
  double volume() const;
  double diameter() const;
  double injectivity_radius() const;

  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// Columns form an orthonormal basis of the tangent space at x.
  Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& x) const;

  /// The first `count` modes in ascending eigenvalue order; ties are ordered
  /// by lattice vector / (l, m) and cos before sin.
  std::vector<AnalyticMode> modes(int count) const;
  std::vector<double> eigenvalues(int count) const;

  /// Values of the given L2-normalised modes at x.
  Eigen::VectorXd evaluate(std::span<const AnalyticMode> modes, const Eigen::VectorXd& x) const;
  /// Tangential gradients (ambient_dimension x modes.size()).
  Eigen::MatrixXd gradients(std::span<const AnalyticMode> modes, const Eigen::VectorXd& x) const;

  /// Exact sup norms of mode values and gradients where a closed form exists
  /// (circle, torus). Returns false for the sphere.
  bool exact_sup_norms(const std::vector<AnalyticMode>& modes, Eigen::VectorXd& value_sup,
                       Eigen::VectorXd& gradient_sup) const;

  /// Quadrature nodes and weights. Circle and torus: uniform grids with
  /// `resolution` nodes along the longest period (exact for trigonometric
  /// polynomials of lower degree). Sphere: Gauss-Legendre in cos(theta) with
  /// `resolution` nodes times 2*resolution uniform longitudes.
  struct Sample {
    std::vector<Eigen::VectorXd> points;
    Eigen::VectorXd weights;
  };
  Sample quadrature_sample(int resolution) const;

 private:
  AnalyticManifold(AnalyticKind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}

  AnalyticKind kind_;
  std::vector<double> params_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace spectral_embed
