#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_embed/manifold.hpp"
#include "spectral_embed/report.hpp"

namespace spectral_embed {

/// Total solid angle 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
double solid_angle(int n);

/// Ball and sphere volumes in the simply connected model space of constant
/// curvature -Lambda^2.
struct ModelVolumes {
  double ball = 0.0;
  double boundary = 0.0;
};
/// Boundary: Omega_n sinh^{n-1}(Lambda r) / Lambda^{n-1}. Ball: adaptive
/// quadrature of the boundary formula (relative error 1e-10).
ModelVolumes model_volumes(int n, double lambda, double r);
/// Vol_Lambda(B_{k r}) / Vol_Lambda(B_r) as a function of x = Lambda r.
double model_volume_ratio(int n, double x, double k);

/// c(n, Lambda s) = 2^{n-1} cosh^{n-1}(Lambda s / 2).
double segment_constant(int n, double lambda_s);

enum class FForm { kExact, kExplicit };

/// F(n, Lambda r, kappa) from the averaged Hessian bound.
/// Exact: (n-1) x + (n-1)^2 x kappa^2 + r Vol(dB_r)/Vol(B_r) (n-1) kappa.
/// Explicit: the same with the volume term replaced by 2^{n-1} cosh^{n-1}(x/2).
double hessian_bound_F(int n, double lambda_r, double coth_bound, FForm form = FForm::kExact);

/// C(n, Lambda r, Lambda iota) =
/// 6 (12 Vol(B_{4r})/Vol(B_r) c(n, 3 Lambda r) F(n, 3 Lambda r, coth(Lambda iota / 16)))^{1/2}.
double holder_constant_C(int n, double lambda_r, double lambda_iota, FForm form = FForm::kExact);

/// Threshold presets for C (Lambda r)^{1/2} < threshold.
enum class RadiusCondition { kDistance, kHarmonicPre, kHarmonic };
std::string to_string(RadiusCondition condition);
RadiusCondition parse_radius_condition(const std::string& name);
/// 1/(2n), 1/(4n) and 1/n respectively.
double condition_threshold(int n, RadiusCondition condition);

struct CoordinateRadius {
  double r = 0.0;
  /// "cap" when r = iota/64 already satisfies the inequality, else "inequality".
  std::string binding;
  double value = 0.0;  // C (Lambda r)^{1/2} at r
  double threshold = 0.0;
};
/// Largest r <= iota/64 with C(n, Lambda r, Lambda iota) (Lambda r)^{1/2} below
/// the threshold, by bisection to 1e-12 relative. iota may be infinite.
CoordinateRadius coordinate_radius(int n, double lambda, double iota, RadiusCondition condition);
CoordinateRadius coordinate_radius(int n, double lambda, double iota, double threshold);

/// int_r^R int_s^R sinh^{n-1}(Lambda tau) / sinh^{n-1}(Lambda s) dtau ds by
/// nested adaptive quadrature (relative error 1e-8). Infinite for r = 0, n >= 2.
double abresch_gromoll_L(int n, double lambda, double R, double r);

struct ConstantsRow {
  int n = 2;
  double lambda = 1.0;
  double iota = 1.0;
  double r = 0.0;
  double volume_ratio = 0.0;
  double c = 0.0;
  double F = 0.0;
  double F_explicit = 0.0;
  double C = 0.0;
  bool cond_dist = false;
  bool cond_harm = false;
};
ConstantsRow constants_row(int n, double lambda, double iota, double r);
/// CSV `n,Lambda,iota,r,volratio,c,F,C,cond_dist,cond_harm`.
std::string constants_csv(const std::vector<ConstantsRow>& rows);

/// Known data of the test manifold used by the mesh experiments.
struct CoordinateSetup {
  double iota = 1.0;
  /// Curvature scales for the report-only Hoelder comparison.
  std::vector<double> lambdas{1.0};
};

struct DistanceCoordinates {
  Index base = -1;
  double radius = 0.0;
  std::vector<Index> frame_points;
  std::vector<double> frame_distances;
  std::vector<std::vector<double>> rho;  // rho[i][v], infinite outside the computed range
  std::vector<Index> ball;               // vertices with d(p, v) <= r
  std::vector<double> base_distance;     // d(p, v) for every vertex
  std::vector<Index> ball_triangles;     // all corners in the ball
  double gram_min = 0.0;
  double gram_max = 0.0;
  Eigen::MatrixXd gram_at_base;
  double holder_half = 0.0;  // r^{1/2} [g]_{C^{1/2}}
  std::vector<double> lambdas;
  std::vector<double> holder_bounds;  // C(n, Lambda r, Lambda iota) Lambda^{1/2}
  KeyValueReport summary() const;
  /// CSV `vertex,rho_1,...,rho_n` over the ball.
  std::string fields_csv() const;
};

/// Distance functions to frame points at distance iota/4 from p along an
/// orthonormal tangent frame, and their gram field g(grad rho_i, grad rho_j)
/// over B_r(p). Throws MeshError when a frame point cannot be reached.
DistanceCoordinates distance_coordinates_experiment(const ManifoldHandle& manifold, Index base, double radius,
                                                    const CoordinateSetup& setup);

struct HarmonicCoordinates {
  std::vector<Index> interior;
  std::vector<Index> boundary;
  std::vector<Eigen::VectorXd> b;  // per coordinate, indexed by vertex (NaN outside the ball)
  double sup_deviation = 0.0;      // max_i sup |b_i - rho_i| / r
  bool maximum_principle = true;
  Index maximum_principle_violations = 0;
  double gram_min = 0.0;
  double gram_max = 0.0;
  double holder_half = 0.0;
  double holder_09 = 0.0;
  double jacobian_deviation = 0.0;  // sup |db_i/drho_j - delta_ij|
  bool consistent = true;
  KeyValueReport summary() const;
  /// CSV `vertex,b_1,...,b_n` over the ball.
  std::string fields_csv() const;
};

/// Dirichlet problem Delta b_i = 0 inside the ball, b_i = rho_i on the
/// boundary ring (ball vertices with a neighbour outside). Throws
/// ConvergenceError when the system is singular.
HarmonicCoordinates harmonic_coordinates_experiment(const ManifoldHandle& manifold, const DistanceCoordinates& coords);

struct BishopGromovRow {
  double r = 0.0;
  double volume = 0.0;
  double model = 0.0;
  double ratio = 0.0;
};
struct BishopGromovCheck {
  std::vector<BishopGromovRow> rows;
  bool pass = true;
};
/// Vol(B_r(p)) / Vol_Lambda(B_r) on the given radii; passes when each ratio
/// is at most 1.02 times its predecessor.
BishopGromovCheck bishop_gromov_check(const ManifoldHandle& manifold, Index base, double lambda,
                                      const std::vector<double>& radii);

struct LaplacianDistanceCheck {
  Index checked = 0;
  Index excluded = 0;
  Index violations = 0;
  double worst_ratio = 0.0;  // max |Delta rho| / bound
  bool pass = true;
};
/// |Delta rho| <= (n-1) Lambda coth(Lambda rho) (1 + slack) at vertices with
/// 3 h <= rho <= max_rho that are at least two edges away from a ridge of the
/// distance field.
LaplacianDistanceCheck laplacian_distance_check(const ManifoldHandle& manifold, Index source, double lambda,
                                                double max_rho, double slack = 0.2);

}  // namespace spectral_embed
