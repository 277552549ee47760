#pragma once

#include <Eigen/Core>

#include "spectral_embed/laplacian.hpp"

namespace spectral_embed {

struct EigensolverOptions {
  /// Shift for shift-invert. The stiffness matrix is singular (constants are
  /// in its kernel), so the default shift is slightly negative: -1/V^(2/n)
  /// scaled by `shift_scale`, with V the total mass.
  double shift_scale = 1.0;
  /// Converged when ||S phi - lambda M phi||_{M^-1} <= tolerance * (1 + lambda)
  /// for M-normalised phi.
  double tolerance = 1e-10;
  int max_restarts = 500;
  /// Krylov subspace size; 0 picks max(2 * count + 20, count + 40).
  int subspace = 0;
  /// Intrinsic dimension used for the default shift.
  int dimension = 2;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns M-orthonormal
  int restarts = 0;
  double max_residual = 0.0;
};

/// Smallest `count` eigenpairs of S phi = lambda M phi (M diagonal) by a
/// restarted shift-invert Lanczos iteration with full reorthogonalisation.
///
/// Deterministic: fixed start vector, sign convention (first entry with
/// magnitude above 1e-12 of the column max is positive) and, inside
/// numerically degenerate clusters, lexicographic order of the sign-fixed
/// vectors. Throws ConvergenceError if the restart budget is exhausted.
EigenResult solve_generalized(const SparseMatrix& stiffness, const Eigen::VectorXd& mass, int count,
                              const EigensolverOptions& options = {});

}  // namespace spectral_embed
