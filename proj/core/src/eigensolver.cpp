#include "spectral_embed/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

constexpr Eigen::Index kDenseLimit = 400;

// Fixed pseudo-random vector in [-1, 1). mt19937_64 output is specified
// exactly by the standard, so this is identical on every platform.
Eigen::VectorXd start_vector(Eigen::Index n, std::uint64_t stream) {
  std::mt19937_64 gen(5489u + stream);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
  }
  return v;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double cutoff = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

// Sign convention plus reproducible ordering inside numerically degenerate clusters.
void canonicalize(EigenResult& r) {
  const Eigen::Index k = r.values.size();
  for (Eigen::Index j = 0; j < k; ++j) fix_sign(r.vectors.col(j));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return r.values[a] < r.values[b]; });
  Eigen::Index begin = 0;
  while (begin < k) {
    Eigen::Index end = begin + 1;
    while (end < k) {
      const double lo = r.values[order[static_cast<std::size_t>(end - 1)]];
      const double hi = r.values[order[static_cast<std::size_t>(end)]];
      if (hi - lo > 1e-8 * (1.0 + std::abs(hi))) break;
      ++end;
    }
    std::sort(order.begin() + begin, order.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
      const auto& va = r.vectors.col(a);
      const auto& vb = r.vectors.col(b);
      for (Eigen::Index i = 0; i < va.size(); ++i) {
        if (va[i] != vb[i]) return va[i] > vb[i];
      }
      return a < b;
    });
    begin = end;
  }
  EigenResult sorted;
  sorted.values.resize(k);
  sorted.vectors.resize(r.vectors.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    sorted.values[j] = r.values[order[static_cast<std::size_t>(j)]];
    sorted.vectors.col(j) = r.vectors.col(order[static_cast<std::size_t>(j)]);
  }
  sorted.restarts = r.restarts;
  sorted.max_residual = r.max_residual;
  r = std::move(sorted);
}

// ||S phi - lambda M phi||_{M^-1} for M-normalised phi.
double residual(const SparseMatrix& s, const Eigen::VectorXd& mass, const Eigen::VectorXd& phi,
                double lambda) {
  const Eigen::VectorXd r = s * phi - lambda * mass.cwiseProduct(phi);
  return std::sqrt(r.cwiseAbs2().cwiseQuotient(mass).sum());
}

EigenResult solve_dense(const SparseMatrix& s, const Eigen::VectorXd& mass, int count) {
  const Eigen::VectorXd d = mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd a = d.asDiagonal() * Eigen::MatrixXd(s) * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  EigenResult r;
  r.values = eig.eigenvalues().head(count);
  r.vectors = d.asDiagonal() * eig.eigenvectors().leftCols(count);
  for (int j = 0; j < count; ++j) {
    r.max_residual = std::max(r.max_residual, residual(s, mass, r.vectors.col(j), r.values[j]));
  }
  return r;
}

}  // namespace

EigenResult solve_generalized(const SparseMatrix& stiffness, const Eigen::VectorXd& mass, int count,
                              const EigensolverOptions& options) {
  const Eigen::Index n = stiffness.rows();
  if (stiffness.cols() != n || mass.size() != n) throw InvalidArgument("eigensolver: size mismatch");
  if (count < 1 || count >= n) {
    throw InvalidArgument("eigenpair count must be in [1, " + std::to_string(n - 1) + "], got " +
                          std::to_string(count));
  }
  if ((mass.array() <= 0.0).any()) throw InvalidArgument("eigensolver: mass must be positive");

  EigenResult result;
  if (n <= kDenseLimit) {
    result = solve_dense(stiffness, mass, count);
    canonicalize(result);
    return result;
  }

  const double total_mass = mass.sum();
  const double sigma = -options.shift_scale / std::pow(total_mass, 2.0 / options.dimension);
  SparseMatrix shifted = stiffness;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * mass[i];
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw ConvergenceError("eigensolver: factorisation failed");

  const Eigen::VectorXd msqrt = mass.cwiseSqrt();
  // y -> M^1/2 (S - sigma M)^-1 M^1/2 y, symmetric with eigenvalues 1/(lambda - sigma).
  auto apply = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return msqrt.cwiseProduct(factor.solve(msqrt.cwiseProduct(y)));
  };

  const int m = static_cast<int>(std::min<Eigen::Index>(
      n, options.subspace > 0 ? options.subspace : std::max(2 * count + 20, count + 40)));
  const int keep = std::min(m - 1, count + (m - count) / 3);

  Eigen::MatrixXd q(n, m + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  q.col(0) = start_vector(n, 0).normalized();
  int kept = 0;
  std::uint64_t stream = 1;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = kept; j < m; ++j) {
      Eigen::VectorXd w = apply(q.col(j));
      Eigen::VectorXd proj = q.leftCols(j + 1).transpose() * w;
      w -= q.leftCols(j + 1) * proj;
      const Eigen::VectorXd again = q.leftCols(j + 1).transpose() * w;
      w -= q.leftCols(j + 1) * again;
      proj += again;
      for (int i = kept; i <= j; ++i) {
        h(i, j) = proj[i];
        h(j, i) = proj[i];
      }
      if (j == kept) {
        for (int i = 0; i < kept; ++i) {
          h(i, j) = proj[i];
          h(j, i) = proj[i];
        }
      }
      beta = w.norm();
      if (beta <= 1e-13 * std::max(1.0, std::abs(h(j, j)))) {
        // Invariant subspace: continue with a fresh direction.
        w = start_vector(n, stream++);
        for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
        q.col(j + 1) = w.normalized();
        beta = 0.0;
      } else {
        q.col(j + 1) = w / beta;
      }
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw ConvergenceError("eigensolver: projected problem failed");
    // Largest theta first.
    Eigen::MatrixXd s = eig.eigenvectors().rowwise().reverse();
    Eigen::VectorXd theta = eig.eigenvalues().reverse();
    Eigen::MatrixXd ritz = q.leftCols(m) * s.leftCols(keep);

    bool converged = true;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      const Eigen::VectorXd phi = ritz.col(i).cwiseQuotient(msqrt);
      const double lambda = phi.dot(stiffness * phi);
      const double res = residual(stiffness, mass, phi, lambda);
      worst = std::max(worst, res);
      if (res > options.tolerance * (1.0 + std::abs(lambda))) converged = false;
    }
    if (converged) {
      result.values.resize(count);
      result.vectors.resize(n, count);
      for (int i = 0; i < count; ++i) {
        Eigen::VectorXd phi = ritz.col(i).cwiseQuotient(msqrt);
        phi /= std::sqrt(phi.dot(mass.cwiseProduct(phi)));
        result.vectors.col(i) = phi;
        result.values[i] = phi.dot(stiffness * phi);
      }
      result.restarts = restart;
      result.max_residual = worst;
      canonicalize(result);
      return result;
    }
    if (restart == options.max_restarts) {
      throw ConvergenceError("eigensolver did not converge after " + std::to_string(options.max_restarts) +
                             " restarts (worst residual " + std::to_string(worst) + ")");
    }

    // Thick restart: keep the leading Ritz vectors and the residual direction.
    const Eigen::VectorXd next = q.col(m);
    q.leftCols(keep) = ritz;
    q.col(keep) = next;
    h.setZero();
    for (int i = 0; i < keep; ++i) {
      h(i, i) = theta[i];
      h(keep, i) = h(i, keep) = beta * s(m - 1, i);
    }
    kept = keep;
  }
  throw ConvergenceError("eigensolver did not converge");
}

}  // namespace spectral_embed
