// SPDX-License-Identifier: Apache-2.0
#include "molspec/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "molspec/randomness.hpp"

namespace molspec {

const char* to_string(SolveMethod method) {
  return method == SolveMethod::Dense ? "dense" : "shift_invert";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double matrix_scale(const SparseMat& A, const SparseMat& M) {
  const double ta = A.diagonal().sum();
  const double tm = M.diagonal().sum();
  return (tm > 0 && ta > 0) ? ta / tm : 1.0;
}

// residual and Weinstein bound for one Ritz pair
void certify(const SparseMat& A, const SparseMat& M,
             const Eigen::SimplicialLLT<SparseMat>& M_llt, const VectorXd& u, double lambda,
             double& residual, double& bound) {
  const VectorXd Au = A * u;
  const VectorXd Mu = M * u;
  const VectorXd r = Au - lambda * Mu;
  const double denom = Au.norm() + std::abs(lambda) * Mu.norm();
  residual = denom > 0 ? r.norm() / denom : r.norm();
  const double rMinv = std::sqrt(std::max(0.0, r.dot(M_llt.solve(r))));
  const double uM = std::sqrt(std::max(0.0, u.dot(Mu)));
  bound = uM > 0 ? rMinv / uM : rMinv;
}

SpectralResult solve_dense(const SparseMat& A, const SparseMat& M, const SolveOptions& opt) {
  const auto n = A.rows();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(MatrixXd(A), MatrixXd(M),
                                                        Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("dense generalized eigensolver failed (mass matrix not positive definite?)");

  SpectralResult res;
  res.method = SolveMethod::Dense;
  res.iterations = 1;
  res.n_dof = static_cast<int>(n);
  const int m = std::min<int>(opt.m, static_cast<int>(n));
  res.eigenvectors = es.eigenvectors().leftCols(m);
  res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);

  Eigen::SimplicialLLT<SparseMat> M_llt(M);
  res.residuals.resize(m);
  res.value_error_bounds.resize(m);
  for (int i = 0; i < m; ++i)
    certify(A, M, M_llt, res.eigenvectors.col(i), res.eigenvalues[i], res.residuals[i],
            res.value_error_bounds[i]);
  return res;
}

// deterministic starting block
MatrixXd seed_block(Eigen::Index n, int p) {
  SplitMix64 rng(0x6d6f6c73706563ull ^ (static_cast<std::uint64_t>(n) << 16) ^
                 static_cast<std::uint64_t>(p));
  MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = 2.0 * rng.next_open01() - 1.0;
  return X;
}

struct ShiftedFactor {
  Eigen::SimplicialLDLT<SparseMat> ldlt;
  double shift = 0;

  // factor A - s M, nudging s slightly if a pivot collapses
  bool factor(const SparseMat& A, const SparseMat& M, double s, double scale) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      const SparseMat S = A - s * M;
      ldlt.compute(S);
      if (ldlt.info() == Eigen::Success) {
        const auto& D = ldlt.vectorD();
        const double dmax = D.cwiseAbs().maxCoeff();
        if (dmax > 0 && D.cwiseAbs().minCoeff() > 1e-14 * dmax) {
          shift = s;
          return true;
        }
      }
      s -= (std::abs(s) + scale) * 1e-9 * (attempt + 1);
    }
    return false;
  }
};

SpectralResult solve_iterative(const SparseMat& A, const SparseMat& M, const SolveOptions& opt) {
  const auto n = A.rows();
  const int m = std::min<int>(opt.m, static_cast<int>(n));
  const int p = std::min<int>(static_cast<int>(n), m + std::max(1, opt.block_extra));
  const double scale = matrix_scale(A, M);

  Eigen::SimplicialLLT<SparseMat> M_llt(M);
  if (M_llt.info() != Eigen::Success)
    throw SolverError("mass matrix factorization failed: M is not positive definite");

  ShiftedFactor factor;
  if (!factor.factor(A, M, -1e-3 * scale, scale))
    throw SolverError("shift-invert factorization failed at the initial negative shift");

  MatrixXd X = seed_block(n, p);
  VectorXd theta = VectorXd::Zero(p);
  SpectralResult res;
  res.method = SolveMethod::ShiftInvert;
  res.n_dof = static_cast<int>(n);

  int iter = 0;
  bool converged = false;
  while (iter < opt.max_iterations && !converged) {
    ++iter;
    // one block of shift-inverted power steps, M-orthonormalized
    MatrixXd Y = factor.ldlt.solve(M * X);
    MatrixXd G = Y.transpose() * (M * Y);
    Eigen::LLT<MatrixXd> chol(G);
    if (chol.info() != Eigen::Success) {
      // block lost rank; re-seed the offending directions deterministically
      Y += 1e-8 * seed_block(n, p);
      G = Y.transpose() * (M * Y);
      chol.compute(G);
      if (chol.info() != Eigen::Success)
        throw SolverError("subspace orthonormalization failed (rank-deficient block)");
    }
    Y = chol.matrixU().solve<Eigen::OnTheRight>(Y);

    // Rayleigh-Ritz on the block
    const MatrixXd Ah = Y.transpose() * (A * Y);
    const MatrixXd Mh = Y.transpose() * (M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> small(Ah, Mh,
                                                             Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (small.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz projection failed");
    X = Y * small.eigenvectors();
    theta = small.eigenvalues();

    double worst = 0;
    for (int i = 0; i < m; ++i) {
      double r, b;
      certify(A, M, M_llt, X.col(i), theta(i), r, b);
      worst = std::max(worst, r);
    }
    converged = worst <= opt.tol;

    // once the Ritz values have settled, refactor close below the target
    // cluster; the closer shift makes the remaining iterations contract fast
    if (!converged && (iter == 6 || iter % 40 == 0)) {
      const double spread = std::max(theta(p - 1) - theta(0), 1e-6 * (std::abs(theta(0)) + scale));
      const double s_new = theta(0) - 0.1 * spread;
      if (s_new > factor.shift + 1e-12 * scale) {
        const double s_old = factor.shift;
        if (!factor.factor(A, M, s_new, scale) && !factor.factor(A, M, s_old, scale))
          throw SolverError("shift-invert refactorization failed");
      }
    }
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "eigensolver did not converge in " << opt.max_iterations << " iterations (n_dof=" << n
        << ", m=" << m << ")";
    throw SolverError(msg.str());
  }

  res.iterations = iter;
  res.eigenvectors = X.leftCols(m);
  res.eigenvalues.assign(theta.data(), theta.data() + m);
  res.residuals.resize(m);
  res.value_error_bounds.resize(m);
  for (int i = 0; i < m; ++i)
    certify(A, M, M_llt, res.eigenvectors.col(i), res.eigenvalues[i], res.residuals[i],
            res.value_error_bounds[i]);
  return res;
}

}  // namespace

SpectralResult solve_lowest(const SparseMat& A, const SparseMat& M, const SolveOptions& opt) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw std::invalid_argument("solve_lowest: matrix sizes disagree");
  if (A.rows() == 0) throw std::invalid_argument("solve_lowest: empty problem");
  if (opt.m < 1) throw std::invalid_argument("solve_lowest: need m >= 1");

  SolveMethod method = opt.force_method.value_or(
      A.rows() <= opt.dense_threshold ? SolveMethod::Dense : SolveMethod::ShiftInvert);
  return method == SolveMethod::Dense ? solve_dense(A, M, opt) : solve_iterative(A, M, opt);
}

double rayleigh_quotient(const SparseMat& A, const SparseMat& M, const Eigen::VectorXd& u) {
  const double uMu = u.dot(M * u);
  if (!(uMu > 0)) throw std::invalid_argument("rayleigh_quotient: vector is zero");
  return u.dot(A * u) / uMu;
}

int eigencount_below(const SparseMat& A, const SparseMat& M, double shift,
                     double* effective_shift) {
  const double scale = matrix_scale(A, M);
  double s = shift;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::SimplicialLDLT<SparseMat> ldlt(A - s * M);
    if (ldlt.info() == Eigen::Success) {
      const auto& D = ldlt.vectorD();
      const double dmax = D.cwiseAbs().maxCoeff();
      if (dmax > 0 && D.cwiseAbs().minCoeff() > 1e-12 * dmax) {
        if (effective_shift) *effective_shift = s;
        int count = 0;
        for (Eigen::Index i = 0; i < D.size(); ++i)
          if (D(i) < 0) ++count;
        return count;
      }
    }
    // the shift grazed an eigenvalue: nudge and retry
    s += (std::abs(shift) + scale) * 4e-12 * static_cast<double>(1 << attempt);
  }
  throw SolverError("eigencount_below: factorization kept hitting near-singular shifts");
}

std::pair<double, double> bracket_eigenvalue(const SparseMat& A, const SparseMat& M, int k,
                                             double rel_tol) {
  if (k < 1 || k > A.rows()) throw std::invalid_argument("bracket_eigenvalue: bad index");
  const double scale = matrix_scale(A, M);
  double lo = 0;
  double hi = std::max(scale * 1e-3, 1e-6);
  for (int i = 0; i < 80 && eigencount_below(A, M, hi) < k; ++i) hi *= 2;
  if (eigencount_below(A, M, hi) < k)
    throw SolverError("bracket_eigenvalue: failed to bracket from above");
  while (hi - lo > rel_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (eigencount_below(A, M, mid) >= k)
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

}  // namespace molspec
