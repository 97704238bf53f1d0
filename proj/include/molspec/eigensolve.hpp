// eigensolve.hpp
// Lowest eigenpairs of the sparse symmetric generalized problem
// A u = lambda M u (A positive semidefinite, M positive definite), with
// per-pair certified residuals. Small problems go through a dense
// factorization that doubles as the oracle for the iterative path; counting
// eigenvalues below a shift is exposed separately through LDL^T inertia.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "molspec/assembly.hpp"

namespace molspec {

enum class SolveMethod { Dense, ShiftInvert };

const char* to_string(SolveMethod method);

struct SpectralResult {
  std::vector<double> eigenvalues;         // ascending
  Eigen::MatrixXd eigenvectors;            // n_dof x m, M-orthonormal columns
  std::vector<double> residuals;           // |Au - lMu| / (|Au| + |l||Mu|)
  std::vector<double> value_error_bounds;  // |Au - lMu|_{M^-1}: distance to some eigenvalue
  SolveMethod method = SolveMethod::Dense;
  int iterations = 0;
  int n_dof = 0;
};

struct SolveOptions {
  int m = 1;                          // number of eigenpairs
  double tol = 1e-10;                 // residual tolerance
  int dense_threshold = 2000;         // dense path for n_dof at or below this
  int max_iterations = 500;
  int block_extra = 4;                // extra subspace vectors beyond m
  std::optional<SolveMethod> force_method;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SpectralResult solve_lowest(const SparseMat& A, const SparseMat& M, const SolveOptions& opt = {});

double rayleigh_quotient(const SparseMat& A, const SparseMat& M, const Eigen::VectorXd& u);

// Number of eigenvalues strictly below `shift` (Sylvester inertia of
// A - shift*M). Shifts landing on an eigenvalue are nudged; the shift
// actually used is reported when requested.
int eigencount_below(const SparseMat& A, const SparseMat& M, double shift,
                     double* effective_shift = nullptr);

// Interval [lo, hi] containing the k-th smallest eigenvalue (k is 1-based),
// bracketed from the Neumann lower bound 0 by inertia bisection.
std::pair<double, double> bracket_eigenvalue(const SparseMat& A, const SparseMat& M, int k,
                                             double rel_tol = 1e-8);

}  // namespace molspec
