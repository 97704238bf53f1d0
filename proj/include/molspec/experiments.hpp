// experiments.hpp
// Drivers for the spectral experiments: ground states of the random
// molecule, classification of the discrete spectrum against the essential
// bottom pi^2/(2 d^2), truncation/refinement convergence studies,
// Monte-Carlo estimates of the persistence and destruction probabilities,
// the analytic destruction threshold gamma(d), and the rectangle-scaling
// property harnesses.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "molspec/assembly.hpp"
#include "molspec/eigensolve.hpp"
#include "molspec/geometry.hpp"
#include "molspec/randomness.hpp"

namespace molspec {

double essential_bottom(double d);  // pi^2 / (2 d^2)

enum class SpectrumClass { NonEmpty, Empty, Undecided };

const char* to_string(SpectrumClass cls);

// Default safety margin: 5% of the essential bottom, absorbing the
// discretization bias that the algebraic error bound cannot see.
double default_tau(double d);

// NonEmpty when even the upper bound plus margins sits below the essential
// bottom; Empty when the computed value clears it with margin (advisory
// only: computed eigenvalues are upper bounds, so Empty is recorded with a
// truncation caveat, never as a certificate); Undecided otherwise.
SpectrumClass classify_discrete(double e0, double error_bar, double d, double tau);

struct GroundStateResult {
  StripSpec spec;
  AtomConfiguration config;          // as supplied
  std::vector<double> snapped_atoms; // after grid snapping and merging
  double snap_error = 0;
  SpectralResult spectral;
  double error_bar = 0;              // algebraic bound on the lowest value

  double e0() const { return spectral.eigenvalues.front(); }
};

GroundStateResult ground_state(const StripSpec& spec, const AtomConfiguration& config,
                               const SigmaAssignment& sigma, const SolveOptions& opt = {});

struct ConvergenceRow {
  double L;
  int M;
  double e0;
  int count_below_lo = 0;  // eigenvalues below essential bottom - epsilon
  int count_below_hi = 0;  // ... below essential bottom + epsilon
};

struct ConvergenceStudy {
  std::vector<double> L_list;
  std::vector<int> M_list;
  std::vector<ConvergenceRow> rows;  // L-major, M-minor
  double extrapolated = 0;           // Richardson in h at the largest L
  double error_bar = 0;              // |E(h_min) - extrapolated| + truncation gap
  double slope = 0;                  // log-log fit of E(h) - extrapolated
  bool monotone_in_L = true;
  bool monotone_in_M = true;
  double count_epsilon = 0.5;

  const ConvergenceRow& row(std::size_t li, std::size_t mi) const;
};

ConvergenceStudy convergence_study(double d, const AtomConfiguration& config,
                                   const SigmaAssignment& sigma, const std::vector<double>& L_list,
                                   const std::vector<int>& M_list, double count_epsilon = 0.5);

struct WilsonInterval {
  double lo = 0;
  double hi = 0;
};

// 95% two-sided score interval by default (z = Phi^-1(0.975))
WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct McSample {
  int index = 0;
  std::uint64_t stream_seed = 0;
  std::vector<double> atoms;
  std::vector<double> snapped_atoms;
  double e0 = 0;
  double error_bar = 0;
  SpectrumClass classification = SpectrumClass::Undecided;
  int n_dof = 0;
  int iterations = 0;
  bool solver_failed = false;
  std::string failure = {};
};

struct McParams {
  double nu = 1;
  double d = 1;
  double L = 6;
  int M = 16;
  int n_samples = 200;
  std::uint64_t master_seed = 0;
  double tau = -1;  // negative: use default_tau(d)
  int jobs = 1;
  SolveOptions solve = {};
};

struct McResult {
  McParams params;
  SigmaAssignment sigma;
  std::vector<McSample> samples;
  int n_nonempty = 0, n_empty = 0, n_undecided = 0;
  WilsonInterval ci_nonempty, ci_empty, ci_undecided;
};

// One independent stream per sample index; aggregation is by index, so the
// result is identical for any job count.
McResult mc_probability(const McParams& params, const SigmaAssignment& sigma);

struct DestructionCheck {
  double d, a_k, gamma, L;
  int M;
  double eta, delta;
  bool in_window = false;          // a_k within [(1/eta)(d/2-delta), d/2-delta]
  double snapped_a = 0;
  double mu1 = 0;                  // square, analytic
  double mu2_fem = 0;              // corner triangle, FEM
  double mu_hat3 = 0;              // rectangle bound for the trapezoid pair
  double min_mu = 0;
  bool analytic_all_above = false; // min over subdomains clears the bottom
  double e0 = 0;
  double error_bar = 0;
  SpectrumClass classification = SpectrumClass::Undecided;
  bool chain_consistent = false;   // bounds above => classification not NonEmpty
};

DestructionCheck verify_destruction_config(double d, double a_k, double gamma, double L, int M,
                                           double eta = 1.1, double delta = -1,
                                           int triangle_cells = 32);

struct ThresholdEstimate {
  double d, eta, delta;
  std::vector<double> a_grid;
  double gamma_hat = 0;
  std::array<double, 4> margins{};          // min over a of mu_l(gamma_hat/2, a) - bottom
  std::array<double, 4> margins_at_half{};  // same quantity at gamma_hat/2
};

// Smallest gamma (up to bisection tolerance) for which every subdomain
// ground value mu_l(gamma/2, a) clears the essential bottom across the
// atom window; throws if even the Dirichlet limits fail (eta too large or
// delta too large for the construction).
ThresholdEstimate estimate_gamma(double d, double eta = 1.05, double delta = -1,
                                 int a_grid_points = 9, int triangle_cells = 24);

struct PropertyCheck {
  int trials = 0;
  int violations = 0;
  double max_violation = 0;  // worst signed violation observed (0 when none)
};

// Randomized verification that the Rayleigh quotient of a Robin rectangle
// does not increase when the rectangle is stretched by alpha, beta >= 1
// (check_prop_scaling_up), respectively drops by at most lambda^2 when one
// direction shrinks by beta > lambda (check_prop_scaling_mixed).
PropertyCheck check_prop_scaling_up(int trials, std::uint64_t seed, double tolerance = 1e-10);
PropertyCheck check_prop_scaling_mixed(int trials, std::uint64_t seed, double tolerance = 1e-10);

// FEM ground value of the tagged polygon problem; small-problem helper used
// by the destruction machinery and the analytics cross-checks.
double polygon_ground_eigenvalue(const PolygonSpec& spec, const SolveOptions& opt = {});

}  // namespace molspec
