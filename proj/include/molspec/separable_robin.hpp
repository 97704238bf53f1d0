// separable_robin.hpp
// Closed-form and transcendental-root machinery for Robin eigenvalues on
// intervals and their tensor products on rectangles: the comparison
// quantities used when a single strong interaction line near the corner
// wipes out the bound state.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>

namespace molspec {

struct IntervalBc {
  enum class Kind { Neumann, Robin, Dirichlet };
  Kind kind = Kind::Neumann;
  double gamma = 0;  // Robin only; Robin(0) is identical to Neumann

  static IntervalBc neumann() { return {Kind::Neumann, 0}; }
  static IntervalBc robin(double gamma);  // gamma = +inf degrades to Dirichlet
  static IntervalBc dirichlet() { return {Kind::Dirichlet, 0}; }
};

struct RobinInterval {
  double length = 1;
  IntervalBc left = IntervalBc::neumann();
  IntervalBc right = IntervalBc::neumann();
};

// Lowest eigenvalue of -u'' on the interval with the given endpoint
// conditions (outward Robin convention u' . n + gamma u = 0).
double interval_ground_eigenvalue(const RobinInterval& interval);

// Neumann-left / Robin-right ground eigenvalue: the unique root of
// sqrt(mu) tan(sqrt(mu) l) = gamma with sqrt(mu) l in (0, pi/2), located by
// bisection in mu over (0, (pi/2l)^2) to 1e-12 relative accuracy.
// gamma = 0 gives 0; gamma = +inf gives (pi/2l)^2.
double robin_root(double length, double gamma);

// Square [0,a]^2, Neumann on the axes, Robin(gamma) on x=a and y=a;
// separates into two interval problems.
double mu_square(double a, double gamma);

// Rectangle [0,a] x [a, 2d-a], Robin(gamma) on y=a and y=2d-a, Neumann
// elsewhere; by symmetry a Neumann-Robin interval of length d-a.
double mu_hat3(double a, double gamma, double d);

// Dirichlet-leg limit for the corner triangle with legs
// l2 = d(1 - 1/eta) + 2 delta / eta: equals 2 pi^2 / l2^2.
double mu_triangle_dirichlet_limit(double eta, double delta, double d);

}  // namespace molspec
