// SPDX-License-Identifier: Apache-2.0
#include "molspec/separable_robin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molspec {

namespace {

constexpr double kPi = std::numbers::pi;

// bisect f on (lo, hi) with f(lo) < 0 < f(hi), to 1e-12 relative
template <class F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IntervalBc IntervalBc::robin(double gamma) {
  if (!(gamma >= 0)) throw std::invalid_argument("IntervalBc: Robin constant must be nonnegative");
  if (std::isinf(gamma)) return dirichlet();
  return {Kind::Robin, gamma};
}

double robin_root(double length, double gamma) {
  if (!(length > 0)) throw std::invalid_argument("robin_root: length must be positive");
  if (!(gamma >= 0)) throw std::invalid_argument("robin_root: gamma must be nonnegative");
  if (gamma == 0) return 0;
  const double mu_max = (kPi / (2 * length)) * (kPi / (2 * length));
  if (std::isinf(gamma)) return mu_max;
  const double hi = mu_max * (1 - 1e-15);
  auto f = [&](double mu) {
    const double x = std::sqrt(mu);
    return x * std::tan(x * length) - gamma;
  };
  return bisect(f, 0.0, hi);
}

double interval_ground_eigenvalue(const RobinInterval& interval) {
  const double l = interval.length;
  if (!(l > 0)) throw std::invalid_argument("interval_ground_eigenvalue: length must be positive");

  using K = IntervalBc::Kind;
  auto norm = [](IntervalBc bc) {
    if (bc.kind == K::Robin && bc.gamma == 0) return IntervalBc::neumann();
    if (bc.kind == K::Robin && std::isinf(bc.gamma)) return IntervalBc::dirichlet();
    return bc;
  };
  IntervalBc a = norm(interval.left);
  IntervalBc b = norm(interval.right);
  if (static_cast<int>(a.kind) > static_cast<int>(b.kind)) std::swap(a, b);  // order N < R < D

  if (a.kind == K::Neumann && b.kind == K::Neumann) return 0;
  if (a.kind == K::Neumann && b.kind == K::Robin) return robin_root(l, b.gamma);
  if (a.kind == K::Neumann && b.kind == K::Dirichlet) return (kPi / (2 * l)) * (kPi / (2 * l));
  if (a.kind == K::Dirichlet && b.kind == K::Dirichlet) return (kPi / l) * (kPi / l);
  if (a.kind == K::Robin && b.kind == K::Dirichlet) {
    // u = cos(x t) + (g/x) sin(x t), u(l) = 0; unique root in (pi/2l, pi/l)
    const double g = a.gamma;
    auto f = [&](double x) { return -(x * std::cos(x * l) + g * std::sin(x * l)); };
    const double x = bisect(f, (kPi / (2 * l)) * (1 + 1e-14), (kPi / l) * (1 - 1e-15));
    return x * x;
  }
  // Robin-Robin: x cos(x l)(g0 + g1) + (g0 g1 - x^2) sin(x l) = 0 in (0, pi/l)
  const double g0 = a.gamma, g1 = b.gamma;
  auto f = [&](double x) {
    return -((g0 + g1) * x * std::cos(x * l) + (g0 * g1 - x * x) * std::sin(x * l));
  };
  const double x = bisect(f, 1e-12 / l, (kPi / l) * (1 - 1e-15));
  return x * x;
}

double mu_square(double a, double gamma) { return 2 * robin_root(a, gamma); }

double mu_hat3(double a, double gamma, double d) {
  if (!(a > 0) || !(a < d)) throw std::invalid_argument("mu_hat3: need 0 < a < d");
  return robin_root(d - a, gamma);
}

double mu_triangle_dirichlet_limit(double eta, double delta, double d) {
  if (!(eta > 1)) throw std::invalid_argument("mu_triangle_dirichlet_limit: need eta > 1");
  if (!(delta >= 0) || !(delta < d / 2))
    throw std::invalid_argument("mu_triangle_dirichlet_limit: need 0 <= delta < d/2");
  const double l2 = d * (1 - 1 / eta) + 2 * delta / eta;
  return 2 * kPi * kPi / (l2 * l2);
}

}  // namespace molspec
