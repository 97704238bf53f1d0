// Shared test oracles, independent of the library implementation paths they
// check: incidence census, statistics thresholds, quadrature helpers.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "molspec/geometry.hpp"

namespace molspec::testing {

// how many triangles touch each undirected edge
inline std::map<std::pair<int, int>, int> edge_use_count(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  return count;
}

// Kolmogorov-Smirnov statistic of `samples` against the Exponential(nu) CDF
inline double ks_statistic_exponential(std::vector<double> samples, double nu) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-nu * samples[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return d;
}

// two-sided KS critical value at significance alpha (asymptotic)
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2)) / std::sqrt(static_cast<double>(n));
}

// chi-square upper critical value via the Wilson-Hilferty cube approximation
inline double chi_square_critical(int dof, double z_upper) {
  const double t = 2.0 / (9.0 * dof);
  const double u = 1.0 - t + z_upper * std::sqrt(t);
  return dof * u * u * u;
}

// exponent of the z-quantile for p = 0.999 (one-sided)
inline constexpr double kZ999 = 3.090232306167813;

// P1 interpolant gradient on one triangle from vertex values (affine fit)
inline std::array<double, 2> p1_gradient(const Vec2& p0, const Vec2& p1, const Vec2& p2, double v0,
                                         double v1, double v2) {
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  const double gx = ((v1 - v0) * (p2.y - p0.y) - (v2 - v0) * (p1.y - p0.y)) / det;
  const double gy = ((v2 - v0) * (p1.x - p0.x) - (v1 - v0) * (p2.x - p0.x)) / det;
  return {gx, gy};
}

}  // namespace molspec::testing
