// SPDX-License-Identifier: Apache-2.0
#include "molspec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "molspec/separable_robin.hpp"

namespace molspec {

double essential_bottom(double d) {
  if (!(d > 0)) throw std::invalid_argument("essential_bottom: d must be positive");
  return std::numbers::pi * std::numbers::pi / (2 * d * d);
}

const char* to_string(SpectrumClass cls) {
  switch (cls) {
    case SpectrumClass::NonEmpty: return "NONEMPTY";
    case SpectrumClass::Empty: return "EMPTY";
    case SpectrumClass::Undecided: return "UNDECIDED";
  }
  return "?";
}

double default_tau(double d) { return 0.05 * essential_bottom(d); }

SpectrumClass classify_discrete(double e0, double error_bar, double d, double tau) {
  if (!(error_bar >= 0)) throw std::invalid_argument("classify_discrete: error bar must be >= 0");
  if (!(tau >= 0)) throw std::invalid_argument("classify_discrete: tau must be >= 0");
  const double bottom = essential_bottom(d);
  if (e0 + error_bar + tau < bottom) return SpectrumClass::NonEmpty;
  if (e0 - error_bar - tau > bottom) return SpectrumClass::Empty;
  return SpectrumClass::Undecided;
}

GroundStateResult ground_state(const StripSpec& spec, const AtomConfiguration& config,
                               const SigmaAssignment& sigma, const SolveOptions& opt) {
  const SnapResult snap = snap_atoms(config.atoms, spec.pitch());
  const SigmaAssignment merged = sigma.merged(snap.merged_index, snap.atoms.size());
  const TriMesh mesh = build_strip_mesh(spec, snap.atoms);
  const AssembledForms forms = assemble_hamiltonian(mesh, merged);

  GroundStateResult result{spec, config, snap.atoms, snap.max_error, {}, 0};
  result.spectral = solve_lowest(forms.operator_matrix(), forms.M, opt);
  result.error_bar = result.spectral.value_error_bounds.front();
  return result;
}

const ConvergenceRow& ConvergenceStudy::row(std::size_t li, std::size_t mi) const {
  return rows.at(li * M_list.size() + mi);
}

ConvergenceStudy convergence_study(double d, const AtomConfiguration& config,
                                   const SigmaAssignment& sigma, const std::vector<double>& L_list,
                                   const std::vector<int>& M_list, double count_epsilon) {
  if (L_list.empty() || M_list.empty())
    throw std::invalid_argument("convergence_study: empty refinement lists");
  if (!std::is_sorted(L_list.begin(), L_list.end()) || !std::is_sorted(M_list.begin(), M_list.end()))
    throw std::invalid_argument("convergence_study: refinement lists must ascend");

  ConvergenceStudy study;
  study.L_list = L_list;
  study.M_list = M_list;
  study.count_epsilon = count_epsilon;
  const double bottom = essential_bottom(d);

  for (double L : L_list) {
    for (std::size_t mi = 0; mi < M_list.size(); ++mi) {
      const StripSpec spec(d, L, M_list[mi]);
      ConvergenceRow row{L, M_list[mi], 0, 0, 0};
      const SnapResult snap = snap_atoms(config.atoms, spec.pitch());
      const SigmaAssignment merged = sigma.merged(snap.merged_index, snap.atoms.size());
      const TriMesh mesh = build_strip_mesh(spec, snap.atoms);
      const AssembledForms forms = assemble_hamiltonian(mesh, merged);
      const SparseMat A = forms.operator_matrix();
      SolveOptions opt;
      row.e0 = solve_lowest(A, forms.M, opt).eigenvalues.front();
      if (mi + 1 == M_list.size()) {
        row.count_below_lo = eigencount_below(A, forms.M, bottom - count_epsilon);
        row.count_below_hi = eigencount_below(A, forms.M, bottom + count_epsilon);
      }
      study.rows.push_back(row);
    }
  }

  const auto nm = M_list.size();
  const auto nl = L_list.size();
  auto e0 = [&](std::size_t li, std::size_t mi) { return study.rows[li * nm + mi].e0; };

  for (std::size_t mi = 0; mi < nm && study.monotone_in_L; ++mi)
    for (std::size_t li = 1; li < nl; ++li)
      if (e0(li, mi) > e0(li - 1, mi) + 1e-8 * std::abs(e0(li - 1, mi))) study.monotone_in_L = false;
  for (std::size_t li = 0; li < nl && study.monotone_in_M; ++li)
    for (std::size_t mi = 1; mi < nm; ++mi)
      if (e0(li, mi) > e0(li, mi - 1) + 1e-8 * std::abs(e0(li, mi - 1))) study.monotone_in_M = false;

  // Richardson in h from the two finest meshes at the largest L
  if (nm >= 2) {
    const double hf = d / M_list[nm - 1], hc = d / M_list[nm - 2];
    const double ef = e0(nl - 1, nm - 1), ec = e0(nl - 1, nm - 2);
    study.extrapolated = (hc * hc * ef - hf * hf * ec) / (hc * hc - hf * hf);
    study.error_bar = std::abs(ef - study.extrapolated);
  } else {
    study.extrapolated = e0(nl - 1, 0);
    study.error_bar = 0;
  }
  if (nl >= 2) study.error_bar += std::abs(e0(nl - 1, nm - 1) - e0(nl - 2, nm - 1));

  // least-squares slope of log(E(h) - E*) against log h at the largest L
  std::vector<double> xs, ys;
  for (std::size_t mi = 0; mi < nm; ++mi) {
    const double gap = e0(nl - 1, mi) - study.extrapolated;
    if (gap > 0) {
      xs.push_back(std::log(d / M_list[mi]));
      ys.push_back(std::log(gap));
    }
  }
  if (xs.size() >= 2) {
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - xbar) * (ys[i] - ybar);
      den += (xs[i] - xbar) * (xs[i] - xbar);
    }
    study.slope = den > 0 ? num / den : 0;
  }
  return study;
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: need at least one trial");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes out of range");
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) w.lo = 0;  // the bound is exactly p for the degenerate counts
  if (successes == trials) w.hi = 1;
  return w;
}

McResult mc_probability(const McParams& params, const SigmaAssignment& sigma) {
  if (params.n_samples < 1) throw std::invalid_argument("mc_probability: need n_samples >= 1");
  if (!sigma.per_atom.empty())
    throw std::invalid_argument("mc_probability: random configurations need a common profile");
  McResult result;
  result.params = params;
  result.sigma = sigma;
  result.samples.resize(params.n_samples);

  const double tau = params.tau >= 0 ? params.tau : default_tau(params.d);
  result.params.tau = tau;
  const double horizon = params.L + params.d;
  const StripSpec spec(params.d, params.L, params.M);

  auto run_sample = [&](int i) {
    McSample sample;
    sample.index = i;
    sample.stream_seed = derive_stream(params.master_seed, static_cast<std::uint64_t>(i));
    try {
      const AtomConfiguration config =
          sample_configuration(params.nu, horizon, params.master_seed, static_cast<std::uint64_t>(i));
      sample.atoms = config.atoms;
      const GroundStateResult gs = ground_state(spec, config, sigma, params.solve);
      sample.snapped_atoms = gs.snapped_atoms;
      sample.e0 = gs.e0();
      sample.error_bar = gs.error_bar;
      sample.n_dof = gs.spectral.n_dof;
      sample.iterations = gs.spectral.iterations;
      sample.classification = classify_discrete(sample.e0, sample.error_bar, params.d, tau);
    } catch (const std::exception& e) {
      // a failed solve is an Undecided outcome, never silently dropped
      sample.solver_failed = true;
      sample.failure = e.what();
      sample.classification = SpectrumClass::Undecided;
    }
    result.samples[static_cast<std::size_t>(i)] = std::move(sample);
  };

  const int jobs = std::max(1, params.jobs);
  if (jobs == 1) {
    for (int i = 0; i < params.n_samples; ++i) run_sample(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < params.n_samples; i += jobs) run_sample(i);
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& s : result.samples) {
    switch (s.classification) {
      case SpectrumClass::NonEmpty: ++result.n_nonempty; break;
      case SpectrumClass::Empty: ++result.n_empty; break;
      case SpectrumClass::Undecided: ++result.n_undecided; break;
    }
  }
  result.ci_nonempty = wilson_interval(result.n_nonempty, params.n_samples);
  result.ci_empty = wilson_interval(result.n_empty, params.n_samples);
  result.ci_undecided = wilson_interval(result.n_undecided, params.n_samples);
  return result;
}

double polygon_ground_eigenvalue(const PolygonSpec& spec, const SolveOptions& opt) {
  const TriMesh mesh = build_polygon_mesh(spec);
  const AssembledForms forms = assemble_tagged_problem(mesh);
  return solve_lowest(forms.operator_matrix(), forms.M, opt).eigenvalues.front();
}

DestructionCheck verify_destruction_config(double d, double a_k, double gamma, double L, int M,
                                           double eta, double delta, int triangle_cells) {
  if (delta < 0) delta = 0.02 * d;
  if (!(eta > 1)) throw std::invalid_argument("verify_destruction_config: need eta > 1");
  if (!(a_k > 0) || !(a_k < d / 2))
    throw std::invalid_argument("verify_destruction_config: need 0 < a_k < d/2");

  DestructionCheck check{d, a_k, gamma, L, M, eta, delta};
  const double bottom = essential_bottom(d);
  const double window_lo = (d / 2 - delta) / eta;
  const double window_hi = d / 2 - delta;
  check.in_window = (a_k >= window_lo && a_k <= window_hi);

  const StripSpec spec(d, L, M);
  check.snapped_a = snap_atoms({a_k}, spec.pitch()).atoms.front();
  if (!(check.snapped_a < d / 2))
    throw std::invalid_argument("verify_destruction_config: atom snapped onto or past d/2");

  const double half = gamma / 2;
  check.mu1 = mu_square(check.snapped_a, half);
  check.mu_hat3 = mu_hat3(check.snapped_a, half, d);
  const double legs = d - 2 * check.snapped_a;
  check.mu2_fem =
      polygon_ground_eigenvalue(make_corner_triangle(legs, half, legs / triangle_cells));
  check.min_mu = std::min({check.mu1, check.mu2_fem, check.mu_hat3});
  check.analytic_all_above = check.min_mu > bottom;

  const GroundStateResult gs =
      ground_state(spec, AtomConfiguration::explicit_atoms({a_k}),
                   SigmaAssignment::uniform(SigmaProfile::constant(gamma)));
  check.e0 = gs.e0();
  check.error_bar = gs.error_bar;
  check.classification = classify_discrete(check.e0, check.error_bar, d, default_tau(d));
  check.chain_consistent =
      !(check.analytic_all_above && check.classification == SpectrumClass::NonEmpty);
  return check;
}

namespace {

// minimum over the atom window of each subdomain's ground value at Robin
// weight `half`; order: square, triangle (FEM), trapezoid pair (rectangle
// bound, congruent twice)
std::array<double, 4> window_minima(double d, const std::vector<double>& a_grid, double half,
                                    int triangle_cells) {
  std::array<double, 4> mins;
  mins.fill(std::numeric_limits<double>::infinity());
  for (double a : a_grid) {
    mins[0] = std::min(mins[0], mu_square(a, half));
    const double legs = d - 2 * a;
    mins[1] = std::min(mins[1], polygon_ground_eigenvalue(
                                    make_corner_triangle(legs, half, legs / triangle_cells)));
    const double rect = mu_hat3(a, half, d);
    mins[2] = std::min(mins[2], rect);
    mins[3] = std::min(mins[3], rect);
  }
  return mins;
}

}  // namespace

ThresholdEstimate estimate_gamma(double d, double eta, double delta, int a_grid_points,
                                 int triangle_cells) {
  if (delta < 0) delta = 0.02 * d;
  if (!(eta > 1)) throw std::invalid_argument("estimate_gamma: need eta > 1");
  if (!(delta > 0) || !(delta < d / 4)) throw std::invalid_argument("estimate_gamma: need 0 < delta < d/4");
  if (a_grid_points < 1) throw std::invalid_argument("estimate_gamma: need a nonempty grid");

  ThresholdEstimate est;
  est.d = d;
  est.eta = eta;
  est.delta = delta;
  const double bottom = essential_bottom(d);
  const double a_lo = (d / 2 - delta) / eta;
  const double a_hi = d / 2 - delta;
  for (int i = 0; i < a_grid_points; ++i)
    est.a_grid.push_back(a_grid_points == 1
                             ? a_lo
                             : a_lo + (a_hi - a_lo) * i / (a_grid_points - 1));

  // the Dirichlet limits bound every finite-weight value from above; if one
  // of them fails, no gamma can work for this (eta, delta)
  const double lim_square = std::numbers::pi * std::numbers::pi / (2 * a_hi * a_hi);
  const double lim_triangle = mu_triangle_dirichlet_limit(eta, delta, d);
  const double lim_rect = mu_hat3(a_lo, std::numeric_limits<double>::infinity(), d);
  if (lim_square <= bottom || lim_triangle <= bottom || lim_rect <= bottom) {
    std::ostringstream msg;
    msg << "estimate_gamma: Dirichlet limits do not clear the essential bottom "
        << "(eta=" << eta << ", delta=" << delta << "); shrink eta toward 1 or delta toward 0";
    throw std::invalid_argument(msg.str());
  }

  auto predicate = [&](double gamma) {
    const auto mins = window_minima(d, est.a_grid, gamma / 2, triangle_cells);
    return *std::min_element(mins.begin(), mins.end()) > bottom;
  };

  double hi = 1.0 / d;
  int doublings = 0;
  while (!predicate(hi)) {
    hi *= 2;
    if (++doublings > 60) throw SolverError("estimate_gamma: predicate never satisfied");
  }
  double lo = (doublings == 0) ? 0.0 : hi / 2;
  while (hi - lo > 0.005 * hi) {
    const double mid = 0.5 * (lo + hi);
    (predicate(mid) ? hi : lo) = mid;
  }
  est.gamma_hat = hi;

  const auto at_hat = window_minima(d, est.a_grid, est.gamma_hat / 2, triangle_cells);
  const auto at_half = window_minima(d, est.a_grid, est.gamma_hat / 4, triangle_cells);
  for (int l = 0; l < 4; ++l) {
    est.margins[l] = at_hat[l] - bottom;
    est.margins_at_half[l] = at_half[l] - bottom;
  }
  return est;
}

namespace {

struct RectForms {
  SparseMat K, M;
  std::array<SparseMat, 4> B;  // unit-weight side trace terms {left,right,bottom,top}
};

RectForms rect_forms(double x0, double y0, double hx, double hy, int nx, int ny) {
  const std::array<PolygonEdgeTag, 4> tags{PolygonEdgeTag{BoundaryKind::Robin, 1.0},
                                           PolygonEdgeTag{BoundaryKind::Robin, 1.0},
                                           PolygonEdgeTag{BoundaryKind::Robin, 1.0},
                                           PolygonEdgeTag{BoundaryKind::Robin, 1.0}};
  const TriMesh mesh = build_rect_mesh(x0, y0, hx, hy, nx, ny, tags);
  RectForms f;
  f.K = assemble_stiffness(mesh);
  f.M = assemble_mass(mesh);
  for (int side = 0; side < 4; ++side)
    f.B[side] = assemble_trace(mesh, *mesh.find_group(BoundaryKind::Robin, side),
                               SigmaProfile::constant(1.0));
  return f;
}

double rect_quotient(const RectForms& f, const std::array<double, 4>& weights,
                     const Eigen::VectorXd& phi) {
  double num = phi.dot(f.K * phi);
  for (int side = 0; side < 4; ++side) num += weights[side] * phi.dot(f.B[side] * phi);
  return num / phi.dot(f.M * phi);
}

struct ScalingTrial {
  double x0, y0, hx, hy;
  int nx, ny;
  std::array<double, 4> weights;
  Eigen::VectorXd phi;
};

ScalingTrial draw_trial(SplitMix64& rng) {
  ScalingTrial t;
  t.x0 = 0.1 + 1.9 * rng.next_open01();
  t.y0 = 0.1 + 1.9 * rng.next_open01();
  t.nx = 2 + static_cast<int>(rng.next_u64() % 7);
  t.ny = 2 + static_cast<int>(rng.next_u64() % 7);
  t.hx = (0.2 + 1.8 * rng.next_open01()) / t.nx;
  t.hy = (0.2 + 1.8 * rng.next_open01()) / t.ny;
  for (auto& w : t.weights) {
    const double u = rng.next_open01();
    w = (u < 0.15) ? 0.0 : 5.0 * rng.next_open01();
  }
  const int n = (t.nx + 1) * (t.ny + 1);
  t.phi.resize(n);
  for (int i = 0; i < n; ++i) t.phi(i) = 2.0 * rng.next_open01() - 1.0;
  if (t.phi.norm() < 1e-8) t.phi(0) = 1.0;
  return t;
}

}  // namespace

PropertyCheck check_prop_scaling_up(int trials, std::uint64_t seed, double tolerance) {
  PropertyCheck out{trials, 0, 0};
  SplitMix64 rng(derive_stream(seed, 1));
  for (int trial = 0; trial < trials; ++trial) {
    ScalingTrial t = draw_trial(rng);
    const double alpha = (trial % 10 == 0) ? 1.0 : 1.0 + 2.0 * rng.next_open01();
    const double beta = (trial % 10 == 0) ? 1.0 : 1.0 + 2.0 * rng.next_open01();

    const RectForms f1 = rect_forms(t.x0, t.y0, t.hx, t.hy, t.nx, t.ny);
    const RectForms f2 = rect_forms(alpha * t.x0, beta * t.y0, alpha * t.hx, beta * t.hy, t.nx, t.ny);
    // the stretched interpolant phi~(x,y) = phi(x/alpha, y/beta) has the same
    // nodal values on the stretched mesh
    const double q1 = rect_quotient(f1, t.weights, t.phi);
    const double q2 = rect_quotient(f2, t.weights, t.phi);
    const double violation = q2 - q1;
    if (violation > tolerance) {
      ++out.violations;
      out.max_violation = std::max(out.max_violation, violation);
    }
  }
  return out;
}

PropertyCheck check_prop_scaling_mixed(int trials, std::uint64_t seed, double tolerance) {
  PropertyCheck out{trials, 0, 0};
  SplitMix64 rng(derive_stream(seed, 2));
  for (int trial = 0; trial < trials; ++trial) {
    ScalingTrial t = draw_trial(rng);
    const double alpha = 1.0 + 2.0 * rng.next_open01();
    const double beta = 0.05 + 0.949 * rng.next_open01();
    const double lambda = (trial % 7 == 0) ? beta - 1e-6 : beta * (0.1 + 0.89 * rng.next_open01());

    const RectForms f1 = rect_forms(t.x0, t.y0, t.hx, t.hy, t.nx, t.ny);
    const RectForms f2 = rect_forms(alpha * t.x0, beta * t.y0, alpha * t.hx, beta * t.hy, t.nx, t.ny);
    const double q1 = rect_quotient(f1, t.weights, t.phi);
    const double q2 = rect_quotient(f2, t.weights, t.phi);
    const double violation = lambda * lambda * q2 - q1;
    if (violation > tolerance) {
      ++out.violations;
      out.max_violation = std::max(out.max_violation, violation);
    }
  }
  return out;
}

}  // namespace molspec
