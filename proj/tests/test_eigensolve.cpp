// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "molspec/eigensolve.hpp"
#include "molspec/randomness.hpp"
#include "oracles.hpp"

using namespace molspec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

TriMesh square_mesh(int cells, BoundaryKind boundary) {
  PolygonSpec spec;
  spec.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  spec.edge_tags.assign(4, {boundary, 0});
  spec.pitch = 1.0 / cells;
  return build_polygon_mesh(spec);
}

AssembledForms strip_problem(double d, double L, int M) {
  const TriMesh mesh = build_strip_mesh(StripSpec(d, L, M), {});
  return assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::constant(0)));
}

}  // namespace

TEST_CASE("Dirichlet unit square converges to 2 pi^2 from above") {
  std::vector<double> values;
  for (int cells : {8, 16, 32}) {
    const auto forms = assemble_tagged_problem(square_mesh(cells, BoundaryKind::Dirichlet));
    SolveOptions opt;
    opt.m = 1;
    const auto res = solve_lowest(forms.operator_matrix(), forms.M, opt);
    CHECK(res.method == SolveMethod::Dense);
    values.push_back(res.eigenvalues[0]);
  }
  const double exact = 2 * kPi * kPi;
  CHECK(values.back() > exact);
  CHECK(values.back() == doctest::Approx(exact).epsilon(5e-3));
  // O(h^2): each halving divides the error by about 4
  const double r1 = (values[0] - exact) / (values[1] - exact);
  const double r2 = (values[1] - exact) / (values[2] - exact);
  CHECK(r1 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("Neumann unit square has the constant kernel") {
  const auto forms = assemble_tagged_problem(square_mesh(16, BoundaryKind::Neumann));
  SolveOptions opt;
  opt.m = 2;
  const auto res = solve_lowest(forms.operator_matrix(), forms.M, opt);
  CHECK(std::abs(res.eigenvalues[0]) < 1e-10);
  CHECK(res.eigenvalues[1] > 1.0);
  const VectorXd v = res.eigenvectors.col(0);
  const double spread = v.maxCoeff() - v.minCoeff();
  CHECK(spread < 1e-6 * std::abs(v.maxCoeff()));
}

TEST_CASE("iterative and dense paths agree") {
  const auto forms = strip_problem(1.0, 6.0, 12);
  REQUIRE(forms.n_dof > 1000);
  SolveOptions opt;
  opt.m = 4;
  opt.tol = 1e-11;

  SolveOptions dense = opt;
  dense.force_method = SolveMethod::Dense;
  SolveOptions iter = opt;
  iter.force_method = SolveMethod::ShiftInvert;

  const SparseMat A = forms.operator_matrix();
  const auto rd = solve_lowest(A, forms.M, dense);
  const auto ri = solve_lowest(A, forms.M, iter);
  CHECK(ri.method == SolveMethod::ShiftInvert);
  for (int i = 0; i < opt.m; ++i) {
    CHECK(ri.eigenvalues[i] ==
          doctest::Approx(rd.eigenvalues[i]).epsilon(1e-9));
    CHECK(ri.residuals[i] <= opt.tol);
    if (i > 0) CHECK(ri.eigenvalues[i] >= ri.eigenvalues[i - 1]);
  }
  // M-orthonormal basis
  const MatrixXd gram = ri.eigenvectors.transpose() * (forms.M * ri.eigenvectors);
  CHECK((gram - MatrixXd::Identity(opt.m, opt.m)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("deterministic solves") {
  const auto forms = strip_problem(1.0, 4.0, 8);
  SolveOptions opt;
  opt.m = 2;
  opt.force_method = SolveMethod::ShiftInvert;
  const SparseMat A = forms.operator_matrix();
  const auto a = solve_lowest(A, forms.M, opt);
  const auto b = solve_lowest(A, forms.M, opt);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("rayleigh quotient bounds and evaluates") {
  const auto forms = strip_problem(1.0, 4.0, 8);
  const SparseMat A = forms.operator_matrix();
  SolveOptions opt;
  opt.m = 1;
  const auto res = solve_lowest(A, forms.M, opt);
  const double lambda1 = res.eigenvalues[0];

  CHECK(rayleigh_quotient(A, forms.M, res.eigenvectors.col(0)) ==
        doctest::Approx(lambda1).epsilon(1e-10));

  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd u(forms.n_dof);
    for (int i = 0; i < forms.n_dof; ++i) u(i) = 2 * rng.next_open01() - 1;
    CHECK(rayleigh_quotient(A, forms.M, u) >= lambda1 - 1e-12);
  }
  CHECK_THROWS_AS(rayleigh_quotient(A, forms.M, VectorXd::Zero(forms.n_dof)),
                  std::invalid_argument);
}

TEST_CASE("coarse ground state interpolates into a good fine initial guess") {
  const StripSpec coarse(1.0, 4.0, 8), fine(1.0, 4.0, 16);
  const TriMesh cm = build_strip_mesh(coarse, {});
  const TriMesh fm = build_strip_mesh(fine, {});
  const auto cf = assemble_hamiltonian(cm, SigmaAssignment::uniform(SigmaProfile::constant(0)));
  const auto ff = assemble_hamiltonian(fm, SigmaAssignment::uniform(SigmaProfile::constant(0)));

  SolveOptions opt;
  opt.m = 1;
  const auto cres = solve_lowest(cf.operator_matrix(), cf.M, opt);
  const auto fres = solve_lowest(ff.operator_matrix(), ff.M, opt);

  // coarse node values, addressable by position
  std::map<std::pair<double, double>, double> coarse_val;
  for (std::size_t i = 0; i < cm.nodes.size(); ++i)
    coarse_val[{cm.nodes[i].x, cm.nodes[i].y}] =
        cf.dof_map[i] >= 0 ? cres.eigenvectors.col(0)(cf.dof_map[i]) : 0.0;

  // P1 interpolation: fine nodes are coarse nodes or midpoints of coarse
  // edges (axis-aligned or main-diagonal)
  const double H = coarse.pitch();
  VectorXd u(ff.n_dof);
  for (std::size_t i = 0; i < fm.nodes.size(); ++i) {
    if (ff.dof_map[i] < 0) continue;
    const double x = fm.nodes[i].x, y = fm.nodes[i].y;
    const auto exact = coarse_val.find({x, y});
    double v;
    if (exact != coarse_val.end()) {
      v = exact->second;
    } else {
      const double x0 = std::floor(x / H + 1e-9) * H, y0 = std::floor(y / H + 1e-9) * H;
      auto at = [&](double px, double py) {
        const auto it = coarse_val.find({px, py});
        return it == coarse_val.end() ? 0.0 : it->second;
      };
      const bool on_vertical = std::abs(x - x0) < 1e-12;
      const bool on_horizontal = std::abs(y - y0) < 1e-12;
      if (on_vertical)
        v = 0.5 * (at(x0, y0) + at(x0, y0 + H));
      else if (on_horizontal)
        v = 0.5 * (at(x0, y0) + at(x0 + H, y0));
      else
        v = 0.5 * (at(x0, y0) + at(x0 + H, y0 + H));  // main diagonal midpoint
    }
    u(ff.dof_map[i]) = v;
  }
  REQUIRE(u.norm() > 0);
  const double rq = rayleigh_quotient(ff.operator_matrix(), ff.M, u);
  CHECK(rq >= fres.eigenvalues[0] - 1e-12);
  CHECK(rq <= 1.05 * fres.eigenvalues[0]);
}

TEST_CASE("inertia counts match the dense spectrum") {
  const auto forms = strip_problem(1.0, 3.0, 3);
  const SparseMat A = forms.operator_matrix();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(MatrixXd(A), MatrixXd(forms.M),
                                                        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const VectorXd ev = es.eigenvalues();
  for (double s : {0.5, ev(0) + 1e-6, 0.5 * (ev(0) + ev(1)), ev(2) + 1e-8, 25.0, 100.0}) {
    int expected = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) < s) ++expected;
    CHECK(eigencount_below(A, forms.M, s) == expected);
  }
}

TEST_CASE("inertia bisection brackets eigenvalues") {
  const auto forms = strip_problem(1.0, 3.0, 3);
  const SparseMat A = forms.operator_matrix();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(MatrixXd(A), MatrixXd(forms.M),
                                                        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  for (int k : {1, 2, 3}) {
    const auto [lo, hi] = bracket_eigenvalue(A, forms.M, k, 1e-9);
    const double exact = es.eigenvalues()(k - 1);
    CHECK(lo <= exact + 1e-9);
    CHECK(hi >= exact - 1e-9);
    CHECK(hi - lo <= 1e-9 * std::max(1.0, hi) * 1.01);
  }
}

TEST_CASE("value error bounds cover the true algebraic error") {
  const auto forms = strip_problem(1.0, 4.0, 8);
  const SparseMat A = forms.operator_matrix();
  SolveOptions exact;
  exact.m = 1;
  exact.force_method = SolveMethod::Dense;
  const double lambda1 = solve_lowest(A, forms.M, exact).eigenvalues[0];

  // a loosely converged iterative solve must still bracket the truth
  SolveOptions loose;
  loose.m = 1;
  loose.tol = 1e-4;
  loose.force_method = SolveMethod::ShiftInvert;
  const auto res = solve_lowest(A, forms.M, loose);
  CHECK(std::abs(res.eigenvalues[0] - lambda1) <= res.value_error_bounds[0] + 1e-14);
}

TEST_CASE("degenerate mass matrices are reported as solver failures") {
  const auto forms = strip_problem(1.0, 3.0, 3);
  SparseMat bad_M(forms.n_dof, forms.n_dof);  // all-zero: not positive definite
  SolveOptions opt;
  opt.force_method = SolveMethod::ShiftInvert;
  CHECK_THROWS_AS(solve_lowest(forms.operator_matrix(), bad_M, opt), SolverError);

  SolveOptions starve;
  starve.max_iterations = 0;
  starve.force_method = SolveMethod::ShiftInvert;
  CHECK_THROWS_WITH_AS(solve_lowest(forms.operator_matrix(), forms.M, starve),
                       doctest::Contains("did not converge"), SolverError);
}

TEST_CASE("variational upper bounds decrease under refinement and truncation growth") {
  auto lambda1 = [](double L, int M) {
    const auto forms = strip_problem(1.0, L, M);
    SolveOptions opt;
    opt.m = 1;
    return solve_lowest(forms.operator_matrix(), forms.M, opt).eigenvalues[0];
  };
  CHECK(lambda1(4, 8) <= lambda1(4, 4) + 1e-11);
  CHECK(lambda1(4, 16) <= lambda1(4, 8) + 1e-11);
  CHECK(lambda1(6, 8) <= lambda1(4, 8) + 1e-11);
  CHECK(lambda1(8, 8) <= lambda1(6, 8) + 1e-11);
}
