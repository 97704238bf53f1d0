// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "molspec/assembly.hpp"
#include "oracles.hpp"

using namespace molspec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TriMesh neumann_square(double side, int cells) {
  PolygonSpec spec;
  spec.vertices = {{0, 0}, {side, 0}, {side, side}, {0, side}};
  spec.edge_tags.assign(4, {BoundaryKind::Neumann, 0});
  spec.pitch = side / cells;
  return build_polygon_mesh(spec);
}

std::vector<double> dense_generalized_eigenvalues(const SparseMat& A, const SparseMat& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(MatrixXd(A), MatrixXd(M),
                                                        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

double sum_entries(const SparseMat& A) {
  double sum = 0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it) sum += it.value();
  return sum;
}

double symmetry_defect(const SparseMat& A) {
  const SparseMat D = SparseMat(A.transpose()) - A;
  double norm = 0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMat::InnerIterator it(D, k); it; ++it) norm = std::max(norm, std::abs(it.value()));
  return norm;
}

}  // namespace

TEST_CASE("stiffness annihilates constants and is exact on affine functions") {
  const TriMesh mesh = neumann_square(1.0, 8);
  const SparseMat K = assemble_stiffness(mesh);
  CHECK(symmetry_defect(K) < 1e-14);

  const VectorXd ones = VectorXd::Ones(K.rows());
  CHECK((K * ones).lpNorm<Eigen::Infinity>() < 1e-13);

  VectorXd phi(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    phi(static_cast<Eigen::Index>(i)) = mesh.nodes[i].x;
  CHECK(phi.dot(K * phi) == doctest::Approx(1.0).epsilon(1e-12));  // |grad x|^2 * area
}

TEST_CASE("single-triangle stiffness matches the quadrature oracle") {
  const double h = 0.5;
  TriMesh tri;
  tri.pitch = h;
  tri.nodes = {{0, 0}, {h, 0}, {0, h}};
  tri.triangles = {{0, 1, 2}};
  const SparseMat K = assemble_stiffness(tri);

  // integrate grad(basis_i) . grad(basis_j) with the P1 gradients recovered
  // by the affine-fit oracle, over the triangle of area h^2/2
  const double area = h * h / 2;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double vi[3] = {0, 0, 0}, vj[3] = {0, 0, 0};
      vi[i] = 1;
      vj[j] = 1;
      const auto gi = testing::p1_gradient(tri.nodes[0], tri.nodes[1], tri.nodes[2], vi[0], vi[1], vi[2]);
      const auto gj = testing::p1_gradient(tri.nodes[0], tri.nodes[1], tri.nodes[2], vj[0], vj[1], vj[2]);
      CHECK(K.coeff(i, j) == doctest::Approx((gi[0] * gj[0] + gi[1] * gj[1]) * area).epsilon(1e-13));
    }
  }
}

TEST_CASE("mass matrix integrates the domain") {
  CHECK(sum_entries(assemble_mass(neumann_square(1.0, 4))) == doctest::Approx(1.0).epsilon(1e-13));
  const TriMesh strip = build_strip_mesh(StripSpec(1.0, 2.0, 2), {});
  CHECK(sum_entries(assemble_mass(strip)) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("mass matrix is positive definite (dense oracle)") {
  const TriMesh mesh = neumann_square(1.0, 5);
  const SparseMat M = assemble_mass(mesh);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(M), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0);
}

TEST_CASE("trace matrices integrate the weight along the chain") {
  // left side of a tall thin rectangle: a straight vertical chain on [0,2]
  const std::array<PolygonEdgeTag, 4> tags{PolygonEdgeTag{BoundaryKind::Robin, 1.0},
                                           PolygonEdgeTag{BoundaryKind::Neumann, 0},
                                           PolygonEdgeTag{BoundaryKind::Neumann, 0},
                                           PolygonEdgeTag{BoundaryKind::Neumann, 0}};
  const TriMesh mesh = build_rect_mesh(0, 0, 0.25, 0.25, 1, 8, tags);
  const EdgeGroup& chain = *mesh.find_group(BoundaryKind::Robin, 0);

  CHECK(sum_entries(assemble_trace(mesh, chain, SigmaProfile::constant(1.0))) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(assemble_trace(mesh, chain, SigmaProfile::constant(0.0)).nonZeros() == 0);

  // piecewise weight 1 on [0,1), 3 on [1,2]: breakpoint on the grid, so the
  // midpoint rule integrates it exactly: 1*1 + 3*1 = 4
  const SigmaProfile pw = SigmaProfile::piecewise({1.0}, {1.0, 3.0});
  CHECK(sum_entries(assemble_trace(mesh, chain, pw)) == doctest::Approx(4.0).epsilon(1e-13));

  CHECK_THROWS_AS(assemble_trace(mesh, chain, SigmaProfile::infinite()), std::invalid_argument);
}

TEST_CASE("Dirichlet elimination keeps the right nodes") {
  PolygonSpec square;
  square.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  square.edge_tags.assign(4, {BoundaryKind::Dirichlet, 0});
  square.pitch = 0.5;
  const TriMesh mesh = build_polygon_mesh(square);
  const AssembledForms forms = assemble_tagged_problem(mesh);
  CHECK(forms.n_dof == 1);  // the single interior node

  const TriMesh strip = build_strip_mesh(StripSpec(1.0, 2.0, 2), {});
  const AssembledForms sf = assemble_hamiltonian(strip, SigmaAssignment::uniform(SigmaProfile::constant(0)));
  for (std::size_t i = 0; i < strip.nodes.size(); ++i) {
    const bool on_wall = std::abs(std::abs(strip.nodes[i].x - strip.nodes[i].y) - 1.0) < 1e-12;
    if (on_wall) CHECK(sf.dof_map[i] == -1);
  }
}

TEST_CASE("infinite strength dominates every finite weight (dense oracle)") {
  const StripSpec spec(1.0, 2.0, 2);
  const TriMesh mesh = build_strip_mesh(spec, {1.0});
  const AssembledForms hard =
      assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::infinite()));
  const auto ev_hard = dense_generalized_eigenvalues(hard.operator_matrix(), hard.M);
  for (double s : {0.0, 1.0, 100.0}) {
    const AssembledForms soft =
        assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::constant(s)));
    const auto ev_soft = dense_generalized_eigenvalues(soft.operator_matrix(), soft.M);
    // the hard problem lives on a subspace: compare the shared leading block
    for (std::size_t i = 0; i < ev_hard.size(); ++i) CHECK(ev_hard[i] >= ev_soft[i] - 1e-10);
  }
}

TEST_CASE("hamiltonian composition edge cases") {
  const StripSpec spec(1.0, 2.0, 2);
  const TriMesh bare = build_strip_mesh(spec, {});
  const TriMesh with_atom = build_strip_mesh(spec, {1.0});

  const auto forms_bare =
      assemble_hamiltonian(bare, SigmaAssignment::uniform(SigmaProfile::constant(7)));
  const auto forms_zero =
      assemble_hamiltonian(with_atom, SigmaAssignment::uniform(SigmaProfile::constant(0)));
  REQUIRE(forms_zero.T.size() == 1);
  CHECK(forms_zero.T[0].nonZeros() == 0);

  const auto ev_bare = dense_generalized_eigenvalues(forms_bare.operator_matrix(), forms_bare.M);
  const auto ev_zero = dense_generalized_eigenvalues(forms_zero.operator_matrix(), forms_zero.M);
  for (std::size_t i = 0; i < ev_bare.size(); ++i)
    CHECK(ev_zero[i] == doctest::Approx(ev_bare[i]).epsilon(1e-12));

  const auto forms_ten =
      assemble_hamiltonian(with_atom, SigmaAssignment::uniform(SigmaProfile::constant(10)));
  const auto ev_ten = dense_generalized_eigenvalues(forms_ten.operator_matrix(), forms_ten.M);
  CHECK(ev_ten[0] > ev_zero[0] + 1e-6);
}

TEST_CASE("form and eigenvalue monotonicity in the interaction strength") {
  const StripSpec spec(1.0, 3.0, 3);
  const TriMesh mesh = build_strip_mesh(spec, {1.0, 2.0});
  SplitMix64 rng(5);

  std::vector<std::vector<double>> spectra;
  std::vector<double> quad;
  VectorXd u;
  for (double s : {0.0, 1.0, 10.0, 100.0}) {
    const auto forms = assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::constant(s)));
    if (u.size() == 0) {
      u.resize(forms.n_dof);
      for (int i = 0; i < forms.n_dof; ++i) u(i) = 2 * rng.next_open01() - 1;
    }
    quad.push_back(u.dot(forms.operator_matrix() * u));
    spectra.push_back(dense_generalized_eigenvalues(forms.operator_matrix(), forms.M));
  }
  for (std::size_t k = 1; k < quad.size(); ++k) {
    CHECK(quad[k] >= quad[k - 1] - 1e-12);
    for (std::size_t i = 0; i < spectra[k].size(); ++i)
      CHECK(spectra[k][i] >= spectra[k - 1][i] - 1e-10);
  }
}

TEST_CASE("any nonnegative weights dominate the free comparison operator") {
  const StripSpec spec(1.0, 3.0, 3);
  const TriMesh mesh = build_strip_mesh(spec, {1.0, 2.0});
  const auto free_forms =
      assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::constant(0)));
  const auto mixed = assemble_hamiltonian(
      mesh, SigmaAssignment::list({SigmaProfile::piecewise({1.0}, {3.0, 0.5}),
                                   SigmaProfile::constant(12.0)}));
  const auto ev_free = dense_generalized_eigenvalues(free_forms.operator_matrix(), free_forms.M);
  const auto ev_mixed = dense_generalized_eigenvalues(mixed.operator_matrix(), mixed.M);
  for (std::size_t i = 0; i < ev_free.size(); ++i) CHECK(ev_mixed[i] >= ev_free[i] - 1e-10);
}

TEST_CASE("assembled operator is invariant under the diagonal reflection") {
  // a non-constant profile makes this sensitive to the running coordinate on
  // the horizontal leg (the weight must be the same function of x there as
  // it is of y on the vertical leg)
  const StripSpec spec(1.0, 3.0, 3);
  const TriMesh mesh = build_strip_mesh(spec, {1.0});
  const auto forms = assemble_hamiltonian(
      mesh, SigmaAssignment::uniform(SigmaProfile::piecewise({1.0, 2.0}, {4.0, 0.5, 9.0})));

  // node permutation (x,y) -> (y,x), restricted to free nodes
  std::map<std::pair<double, double>, int> dof_at;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (forms.dof_map[i] >= 0) dof_at[{mesh.nodes[i].x, mesh.nodes[i].y}] = forms.dof_map[i];
  std::vector<int> perm(static_cast<std::size_t>(forms.n_dof));
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (forms.dof_map[i] >= 0)
      perm[static_cast<std::size_t>(forms.dof_map[i])] = dof_at.at({mesh.nodes[i].y, mesh.nodes[i].x});

  const SparseMat A = forms.operator_matrix();
  double defect = 0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      defect = std::max(defect, std::abs(A.coeff(perm[static_cast<std::size_t>(it.row())],
                                                  perm[static_cast<std::size_t>(it.col())]) -
                                         it.value()));
  CHECK(defect < 1e-12);
}

TEST_CASE("discrete quadratic form equals the quadrature of the interpolant") {
  const StripSpec spec(1.0, 2.0, 4);
  const TriMesh mesh = build_strip_mesh(spec, {0.75, 1.5});
  const SigmaAssignment sigma = SigmaAssignment::list(
      {SigmaProfile::piecewise({1.0}, {2.0, 5.0}), SigmaProfile::constant(3.0)});
  const auto forms = assemble_hamiltonian(mesh, sigma);

  SplitMix64 rng(11);
  VectorXd u(forms.n_dof);
  for (int i = 0; i < forms.n_dof; ++i) u(i) = 2 * rng.next_open01() - 1;

  // node values of the interpolant (zero on eliminated nodes)
  std::vector<double> vals(mesh.nodes.size(), 0.0);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (forms.dof_map[i] >= 0) vals[i] = u(forms.dof_map[i]);

  double grad_energy = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto g = testing::p1_gradient(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]],
                                        vals[tri[0]], vals[tri[1]], vals[tri[2]]);
    grad_energy += (g[0] * g[0] + g[1] * g[1]) * mesh.triangle_area(t);
  }
  double trace_energy = 0;
  int atom = 0;
  for (const auto& group : mesh.groups) {
    if (group.kind != BoundaryKind::Gamma) continue;
    const SigmaProfile& profile = sigma.for_atom(static_cast<std::size_t>(atom++));
    for (const auto& chain : group.chains) {
      for (const auto& e : chain) {
        const Vec2& p = mesh.nodes[e[0]];
        const Vec2& q = mesh.nodes[e[1]];
        const double len = std::hypot(q.x - p.x, q.y - p.y);
        const double coord = (p.x == q.x) ? 0.5 * (p.y + q.y) : 0.5 * (p.x + q.x);
        // Simpson along the edge: exact for the quadratic |phi|^2
        const double va = vals[e[0]], vb = vals[e[1]], vm = 0.5 * (va + vb);
        trace_energy += profile(coord) * len * (va * va + 4 * vm * vm + vb * vb) / 6.0;
      }
    }
  }
  const double form_value = u.dot(forms.operator_matrix() * u);
  CHECK(form_value == doctest::Approx(grad_energy + trace_energy).epsilon(1e-12));
}

TEST_CASE("stiffness and trace terms are positive semidefinite") {
  const TriMesh mesh = build_strip_mesh(StripSpec(1.0, 2.0, 2), {1.0});
  const auto forms = assemble_hamiltonian(
      mesh, SigmaAssignment::uniform(SigmaProfile::piecewise({0.5}, {2.0, 6.0})));
  auto min_eig = [](const SparseMat& A) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  CHECK(min_eig(forms.K) > -1e-12);
  REQUIRE(forms.T.size() == 1);
  CHECK(min_eig(forms.T[0]) > -1e-12);
  CHECK(min_eig(forms.M) > 0);
  CHECK(symmetry_defect(forms.K) < 1e-14);
  CHECK(symmetry_defect(forms.T[0]) < 1e-14);
  CHECK(symmetry_defect(forms.M) < 1e-14);
}

TEST_CASE("eliminating everything is an error") {
  PolygonSpec square;
  square.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  square.edge_tags.assign(4, {BoundaryKind::Dirichlet, 0});
  square.pitch = 1.0;  // single cell: every node sits on the boundary
  const TriMesh mesh = build_polygon_mesh(square);
  CHECK_THROWS_AS(assemble_tagged_problem(mesh), std::invalid_argument);
}

TEST_CASE("huge finite strength approaches the hard-wall elimination") {
  const StripSpec spec(1.0, 2.0, 4);
  const TriMesh mesh = build_strip_mesh(spec, {0.75});
  const auto hard = assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::infinite()));
  const auto soft =
      assemble_hamiltonian(mesh, SigmaAssignment::uniform(SigmaProfile::constant(1e8)));
  const double ev_hard = dense_generalized_eigenvalues(hard.operator_matrix(), hard.M)[0];
  const double ev_soft = dense_generalized_eigenvalues(soft.operator_matrix(), soft.M)[0];
  CHECK(ev_soft <= ev_hard + 1e-10);
  CHECK(ev_soft == doctest::Approx(ev_hard).epsilon(1e-4));
}

TEST_CASE("sigma profiles evaluate, merge, and validate") {
  const SigmaProfile pw = SigmaProfile::piecewise({1.0, 2.0}, {5.0, 7.0, 0.0});
  CHECK(pw(0.5) == 5.0);
  CHECK(pw(1.5) == 7.0);
  CHECK(pw(2.5) == 0.0);
  CHECK_THROWS_AS(SigmaProfile::piecewise({2.0, 1.0}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(SigmaProfile::constant(-1.0), std::invalid_argument);

  const SigmaProfile sum = pw + SigmaProfile::constant(1.0);
  CHECK(sum(0.5) == 6.0);
  CHECK(sum(2.5) == 1.0);
  CHECK((SigmaProfile::infinite() + pw).is_infinite());

  // two atoms snapping onto one line add their weights
  const SigmaAssignment merged =
      SigmaAssignment::list({SigmaProfile::constant(2), SigmaProfile::constant(3)})
          .merged({0, 0}, 1);
  CHECK(merged.for_atom(0).value == 5.0);
}
