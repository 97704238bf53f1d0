// assembly.hpp
// P1 finite-element assembly of the molecule's quadratic form: stiffness,
// consistent mass, and weighted trace terms along interaction lines or
// Robin boundary chains, with Dirichlet degrees of freedom eliminated.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "molspec/geometry.hpp"
#include "molspec/randomness.hpp"

namespace molspec {

using SparseMat = Eigen::SparseMatrix<double>;

// Weight profile along one interaction line. Infinite strength is not a
// number: it is realized downstream as Dirichlet elimination of the chain.
struct SigmaProfile {
  enum class Kind { Constant, Piecewise, Infinite };

  Kind kind = Kind::Constant;
  double value = 0;
  std::vector<double> breakpoints;  // ascending; values[k] applies below breakpoints[k]
  std::vector<double> values;       // size = breakpoints.size() + 1

  static SigmaProfile constant(double s);
  static SigmaProfile piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static SigmaProfile infinite();

  bool is_infinite() const { return kind == Kind::Infinite; }
  bool is_zero() const;
  double operator()(double t) const;  // finite kinds only

  // pointwise sum, used when snapping merges two atoms onto one grid line
  friend SigmaProfile operator+(const SigmaProfile& a, const SigmaProfile& b);
};

// Profile-per-atom rule: one common profile, or an explicit list.
struct SigmaAssignment {
  SigmaProfile common = SigmaProfile::constant(0);
  std::vector<SigmaProfile> per_atom;  // when non-empty, overrides `common`

  static SigmaAssignment uniform(SigmaProfile profile);
  static SigmaAssignment list(std::vector<SigmaProfile> profiles);

  const SigmaProfile& for_atom(std::size_t i) const;
  // re-index through snap_atoms' merge map, summing profiles that collide
  SigmaAssignment merged(const std::vector<int>& merged_index, std::size_t n_merged) const;
};

SparseMat assemble_stiffness(const TriMesh& mesh);
SparseMat assemble_mass(const TriMesh& mesh);

// 1D consistent mass along the chain; each edge weighted by sigma at the
// edge midpoint (the running coordinate is y on vertical edges, x otherwise).
SparseMat assemble_trace(const TriMesh& mesh, const EdgeGroup& chain, const SigmaProfile& sigma);

struct AssembledForms {
  SparseMat K;                  // reduced stiffness
  SparseMat M;                  // reduced mass, positive definite
  std::vector<SparseMat> T;     // reduced trace terms, pre-weighted
  std::vector<int> dof_map;     // mesh node -> reduced index, -1 if eliminated
  std::vector<int> free_nodes;  // reduced index -> mesh node
  int n_dof = 0;

  SparseMat operator_matrix() const;  // K + sum of T
};

struct TagRef {
  BoundaryKind kind;
  int index = -1;  // -1: every group of this kind
};

AssembledForms apply_dirichlet(const SparseMat& K, const SparseMat& M, std::vector<SparseMat> T,
                               const TriMesh& mesh, const std::vector<TagRef>& dirichlet_tags);

// Full pipeline for a strip mesh: stiffness + mass + one trace matrix per
// atom; strip walls and the truncation cut are always eliminated, and atoms
// with infinite strength are eliminated instead of assembled.
AssembledForms assemble_hamiltonian(const TriMesh& mesh, const SigmaAssignment& sigma);

// Pipeline for a tagged polygon mesh: Dirichlet-tagged chains eliminated,
// Robin-tagged chains contribute constant-weight trace terms.
AssembledForms assemble_tagged_problem(const TriMesh& mesh);

}  // namespace molspec
