// SPDX-License-Identifier: Apache-2.0
#include "molspec/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace molspec {

SigmaProfile SigmaProfile::constant(double s) {
  if (!(s >= 0)) throw std::invalid_argument("SigmaProfile: weights must be nonnegative");
  SigmaProfile p;
  p.kind = Kind::Constant;
  p.value = s;
  return p;
}

SigmaProfile SigmaProfile::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("SigmaProfile: need one more value than breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("SigmaProfile: breakpoints must be ascending");
  for (double v : values)
    if (!(v >= 0)) throw std::invalid_argument("SigmaProfile: weights must be nonnegative");
  SigmaProfile p;
  p.kind = Kind::Piecewise;
  p.breakpoints = std::move(breakpoints);
  p.values = std::move(values);
  return p;
}

SigmaProfile SigmaProfile::infinite() {
  SigmaProfile p;
  p.kind = Kind::Infinite;
  return p;
}

bool SigmaProfile::is_zero() const {
  switch (kind) {
    case Kind::Constant: return value == 0;
    case Kind::Piecewise: return std::all_of(values.begin(), values.end(), [](double v) { return v == 0; });
    case Kind::Infinite: return false;
  }
  return false;
}

double SigmaProfile::operator()(double t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Piecewise: {
      const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
      return values[static_cast<std::size_t>(it - breakpoints.begin())];
    }
    case Kind::Infinite: break;
  }
  throw std::logic_error("SigmaProfile: cannot evaluate an infinite profile");
}

SigmaProfile operator+(const SigmaProfile& a, const SigmaProfile& b) {
  if (a.is_infinite() || b.is_infinite()) return SigmaProfile::infinite();
  if (a.kind == SigmaProfile::Kind::Constant && b.kind == SigmaProfile::Kind::Constant)
    return SigmaProfile::constant(a.value + b.value);
  std::vector<double> bp;
  std::merge(a.breakpoints.begin(), a.breakpoints.end(), b.breakpoints.begin(), b.breakpoints.end(),
             std::back_inserter(bp));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> vals(bp.size() + 1);
  for (std::size_t i = 0; i <= bp.size(); ++i) {
    // sample inside the i-th interval
    const double t = (i == 0) ? (bp.empty() ? 0.0 : bp.front() - 1.0)
                              : (i == bp.size() ? bp.back() + 1.0 : 0.5 * (bp[i - 1] + bp[i]));
    vals[i] = a(t) + b(t);
  }
  return SigmaProfile::piecewise(std::move(bp), std::move(vals));
}

SigmaAssignment SigmaAssignment::uniform(SigmaProfile profile) {
  SigmaAssignment s;
  s.common = std::move(profile);
  return s;
}

SigmaAssignment SigmaAssignment::list(std::vector<SigmaProfile> profiles) {
  SigmaAssignment s;
  s.per_atom = std::move(profiles);
  return s;
}

const SigmaProfile& SigmaAssignment::for_atom(std::size_t i) const {
  if (per_atom.empty()) return common;
  if (i >= per_atom.size()) throw std::out_of_range("SigmaAssignment: no profile for atom");
  return per_atom[i];
}

SigmaAssignment SigmaAssignment::merged(const std::vector<int>& merged_index,
                                        std::size_t n_merged) const {
  if (per_atom.empty()) return *this;
  if (merged_index.size() != per_atom.size())
    throw std::invalid_argument("SigmaAssignment: merge map does not match profile list");
  std::vector<SigmaProfile> out(n_merged, SigmaProfile::constant(0));
  std::vector<bool> touched(n_merged, false);
  for (std::size_t i = 0; i < merged_index.size(); ++i) {
    const auto j = static_cast<std::size_t>(merged_index[i]);
    out[j] = touched[j] ? out[j] + per_atom[i] : per_atom[i];
    touched[j] = true;
  }
  return list(std::move(out));
}

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMat from_triplets(int n, const std::vector<Triplet>& trips) {
  SparseMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

SparseMat assemble_stiffness(const TriMesh& mesh) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (const auto& tri : mesh.triangles) {
    const Vec2& p0 = mesh.nodes[tri[0]];
    const Vec2& p1 = mesh.nodes[tri[1]];
    const Vec2& p2 = mesh.nodes[tri[2]];
    const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    const double area2 = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (!(area2 > 0)) throw std::invalid_argument("assemble_stiffness: degenerate triangle");
    const double scale = 1.0 / (2.0 * area2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) * scale);
  }
  return from_triplets(n, trips);
}

SparseMat assemble_mass(const TriMesh& mesh) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tri[i], tri[j], area / (i == j ? 6.0 : 12.0));
  }
  return from_triplets(n, trips);
}

SparseMat assemble_trace(const TriMesh& mesh, const EdgeGroup& chain, const SigmaProfile& sigma) {
  if (sigma.is_infinite())
    throw std::invalid_argument("assemble_trace: infinite profiles are Dirichlet eliminations");
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<Triplet> trips;
  for (const auto& edges : chain.chains) {
    for (const auto& e : edges) {
      const Vec2& p = mesh.nodes[e[0]];
      const Vec2& q = mesh.nodes[e[1]];
      const double len = std::hypot(q.x - p.x, q.y - p.y);
      const bool vertical = p.x == q.x;
      const double mid = vertical ? 0.5 * (p.y + q.y) : 0.5 * (p.x + q.x);
      const double w = sigma(mid);
      if (w == 0) continue;
      trips.emplace_back(e[0], e[0], w * len / 3.0);
      trips.emplace_back(e[1], e[1], w * len / 3.0);
      trips.emplace_back(e[0], e[1], w * len / 6.0);
      trips.emplace_back(e[1], e[0], w * len / 6.0);
    }
  }
  return from_triplets(n, trips);
}

namespace {

SparseMat reduce(const SparseMat& A, const std::vector<int>& dof_map, int n_free) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(A, k); it; ++it) {
      const int r = dof_map[static_cast<std::size_t>(it.row())];
      const int c = dof_map[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  return from_triplets(n_free, trips);
}

}  // namespace

AssembledForms apply_dirichlet(const SparseMat& K, const SparseMat& M, std::vector<SparseMat> T,
                               const TriMesh& mesh, const std::vector<TagRef>& dirichlet_tags) {
  const auto n = mesh.nodes.size();
  std::vector<bool> eliminated(n, false);
  for (const auto& g : mesh.groups) {
    const bool match = std::any_of(dirichlet_tags.begin(), dirichlet_tags.end(), [&](const TagRef& t) {
      return t.kind == g.kind && (t.index < 0 || t.index == g.index);
    });
    if (!match) continue;
    for (const auto& chain : g.chains)
      for (const auto& e : chain) {
        eliminated[static_cast<std::size_t>(e[0])] = true;
        eliminated[static_cast<std::size_t>(e[1])] = true;
      }
  }

  AssembledForms forms;
  forms.dof_map.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (eliminated[i]) continue;
    forms.dof_map[i] = static_cast<int>(forms.free_nodes.size());
    forms.free_nodes.push_back(static_cast<int>(i));
  }
  forms.n_dof = static_cast<int>(forms.free_nodes.size());
  if (forms.n_dof == 0) throw std::invalid_argument("apply_dirichlet: no free nodes remain");

  forms.K = reduce(K, forms.dof_map, forms.n_dof);
  forms.M = reduce(M, forms.dof_map, forms.n_dof);
  forms.T.reserve(T.size());
  for (const auto& t : T) forms.T.push_back(reduce(t, forms.dof_map, forms.n_dof));
  return forms;
}

SparseMat AssembledForms::operator_matrix() const {
  SparseMat A = K;
  for (const auto& t : T) A += t;
  A.makeCompressed();
  return A;
}

AssembledForms assemble_hamiltonian(const TriMesh& mesh, const SigmaAssignment& sigma) {
  const SparseMat K = assemble_stiffness(mesh);
  const SparseMat M = assemble_mass(mesh);

  std::vector<TagRef> dirichlet{{BoundaryKind::DirichletStrip, -1},
                                {BoundaryKind::DirichletTrunc, -1}};
  std::vector<SparseMat> T;
  for (const auto& g : mesh.groups) {
    if (g.kind != BoundaryKind::Gamma) continue;
    const SigmaProfile& profile = sigma.for_atom(static_cast<std::size_t>(g.index));
    if (profile.is_infinite()) {
      dirichlet.push_back({BoundaryKind::Gamma, g.index});
      T.emplace_back(static_cast<int>(mesh.nodes.size()), static_cast<int>(mesh.nodes.size()));
    } else {
      T.push_back(assemble_trace(mesh, g, profile));
    }
  }
  return apply_dirichlet(K, M, std::move(T), mesh, dirichlet);
}

AssembledForms assemble_tagged_problem(const TriMesh& mesh) {
  const SparseMat K = assemble_stiffness(mesh);
  const SparseMat M = assemble_mass(mesh);

  std::vector<TagRef> dirichlet;
  std::vector<SparseMat> T;
  for (const auto& g : mesh.groups) {
    switch (g.kind) {
      case BoundaryKind::Dirichlet:
      case BoundaryKind::DirichletStrip:
      case BoundaryKind::DirichletTrunc:
        dirichlet.push_back({g.kind, g.index});
        break;
      case BoundaryKind::Robin:
        T.push_back(assemble_trace(mesh, g, SigmaProfile::constant(g.robin_gamma)));
        break;
      default:
        break;
    }
  }
  return apply_dirichlet(K, M, std::move(T), mesh, dirichlet);
}

}  // namespace molspec
