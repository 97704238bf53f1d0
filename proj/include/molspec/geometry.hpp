// geometry.hpp
// Structured right-triangle meshes: the truncated diagonal strip
// {(x,y) in R^2_+ : |x-y| <= d, x,y <= L} and the axis-aligned comparison
// domains (square, corner triangle, trapezoid, half-cross, rectangles).
// All meshes live on a uniform lattice of pitch h; interaction lines and
// boundary pieces are resolved exactly as unions of mesh edges.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

namespace molspec {

struct Vec2 {
  double x = 0;
  double y = 0;
};

enum class BoundaryKind {
  DirichletStrip,  // strip walls |x-y| = d
  NeumannAxis,     // coordinate axes x = 0, y = 0
  DirichletTrunc,  // truncation cut x = L, y = L
  Gamma,           // interaction segment of one atom (interior interface)
  Neumann,         // polygon edge, natural condition
  Dirichlet,       // polygon edge, essential condition
  Robin,           // polygon edge with finite coefficient
};

const char* to_string(BoundaryKind kind);

// Oriented unit mesh edge, node ids.
using MeshEdge = std::array<int, 2>;

// A tagged set of edge chains. Within one chain consecutive edges share a
// node; a group may hold several disjoint chains (e.g. the two strip walls,
// or the vertical + horizontal legs of one interaction line).
struct EdgeGroup {
  BoundaryKind kind = BoundaryKind::Neumann;
  int index = -1;          // atom index for Gamma, polygon edge index otherwise
  double robin_gamma = 0;  // Robin chains only
  std::vector<std::vector<MeshEdge>> chains;

  std::size_t edge_count() const;
};

struct TriMesh {
  double pitch = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<EdgeGroup> groups;

  double total_area() const;
  double chain_length(const EdgeGroup& group) const;
  // First group matching (kind, index); index -1 matches any index.
  const EdgeGroup* find_group(BoundaryKind kind, int index = -1) const;
  double triangle_area(std::size_t t) const;
};

// Truncated strip Omega_L; h = d/M is the grid pitch in both coordinates.
struct StripSpec {
  double d;
  double L;
  int M;

  StripSpec(double d_, double L_, int M_);  // validates invariants
  double pitch() const { return d / M; }
};

struct SnapResult {
  std::vector<double> atoms;      // snapped, ascending, duplicates merged
  double max_error = 0;           // max |input - snapped|
  std::vector<int> merged_index;  // input atom -> index into .atoms
};

// Snap atom positions to the nearest positive multiple of the pitch
// (ties round up); merges duplicates created by snapping.
SnapResult snap_atoms(const std::vector<double>& atoms, double pitch);

// Uniform right-triangle mesh of the truncated strip. Atoms must lie on the
// grid (use snap_atoms first); atoms whose segments miss the domain produce
// empty Gamma groups.
TriMesh build_strip_mesh(const StripSpec& spec, const std::vector<double>& atoms);

enum class DiagonalSplit { Main, Anti };  // cell split along y=x or y=-x

struct PolygonEdgeTag {
  BoundaryKind kind = BoundaryKind::Neumann;
  double robin_gamma = 0;
};

// Axis-aligned polygon (counterclockwise) with optional +-45 degree edges;
// all vertices on the pitch lattice.
struct PolygonSpec {
  std::vector<Vec2> vertices;
  std::vector<PolygonEdgeTag> edge_tags;  // edge i runs vertices[i] -> vertices[i+1]
  double pitch = 0;
  DiagonalSplit split = DiagonalSplit::Main;
};

TriMesh build_polygon_mesh(const PolygonSpec& spec);

// Rectangle [x0, x0+nx*hx] x [y0, y0+ny*hy] with anisotropic pitch; side
// tags ordered {left, right, bottom, top}. Used by the rectangle-scaling
// harnesses where the two directions stretch independently.
TriMesh build_rect_mesh(double x0, double y0, double hx, double hy, int nx, int ny,
                        const std::array<PolygonEdgeTag, 4>& side_tags);

// Comparison domains of the dissected corner triangle, anchored at the
// origin. `gamma` tags the interaction-facing sides Robin; gamma = 0 keeps
// them Robin-tagged with zero weight.
PolygonSpec make_square_robin(double a, double gamma, double pitch);
PolygonSpec make_corner_triangle(double side, double gamma, double pitch);
PolygonSpec make_trapezoid(double d, double a, double gamma, double pitch);
PolygonSpec make_half_cross(double d, double a, double gamma, double pitch);

}  // namespace molspec
