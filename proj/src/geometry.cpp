// SPDX-License-Identifier: Apache-2.0
#include "molspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace molspec {

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::DirichletStrip: return "DIRICHLET_STRIP";
    case BoundaryKind::NeumannAxis:    return "NEUMANN_AXIS";
    case BoundaryKind::DirichletTrunc: return "DIRICHLET_TRUNC";
    case BoundaryKind::Gamma:          return "GAMMA";
    case BoundaryKind::Neumann:        return "NEUMANN";
    case BoundaryKind::Dirichlet:      return "DIRICHLET";
    case BoundaryKind::Robin:          return "ROBIN";
  }
  return "?";
}

std::size_t EdgeGroup::edge_count() const {
  std::size_t n = 0;
  for (const auto& chain : chains) n += chain.size();
  return n;
}

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec2& a = nodes[tri[0]];
  const Vec2& b = nodes[tri[1]];
  const Vec2& c = nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriMesh::total_area() const {
  double sum = 0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

double TriMesh::chain_length(const EdgeGroup& group) const {
  double len = 0;
  for (const auto& chain : group.chains)
    for (const auto& e : chain)
      len += std::hypot(nodes[e[1]].x - nodes[e[0]].x, nodes[e[1]].y - nodes[e[0]].y);
  return len;
}

const EdgeGroup* TriMesh::find_group(BoundaryKind kind, int index) const {
  for (const auto& g : groups)
    if (g.kind == kind && (index < 0 || g.index == index)) return &g;
  return nullptr;
}

namespace {

// Integer count of pitch units in `x`, rejecting off-lattice values.
std::int64_t lattice_index(double x, double h, const char* what) {
  const auto k = static_cast<std::int64_t>(std::llround(x / h));
  if (std::abs(x - static_cast<double>(k) * h) > 1e-9 * std::max(1.0, std::abs(x)))
    throw std::invalid_argument(std::string(what) + " is not a multiple of the mesh pitch");
  return k;
}

}  // namespace

StripSpec::StripSpec(double d_, double L_, int M_) : d(d_), L(L_), M(M_) {
  if (!(d > 0)) throw std::invalid_argument("StripSpec: d must be positive");
  if (M < 2) throw std::invalid_argument("StripSpec: M must be at least 2");
  if (!(L >= d)) throw std::invalid_argument("StripSpec: L must be at least d");
  lattice_index(L, pitch(), "StripSpec: L");
}

SnapResult snap_atoms(const std::vector<double>& atoms, double pitch) {
  if (!(pitch > 0)) throw std::invalid_argument("snap_atoms: pitch must be positive");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0)) throw std::invalid_argument("snap_atoms: atoms must be positive");
    if (i > 0 && !(atoms[i] > atoms[i - 1]))
      throw std::invalid_argument("snap_atoms: atoms must be strictly ascending");
  }
  SnapResult out;
  out.merged_index.reserve(atoms.size());
  for (double a : atoms) {
    // nearest multiple, ties up; clamped to the first positive multiple
    auto k = static_cast<std::int64_t>(std::floor(a / pitch + 0.5));
    if (k < 1) k = 1;
    const double snapped = static_cast<double>(k) * pitch;
    out.max_error = std::max(out.max_error, std::abs(a - snapped));
    if (out.atoms.empty() || snapped > out.atoms.back()) out.atoms.push_back(snapped);
    out.merged_index.push_back(static_cast<int>(out.atoms.size()) - 1);
  }
  return out;
}

TriMesh build_strip_mesh(const StripSpec& spec, const std::vector<double>& atoms) {
  const double h = spec.pitch();
  const int M = spec.M;
  const auto NL = lattice_index(spec.L, h, "build_strip_mesh: L");

  // lattice nodes (i,j), 0 <= i,j <= NL, |i-j| <= M, row-major
  std::vector<std::int64_t> row_start(NL + 2, 0);
  auto j_lo = [&](std::int64_t i) { return std::max<std::int64_t>(0, i - M); };
  auto j_hi = [&](std::int64_t i) { return std::min<std::int64_t>(NL, i + M); };
  for (std::int64_t i = 0; i <= NL; ++i)
    row_start[i + 1] = row_start[i] + (j_hi(i) - j_lo(i) + 1);

  TriMesh mesh;
  mesh.pitch = h;
  mesh.nodes.reserve(static_cast<std::size_t>(row_start[NL + 1]));
  for (std::int64_t i = 0; i <= NL; ++i)
    for (std::int64_t j = j_lo(i); j <= j_hi(i); ++j)
      mesh.nodes.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});

  auto id = [&](std::int64_t i, std::int64_t j) {
    return static_cast<int>(row_start[i] + (j - j_lo(i)));
  };

  // cells fully inside get both halves of the main-diagonal split; cells cut
  // by a strip wall keep the half on the strip side (the wall is the cell's
  // main diagonal)
  for (std::int64_t i = 0; i < NL; ++i) {
    for (std::int64_t j = 0; j < NL; ++j) {
      const std::int64_t dd = i - j;
      if (std::abs(dd) <= M - 1) {
        mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      } else if (dd == -M) {
        mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      } else if (dd == M) {
        mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
  }

  {
    EdgeGroup walls{BoundaryKind::DirichletStrip, -1, 0, {}};
    std::vector<MeshEdge> lower, upper;  // x-y = d and y-x = d
    for (std::int64_t i = M; i < NL; ++i)
      lower.push_back({id(i, i - M), id(i + 1, i + 1 - M)});
    for (std::int64_t i = 0; i + M < NL; ++i)
      upper.push_back({id(i, i + M), id(i + 1, i + 1 + M)});
    if (!lower.empty()) walls.chains.push_back(std::move(lower));
    if (!upper.empty()) walls.chains.push_back(std::move(upper));
    mesh.groups.push_back(std::move(walls));
  }
  {
    EdgeGroup axis{BoundaryKind::NeumannAxis, -1, 0, {}};
    std::vector<MeshEdge> x0, y0;
    for (std::int64_t j = 0; j < std::min<std::int64_t>(M, NL); ++j)
      x0.push_back({id(0, j), id(0, j + 1)});
    for (std::int64_t i = 0; i < std::min<std::int64_t>(M, NL); ++i)
      y0.push_back({id(i, 0), id(i + 1, 0)});
    axis.chains.push_back(std::move(x0));
    axis.chains.push_back(std::move(y0));
    mesh.groups.push_back(std::move(axis));
  }
  {
    EdgeGroup trunc{BoundaryKind::DirichletTrunc, -1, 0, {}};
    std::vector<MeshEdge> xL, yL;
    for (std::int64_t j = std::max<std::int64_t>(0, NL - M); j < NL; ++j)
      xL.push_back({id(NL, j), id(NL, j + 1)});
    for (std::int64_t i = std::max<std::int64_t>(0, NL - M); i < NL; ++i)
      yL.push_back({id(i, NL), id(i + 1, NL)});
    trunc.chains.push_back(std::move(xL));
    trunc.chains.push_back(std::move(yL));
    mesh.groups.push_back(std::move(trunc));
  }

  double prev = 0;
  for (std::size_t n = 0; n < atoms.size(); ++n) {
    const double a = atoms[n];
    if (!(a > prev)) throw std::invalid_argument("build_strip_mesh: atoms must be strictly ascending");
    prev = a;
    const auto k = lattice_index(a, h, "build_strip_mesh: atom");
    EdgeGroup gamma{BoundaryKind::Gamma, static_cast<int>(n), 0, {}};
    if (k >= 1 && k < NL) {
      std::vector<MeshEdge> vertical, horizontal;  // x = a and y = a
      for (std::int64_t j = std::max<std::int64_t>(0, k - M); j < std::min(NL, k + M); ++j)
        vertical.push_back({id(k, j), id(k, j + 1)});
      for (std::int64_t i = std::max<std::int64_t>(0, k - M); i < std::min(NL, k + M); ++i)
        horizontal.push_back({id(i, k), id(i + 1, k)});
      gamma.chains.push_back(std::move(vertical));
      gamma.chains.push_back(std::move(horizontal));
    }
    mesh.groups.push_back(std::move(gamma));
  }
  return mesh;
}

namespace {

struct LatticePoint {
  std::int64_t x, y;
};

// Exact point-in-polygon on the integer lattice (coordinates pre-scaled so
// centroids are integral). Boundary points count as inside.
bool on_polygon_boundary(const std::vector<LatticePoint>& poly, std::int64_t px, std::int64_t py) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const std::int64_t cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
    if (cross != 0) continue;
    if (px < std::min(a.x, b.x) || px > std::max(a.x, b.x)) continue;
    if (py < std::min(a.y, b.y) || py > std::max(a.y, b.y)) continue;
    return true;
  }
  return false;
}

bool strictly_inside_polygon(const std::vector<LatticePoint>& poly, std::int64_t px, std::int64_t py) {
  if (on_polygon_boundary(poly, px, py)) return false;
  const std::size_t n = poly.size();
  int crossings = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    if ((a.y > py) == (b.y > py)) continue;
    // ray towards +x crosses edge iff the intersection abscissa exceeds px
    const std::int64_t num = (a.x - px) * (b.y - a.y) + (b.x - a.x) * (py - a.y);
    if (num * (b.y - a.y) > 0) ++crossings;
  }
  return (crossings % 2) == 1;
}

}  // namespace

TriMesh build_polygon_mesh(const PolygonSpec& spec) {
  if (!(spec.pitch > 0)) throw std::invalid_argument("build_polygon_mesh: pitch must be positive");
  const std::size_t nv = spec.vertices.size();
  if (nv < 3) throw std::invalid_argument("build_polygon_mesh: need at least 3 vertices");
  if (spec.edge_tags.size() != nv)
    throw std::invalid_argument("build_polygon_mesh: one tag per polygon edge required");

  const double h = spec.pitch;
  std::vector<LatticePoint> lat(nv);
  for (std::size_t i = 0; i < nv; ++i)
    lat[i] = {lattice_index(spec.vertices[i].x, h, "build_polygon_mesh: vertex"),
              lattice_index(spec.vertices[i].y, h, "build_polygon_mesh: vertex")};

  std::int64_t area2 = 0;  // shoelace, lattice units
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& a = lat[i];
    const auto& b = lat[(i + 1) % nv];
    area2 += a.x * b.y - b.x * a.y;
    const std::int64_t dx = b.x - a.x, dy = b.y - a.y;
    if (dx == 0 && dy == 0) throw std::invalid_argument("build_polygon_mesh: degenerate edge");
    if (dx != 0 && dy != 0) {
      if (std::abs(dx) != std::abs(dy))
        throw std::invalid_argument("build_polygon_mesh: edges must be axis-aligned or 45 degrees");
      const DiagonalSplit orient = (dx * dy > 0) ? DiagonalSplit::Main : DiagonalSplit::Anti;
      if (orient != spec.split)
        throw std::invalid_argument("build_polygon_mesh: diagonal edge conflicts with diagonal_split");
    }
  }
  if (area2 <= 0) throw std::invalid_argument("build_polygon_mesh: vertices must be counterclockwise");

  // scale by 3 so sub-triangle centroids are lattice points
  std::vector<LatticePoint> poly3(nv);
  for (std::size_t i = 0; i < nv; ++i) poly3[i] = {3 * lat[i].x, 3 * lat[i].y};

  std::int64_t xmin = lat[0].x, xmax = lat[0].x, ymin = lat[0].y, ymax = lat[0].y;
  for (const auto& p : lat) {
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }

  TriMesh mesh;
  mesh.pitch = h;
  std::map<std::pair<std::int64_t, std::int64_t>, int> node_id;
  auto get_node = [&](std::int64_t i, std::int64_t j) {
    auto [it, inserted] = node_id.try_emplace({i, j}, static_cast<int>(mesh.nodes.size()));
    if (inserted) mesh.nodes.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
    return it->second;
  };

  // the polygon boundary never crosses a sub-triangle interior, so a
  // triangle is kept iff its centroid lies strictly inside
  for (std::int64_t i = xmin; i < xmax; ++i) {
    for (std::int64_t j = ymin; j < ymax; ++j) {
      if (spec.split == DiagonalSplit::Main) {
        if (strictly_inside_polygon(poly3, 3 * i + 2, 3 * j + 1))
          mesh.triangles.push_back({get_node(i, j), get_node(i + 1, j), get_node(i + 1, j + 1)});
        if (strictly_inside_polygon(poly3, 3 * i + 1, 3 * j + 2))
          mesh.triangles.push_back({get_node(i, j), get_node(i + 1, j + 1), get_node(i, j + 1)});
      } else {
        if (strictly_inside_polygon(poly3, 3 * i + 1, 3 * j + 1))
          mesh.triangles.push_back({get_node(i, j), get_node(i + 1, j), get_node(i, j + 1)});
        if (strictly_inside_polygon(poly3, 3 * i + 2, 3 * j + 2))
          mesh.triangles.push_back({get_node(i + 1, j), get_node(i + 1, j + 1), get_node(i, j + 1)});
      }
    }
  }

  const double analytic_area = 0.5 * static_cast<double>(area2) * h * h;
  if (std::abs(mesh.total_area() - analytic_area) > 1e-12 * analytic_area)
    throw std::invalid_argument("build_polygon_mesh: pitch does not resolve the polygon");

  for (std::size_t e = 0; e < nv; ++e) {
    const auto& a = lat[e];
    const auto& b = lat[(e + 1) % nv];
    const std::int64_t steps = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    const std::int64_t sx = (b.x > a.x) - (b.x < a.x);
    const std::int64_t sy = (b.y > a.y) - (b.y < a.y);
    EdgeGroup group{spec.edge_tags[e].kind, static_cast<int>(e), spec.edge_tags[e].robin_gamma, {}};
    std::vector<MeshEdge> chain;
    for (std::int64_t s = 0; s < steps; ++s) {
      const auto p = node_id.find({a.x + s * sx, a.y + s * sy});
      const auto q = node_id.find({a.x + (s + 1) * sx, a.y + (s + 1) * sy});
      if (p == node_id.end() || q == node_id.end())
        throw std::invalid_argument("build_polygon_mesh: boundary node missing (pitch too coarse)");
      chain.push_back({p->second, q->second});
    }
    group.chains.push_back(std::move(chain));
    mesh.groups.push_back(std::move(group));
  }
  return mesh;
}

TriMesh build_rect_mesh(double x0, double y0, double hx, double hy, int nx, int ny,
                        const std::array<PolygonEdgeTag, 4>& side_tags) {
  if (!(hx > 0) || !(hy > 0) || nx < 1 || ny < 1)
    throw std::invalid_argument("build_rect_mesh: invalid dimensions");
  TriMesh mesh;
  mesh.pitch = std::min(hx, hy);
  auto id = [&](int i, int j) { return i * (ny + 1) + j; };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      mesh.nodes.push_back({x0 + i * hx, y0 + j * hy});
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  // sides ordered {left, right, bottom, top}
  for (int side = 0; side < 4; ++side) {
    EdgeGroup group{side_tags[side].kind, side, side_tags[side].robin_gamma, {}};
    std::vector<MeshEdge> chain;
    if (side < 2) {
      const int i = (side == 0) ? 0 : nx;
      for (int j = 0; j < ny; ++j) chain.push_back({id(i, j), id(i, j + 1)});
    } else {
      const int j = (side == 2) ? 0 : ny;
      for (int i = 0; i < nx; ++i) chain.push_back({id(i, j), id(i + 1, j)});
    }
    group.chains.push_back(std::move(chain));
    mesh.groups.push_back(std::move(group));
  }
  return mesh;
}

PolygonSpec make_square_robin(double a, double gamma, double pitch) {
  PolygonSpec spec;
  spec.vertices = {{0, 0}, {a, 0}, {a, a}, {0, a}};
  spec.edge_tags = {{BoundaryKind::Neumann, 0},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Neumann, 0}};
  spec.pitch = pitch;
  spec.split = DiagonalSplit::Main;
  return spec;
}

PolygonSpec make_corner_triangle(double side, double gamma, double pitch) {
  PolygonSpec spec;
  spec.vertices = {{0, 0}, {side, 0}, {0, side}};
  spec.edge_tags = {{BoundaryKind::Robin, gamma},
                    {BoundaryKind::Neumann, 0},
                    {BoundaryKind::Robin, gamma}};
  spec.pitch = pitch;
  spec.split = DiagonalSplit::Anti;
  return spec;
}

PolygonSpec make_trapezoid(double d, double a, double gamma, double pitch) {
  if (!(a > 0) || !(2 * a < d)) throw std::invalid_argument("make_trapezoid: need 0 < a < d/2");
  PolygonSpec spec;
  spec.vertices = {{0, a}, {a, a}, {a, d - a}, {0, d}};
  spec.edge_tags = {{BoundaryKind::Robin, gamma},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Neumann, 0},
                    {BoundaryKind::Neumann, 0}};
  spec.pitch = pitch;
  spec.split = DiagonalSplit::Anti;
  return spec;
}

PolygonSpec make_half_cross(double d, double a, double gamma, double pitch) {
  if (!(a > 0) || !(2 * a < d)) throw std::invalid_argument("make_half_cross: need 0 < a < d/2");
  PolygonSpec spec;
  spec.vertices = {{0, a}, {a, a}, {a, d - a}, {d - a, d - a}, {d - a, d}, {0, d}};
  spec.edge_tags = {{BoundaryKind::Robin, gamma},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Robin, gamma},
                    {BoundaryKind::Neumann, 0},
                    {BoundaryKind::Neumann, 0}};
  spec.pitch = pitch;
  spec.split = DiagonalSplit::Main;
  return spec;
}

}  // namespace molspec
