#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/geometry.hpp"

namespace olmfsi {

using Index = int;
using Cell = std::array<Index, 3>;

/// Boundary markers. Rectangle generators tag sides 1-4; the fluid-solid
/// interface of an extracted sub-mesh is tagged kFluidSolid.
namespace markers {
inline constexpr int kLeft = 1;
inline constexpr int kRight = 2;
inline constexpr int kBottom = 3;
inline constexpr int kTop = 4;
inline constexpr int kFluidSolid = 5;
}  // namespace markers

/// Cell region tags of the composite moving mesh.
namespace region {
inline constexpr int kFluid = 0;
inline constexpr int kSolid = 1;
}  // namespace region

struct BoundaryEdge {
  std::array<Index, 2> v;
  int marker = 0;
};

struct Rect {
  Vec2 lo;
  Vec2 hi;
  double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
};

/// Triangular 2D mesh. Cells are stored counterclockwise; clockwise input is
/// reoriented, zero-area input is rejected. Immutable after construction.
class Mesh {
 public:
  Mesh() = default;

  Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells, std::vector<BoundaryEdge> boundary = {},
       std::vector<int> regions = {})
      : vertices_(std::move(vertices)),
        cells_(std::move(cells)),
        boundary_(std::move(boundary)),
        regions_(std::move(regions)) {
    if (regions_.empty()) regions_.assign(cells_.size(), region::kFluid);
    if (regions_.size() != cells_.size()) throw GeometryError("mesh: region tag count differs from cell count");
    const Index nv = static_cast<Index>(vertices_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      Cell& cell = cells_[c];
      for (Index v : cell)
        if (v < 0 || v >= nv) throw GeometryError("mesh: cell " + std::to_string(c) + " has vertex index out of range");
      const Vec2 a = vertices_[cell[0]], b = vertices_[cell[1]], c2 = vertices_[cell[2]];
      const double sa = triangle_signed_area(a, b, c2);
      const double scale = std::max({norm(b - a), norm(c2 - b), norm(a - c2)});
      if (!(std::abs(sa) > 1e-15 * scale * scale))
        throw GeometryError("mesh: cell " + std::to_string(c) + " has zero area");
      if (sa < 0.0) std::swap(cell[1], cell[2]);
    }
    for (const BoundaryEdge& e : boundary_)
      for (Index v : e.v)
        if (v < 0 || v >= nv) throw GeometryError("mesh: boundary edge vertex index out of range");
  }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }
  bool empty() const { return cells_.empty(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::vector<int>& regions() const { return regions_; }

  const Vec2& vertex(Index v) const { return vertices_[v]; }
  const Cell& cell(Index c) const { return cells_[c]; }
  int region_of(Index c) const { return regions_[c]; }

  std::array<Vec2, 3> cell_points(Index c) const {
    const Cell& t = cells_[c];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }
  Polygon cell_polygon(Index c) const {
    auto p = cell_points(c);
    return {p[0], p[1], p[2]};
  }
  double cell_area(Index c) const {
    auto p = cell_points(c);
    return triangle_signed_area(p[0], p[1], p[2]);
  }
  double total_area() const {
    double a = 0.0;
    for (Index c = 0; c < num_cells(); ++c) a += cell_area(c);
    return a;
  }
  BoundingBox cell_box(Index c) const { return bounding_box(cell_points(c)); }
  BoundingBox box() const { return bounding_box(vertices_); }

  /// Same connectivity, tags and markers with moved vertices.
  Mesh with_vertices(std::vector<Vec2> moved) const {
    if (moved.size() != vertices_.size()) throw GeometryError("mesh: vertex count mismatch");
    return Mesh(std::move(moved), cells_, boundary_, regions_);
  }

 private:
  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> regions_;
};

namespace detail {

inline std::int64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace detail

/// Tensor-product triangulation over coordinate lines xs x ys; each quad is
/// split along its (lo-left, hi-right) diagonal. Sides get markers 1-4.
inline Mesh build_tensor_mesh(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2 || ys.size() < 2) throw GeometryError("tensor mesh: need at least two lines per direction");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw GeometryError("tensor mesh: x lines not increasing");
  for (std::size_t j = 1; j < ys.size(); ++j)
    if (!(ys[j] > ys[j - 1])) throw GeometryError("tensor mesh: y lines not increasing");
  const Index nx = static_cast<Index>(xs.size()) - 1;
  const Index ny = static_cast<Index>(ys.size()) - 1;
  auto id = [&](Index i, Index j) { return j * (nx + 1) + i; };

  std::vector<Vec2> v;
  v.reserve((nx + 1) * (ny + 1));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i) v.push_back({xs[i], ys[j]});

  std::vector<Cell> cells;
  cells.reserve(2 * nx * ny);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  std::vector<BoundaryEdge> b;
  for (Index i = 0; i < nx; ++i) b.push_back({{id(i, 0), id(i + 1, 0)}, markers::kBottom});
  for (Index j = 0; j < ny; ++j) b.push_back({{id(nx, j), id(nx, j + 1)}, markers::kRight});
  for (Index i = nx; i > 0; --i) b.push_back({{id(i, ny), id(i - 1, ny)}, markers::kTop});
  for (Index j = ny; j > 0; --j) b.push_back({{id(0, j), id(0, j - 1)}, markers::kLeft});
  return Mesh(std::move(v), std::move(cells), std::move(b));
}

/// Structured triangulation of an axis-aligned rectangle: 2 nx ny cells.
inline Mesh build_rect_mesh(Index nx, Index ny, const Rect& bbox) {
  if (nx < 1 || ny < 1) throw GeometryError("rect mesh: nx and ny must be >= 1");
  if (!(bbox.hi.x > bbox.lo.x) || !(bbox.hi.y > bbox.lo.y)) throw GeometryError("rect mesh: degenerate bounding box");
  std::vector<double> xs(nx + 1), ys(ny + 1);
  for (Index i = 0; i <= nx; ++i) xs[i] = bbox.lo.x + (bbox.hi.x - bbox.lo.x) * i / nx;
  for (Index j = 0; j <= ny; ++j) ys[j] = bbox.lo.y + (bbox.hi.y - bbox.lo.y) * j / ny;
  xs[nx] = bbox.hi.x;
  ys[ny] = bbox.hi.y;
  return build_tensor_mesh(xs, ys);
}

/// Longest edge of the cell.
inline double element_diameter(const Mesh& mesh, Index cell) {
  auto p = mesh.cell_points(cell);
  return std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
}

inline double max_diameter(const Mesh& mesh) {
  double h = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) h = std::max(h, element_diameter(mesh, c));
  return h;
}

/// Affine map x = origin + J xi from the unit reference triangle.
struct AffineMap {
  Vec2 origin;
  Mat2 jacobian;
  double det = 0.0;

  Vec2 to_physical(const Vec2& xi) const { return origin + jacobian * xi; }
  Vec2 to_reference(const Vec2& x) const { return jacobian.inverse() * (x - origin); }
};

inline AffineMap affine_map(const Mesh& mesh, Index cell) {
  auto p = mesh.cell_points(cell);
  AffineMap m;
  m.origin = p[0];
  m.jacobian = Mat2::from_rows(p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y);
  m.det = m.jacobian.det();
  return m;
}

/// Reference P1 basis on the unit triangle: 1 - xi - eta, xi, eta.
struct P1Element {
  static std::array<double, 3> values(const Vec2& xi) { return {1.0 - xi.x - xi.y, xi.x, xi.y}; }
  static std::array<Vec2, 3> reference_gradients() { return {Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}; }
};

/// Physical gradients of the three P1 hat functions on a cell (constant per cell).
inline std::array<Vec2, 3> p1_gradients(const Mesh& mesh, Index cell) {
  const AffineMap m = affine_map(mesh, cell);
  if (!(std::abs(m.det) > 0.0)) throw GeometryError("p1_gradients: degenerate cell " + std::to_string(cell));
  const Mat2 jit = m.jacobian.inverse().transpose();
  const auto ref = P1Element::reference_gradients();
  return {jit * ref[0], jit * ref[1], jit * ref[2]};
}

/// Barycentric coordinates (= P1 basis values) of a point with respect to a cell.
inline std::array<double, 3> p1_values(const Mesh& mesh, Index cell, const Vec2& x) {
  auto p = mesh.cell_points(cell);
  const double d = cross(p[1] - p[0], p[2] - p[0]);
  const double l1 = cross(x - p[0], p[2] - p[0]) / d;
  const double l2 = cross(p[1] - p[0], x - p[0]) / d;
  return {1.0 - l1 - l2, l1, l2};
}

/// Constant gradient (row i = d u_i) of a P1 vector field on a cell.
inline Mat2 p1_gradient(const Mesh& mesh, Index cell, const std::vector<Vec2>& nodal) {
  const auto g = p1_gradients(mesh, cell);
  Mat2 d;
  for (int i = 0; i < 3; ++i) d += Mat2::outer(nodal[mesh.cell(cell)[i]], g[i]);
  return d;
}

inline std::vector<double> interpolate(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
  std::vector<double> out(mesh.num_vertices());
  for (Index v = 0; v < mesh.num_vertices(); ++v) out[v] = f(mesh.vertex(v));
  return out;
}

inline std::vector<Vec2> interpolate_vector(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& f) {
  std::vector<Vec2> out(mesh.num_vertices());
  for (Index v = 0; v < mesh.num_vertices(); ++v) out[v] = f(mesh.vertex(v));
  return out;
}

template <typename T>
T evaluate_p1(const Mesh& mesh, Index cell, const std::vector<T>& nodal, const Vec2& x) {
  const auto phi = p1_values(mesh, cell, x);
  const Cell& t = mesh.cell(cell);
  return phi[0] * nodal[t[0]] + phi[1] * nodal[t[1]] + phi[2] * nodal[t[2]];
}

/// Uniform quadrisection: every triangle split into four through edge midpoints.
inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> v = mesh.vertices();
  std::unordered_map<std::int64_t, Index> mid;
  auto midpoint = [&](Index a, Index b) {
    const auto key = detail::edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    v.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
    const Index id = static_cast<Index>(v.size()) - 1;
    mid.emplace(key, id);
    return id;
  };
  std::vector<Cell> cells;
  std::vector<int> regions;
  cells.reserve(4 * mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Cell& t = mesh.cell(c);
    const Index ab = midpoint(t[0], t[1]);
    const Index bc = midpoint(t[1], t[2]);
    const Index ca = midpoint(t[2], t[0]);
    cells.push_back({t[0], ab, ca});
    cells.push_back({ab, t[1], bc});
    cells.push_back({ca, bc, t[2]});
    cells.push_back({ab, bc, ca});
    for (int k = 0; k < 4; ++k) regions.push_back(mesh.region_of(c));
  }
  std::vector<BoundaryEdge> b;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    const Index m = midpoint(e.v[0], e.v[1]);
    b.push_back({{e.v[0], m}, e.marker});
    b.push_back({{m, e.v[1]}, e.marker});
  }
  return Mesh(std::move(v), std::move(cells), std::move(b), std::move(regions));
}

/// Applies a point map to every vertex (orientation is restored by the constructor).
inline Mesh transform(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& f) {
  std::vector<Vec2> v;
  v.reserve(mesh.num_vertices());
  for (const Vec2& p : mesh.vertices()) v.push_back(f(p));
  return Mesh(std::move(v), mesh.cells(), mesh.boundary_edges(), mesh.regions());
}

inline Mesh translate(const Mesh& mesh, const Vec2& shift) {
  return transform(mesh, [&](const Vec2& p) { return p + shift; });
}

/// Same mesh with region tags chosen from each cell centroid.
inline Mesh tag_regions(const Mesh& mesh, const std::function<int(const Vec2&)>& tag_of_centroid) {
  std::vector<int> regions(mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) regions[c] = tag_of_centroid(centroid(mesh.cell_polygon(c)));
  return Mesh(mesh.vertices(), mesh.cells(), mesh.boundary_edges(), std::move(regions));
}

/// Edge on the topological boundary (belongs to exactly one cell), oriented
/// counterclockwise with respect to its owner cell.
struct BoundaryFacet {
  Index a;
  Index b;
  Index cell;
};

inline std::vector<BoundaryFacet> boundary_facets(const Mesh& mesh, const std::function<bool(Index)>& include_cell = {}) {
  std::unordered_map<std::int64_t, std::pair<int, BoundaryFacet>> count;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (include_cell && !include_cell(c)) continue;
    const Cell& t = mesh.cell(c);
    for (int k = 0; k < 3; ++k) {
      const Index a = t[k];
      const Index b = t[(k + 1) % 3];
      auto& entry = count[detail::edge_key(a, b)];
      entry.first += 1;
      entry.second = {a, b, c};
    }
  }
  std::vector<BoundaryFacet> out;
  for (const auto& [key, entry] : count)
    if (entry.first == 1) out.push_back(entry.second);
  std::sort(out.begin(), out.end(), [](const BoundaryFacet& l, const BoundaryFacet& r) {
    return std::tie(l.cell, l.a, l.b) < std::tie(r.cell, r.a, r.b);
  });
  return out;
}

/// True when every boundary vertex has exactly two incident boundary edges.
inline bool boundary_is_closed(const Mesh& mesh) {
  std::unordered_map<Index, int> degree;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    degree[e.v[0]] += 1;
    degree[e.v[1]] += 1;
  }
  for (const auto& [v, d] : degree)
    if (d != 2) return false;
  return !degree.empty();
}

/// Sub-mesh of all cells with a given region tag, with index maps to the parent.
struct SubMesh {
  Mesh mesh;
  std::vector<Index> vertex_to_parent;
  std::vector<Index> cell_to_parent;
  std::vector<Index> parent_to_vertex;  // -1 where the parent vertex is not used
};

/// Extracts cells tagged `tag`. Boundary markers are inherited from the parent;
/// edges interior to the parent (the region interface) are tagged kFluidSolid.
inline SubMesh extract_region(const Mesh& parent, int tag) {
  SubMesh s;
  s.parent_to_vertex.assign(parent.num_vertices(), -1);
  std::vector<Cell> cells;
  for (Index c = 0; c < parent.num_cells(); ++c) {
    if (parent.region_of(c) != tag) continue;
    Cell local{};
    for (int k = 0; k < 3; ++k) {
      const Index pv = parent.cell(c)[k];
      if (s.parent_to_vertex[pv] < 0) {
        s.parent_to_vertex[pv] = static_cast<Index>(s.vertex_to_parent.size());
        s.vertex_to_parent.push_back(pv);
      }
      local[k] = s.parent_to_vertex[pv];
    }
    cells.push_back(local);
    s.cell_to_parent.push_back(c);
  }
  std::vector<Vec2> v;
  v.reserve(s.vertex_to_parent.size());
  for (Index pv : s.vertex_to_parent) v.push_back(parent.vertex(pv));

  std::unordered_map<std::int64_t, int> parent_marker;
  for (const BoundaryEdge& e : parent.boundary_edges()) parent_marker[detail::edge_key(e.v[0], e.v[1])] = e.marker;

  std::vector<BoundaryEdge> b;
  const auto facets = boundary_facets(parent, [&](Index c) { return parent.region_of(c) == tag; });
  for (const BoundaryFacet& f : facets) {
    auto it = parent_marker.find(detail::edge_key(f.a, f.b));
    const int marker = it != parent_marker.end() ? it->second : markers::kFluidSolid;
    b.push_back({{s.parent_to_vertex[f.a], s.parent_to_vertex[f.b]}, marker});
  }
  s.mesh = Mesh(std::move(v), std::move(cells), std::move(b));
  return s;
}

}  // namespace olmfsi
