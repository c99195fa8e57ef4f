#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/geometry.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/quadrature.hpp"

namespace olmfsi {

/// Uniform bin grid over cell bounding boxes for candidate lookup.
class CellLocator {
 public:
  explicit CellLocator(const Mesh& mesh) : mesh_(&mesh), stamp_(mesh.num_cells(), 0) {
    if (mesh.empty()) return;
    box_ = mesh.box();
    const double n = std::sqrt(static_cast<double>(mesh.num_cells()));
    const double w = std::max(box_.hi.x - box_.lo.x, 1e-300);
    const double hgt = std::max(box_.hi.y - box_.lo.y, 1e-300);
    const double aspect = w / hgt;
    nx_ = std::clamp(static_cast<int>(std::ceil(n * std::sqrt(aspect))), 1, 1024);
    ny_ = std::clamp(static_cast<int>(std::ceil(n / std::sqrt(aspect))), 1, 1024);
    bins_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      const BoundingBox b = mesh.cell_box(c);
      auto [i0, j0] = bin_of(b.lo);
      auto [i1, j1] = bin_of(b.hi);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bins_[j * nx_ + i].push_back(c);
    }
  }

  /// Cells whose bounding box may overlap `query` (each reported once, ascending).
  std::vector<Index> candidates(const BoundingBox& query) const {
    std::vector<Index> out;
    if (bins_.empty() || !box_.overlaps(query, 1e-12 * box_.diagonal())) return out;
    ++generation_;
    auto [i0, j0] = bin_of(query.lo);
    auto [i1, j1] = bin_of(query.hi);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        for (Index c : bins_[j * nx_ + i]) {
          if (stamp_[c] == generation_) continue;
          stamp_[c] = generation_;
          if (mesh_->cell_box(c).overlaps(query, 1e-12 * box_.diagonal())) out.push_back(c);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<int, int> bin_of(const Vec2& p) const {
    const double fx = (p.x - box_.lo.x) / std::max(box_.hi.x - box_.lo.x, 1e-300);
    const double fy = (p.y - box_.lo.y) / std::max(box_.hi.y - box_.lo.y, 1e-300);
    return {std::clamp(static_cast<int>(fx * nx_), 0, nx_ - 1), std::clamp(static_cast<int>(fy * ny_), 0, ny_ - 1)};
  }

  const Mesh* mesh_;
  BoundingBox box_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<Index>> bins_;
  mutable std::vector<std::uint64_t> stamp_;
  mutable std::uint64_t generation_ = 0;
};

/// Relation of a background cell to the moving composite domain.
enum class CellClass : std::uint8_t {
  NotOverlapped,    // inside the closure of the background fluid domain
  FullyOverlapped,  // inside the closure of the composite domain
  Partial,          // both parts have positive measure
};

/// Nonempty intersection of a background cell with one front cell.
struct CoveredPiece {
  Index front_cell;
  Polygon polygon;
};

/// Piece of the fluid-fluid interface with its two parent cells. The normal
/// points from the moving fluid domain into the background fluid domain.
struct InterfaceSegment {
  Index background_cell;
  Index front_cell;
  Vec2 a;
  Vec2 b;
  Vec2 normal;
  QuadratureRule rule;

  double length() const { return norm(b - a); }
};

/// Intersection of a moving-fluid cell with a reduced background cell.
struct OverlapPair {
  Index front_cell;
  Index background_cell;
  Polygon polygon;
  QuadratureRule rule;
};

struct OverlapTopology {
  int order = 2;
  std::vector<CellClass> cell_class;
  std::vector<Index> class_not;
  std::vector<Index> class_fully;
  std::vector<Index> class_partial;
  std::vector<Index> reduced_cells;  // class_not followed by class_partial, ascending within each
  std::vector<std::vector<CoveredPiece>> pieces;  // per background cell; filled for partial cells
  std::vector<QuadratureRule> cut_rules;           // per background cell; filled for partial cells
  std::vector<InterfaceSegment> interface_segments;
  std::vector<OverlapPair> overlap_pairs;

  bool is_reduced(Index c) const { return cell_class[c] != CellClass::FullyOverlapped; }

  /// Stored cut rule of a partial cell.
  const QuadratureRule& cut_rule(Index c) const {
    if (cell_class.at(c) != CellClass::Partial)
      throw GeometryError("cut rule requested for cell " + std::to_string(c) + " which is not partially overlapped");
    return cut_rules[c];
  }

  double interface_length() const {
    double l = 0.0;
    for (const auto& s : interface_segments) l += s.length();
    return l;
  }
  double overlap_area() const {
    double a = 0.0;
    for (const auto& p : overlap_pairs) a += area(p.polygon);
    return a;
  }
};

namespace detail {

inline std::vector<CoveredPiece> covered_pieces(const Polygon& cell, const Mesh& front, const CellLocator& locator) {
  std::vector<CoveredPiece> out;
  for (Index k : locator.candidates(bounding_box(cell))) {
    Polygon p = intersect_convex(cell, front.cell_polygon(k));
    if (!p.empty()) out.push_back({k, std::move(p)});
  }
  return out;
}

/// Full-cell rule minus the rules on all covered pieces.
inline QuadratureRule subtractive_rule(const Polygon& cell, const std::vector<CoveredPiece>& pieces, int order) {
  QuadratureRule r = triangle_rule(cell[0], cell[1], cell[2], order);
  for (const CoveredPiece& p : pieces) r.append(polygon_rule(p.polygon, order), -1.0);
  return r;
}

inline double covered_area(const std::vector<CoveredPiece>& pieces) {
  double a = 0.0;
  for (const auto& p : pieces) a += area(p.polygon);
  return a;
}

// Relative area threshold separating "touching" from "overlapping".
inline constexpr double kAreaTolerance = 1e-10;

}  // namespace detail

/// Quadrature over T minus the composite domain, built subtractively.
/// Returns the plain cell rule for an untouched cell and an empty rule for a
/// fully covered one.
inline QuadratureRule cut_cell_quadrature(const Mesh& background, Index cell, const Mesh& front, int order = 2) {
  const Polygon t = background.cell_polygon(cell);
  const CellLocator locator(front);
  const auto pieces = detail::covered_pieces(t, front, locator);
  const double cell_area = area(t);
  const double covered = detail::covered_area(pieces);
  if (covered <= detail::kAreaTolerance * cell_area) return triangle_rule(t[0], t[1], t[2], order);
  if (covered >= (1.0 - detail::kAreaTolerance) * cell_area) return {};
  return detail::subtractive_rule(t, pieces, order);
}

/// Splits the background cells into not / fully / partially overlapped by the
/// front composite mesh, records covered pieces and cut rules of partial cells.
///
/// Throws FinenessError when a partial cell intersects a cell tagged `solid_tag`.
inline OverlapTopology classify(const Mesh& background, const Mesh& front, int order = 2,
                                int solid_tag = region::kSolid) {
  OverlapTopology topo;
  topo.order = order;
  const Index nc = background.num_cells();
  topo.cell_class.assign(nc, CellClass::NotOverlapped);
  topo.pieces.resize(nc);
  topo.cut_rules.resize(nc);
  const CellLocator locator(front);

  for (Index c = 0; c < nc; ++c) {
    const Polygon t = background.cell_polygon(c);
    auto pieces = detail::covered_pieces(t, front, locator);
    const double cell_area = area(t);
    const double covered = detail::covered_area(pieces);
    if (covered <= detail::kAreaTolerance * cell_area) {
      topo.cell_class[c] = CellClass::NotOverlapped;
      topo.class_not.push_back(c);
    } else if (covered >= (1.0 - detail::kAreaTolerance) * cell_area) {
      topo.cell_class[c] = CellClass::FullyOverlapped;
      topo.class_fully.push_back(c);
    } else {
      for (const auto& p : pieces) {
        if (front.region_of(p.front_cell) == solid_tag)
          throw FinenessError("background mesh too coarse near interface: partially overlapped cell " +
                              std::to_string(c) + " intersects solid cell " + std::to_string(p.front_cell));
      }
      topo.cell_class[c] = CellClass::Partial;
      topo.class_partial.push_back(c);
      topo.cut_rules[c] = detail::subtractive_rule(t, pieces, order);
      topo.pieces[c] = std::move(pieces);
    }
  }
  topo.reduced_cells = topo.class_not;
  topo.reduced_cells.insert(topo.reduced_cells.end(), topo.class_partial.begin(), topo.class_partial.end());
  return topo;
}

/// Boundary of the composite domain split at background cell boundaries,
/// restricted to the parts facing the reduced background mesh.
inline std::vector<InterfaceSegment> interface_quadrature(const Mesh& front, const Mesh& background,
                                                          const OverlapTopology& topo, int order = 2,
                                                          int solid_tag = region::kSolid) {
  std::vector<InterfaceSegment> out;
  if (front.empty() || background.empty()) return out;
  const CellLocator locator(background);
  const double eps = 1e-12 * max_diameter(background);

  for (const BoundaryFacet& f : boundary_facets(front)) {
    const Vec2 a = front.vertex(f.a);
    const Vec2 b = front.vertex(f.b);
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len <= eps) continue;
    const Vec2 n{d.y / len, -d.x / len};
    BoundingBox box;
    box.extend(a);
    box.extend(b);

    for (Index t : locator.candidates(box)) {
      const Polygon tp = background.cell_polygon(t);
      auto piece = clip_segment({a, b}, tp, eps);
      if (!piece) continue;
      // A piece lying on an edge of T belongs to T only if T is on the exterior side.
      bool on_edge = false;
      for (int k = 0; k < 3 && !on_edge; ++k) {
        const Vec2 p = tp[k];
        const Vec2 q = tp[(k + 1) % 3];
        const Vec2 e = q - p;
        const double el = norm(e);
        const double da = std::abs(cross(e, piece->a - p)) / el;
        const double db = std::abs(cross(e, piece->b - p)) / el;
        on_edge = da <= eps && db <= eps;
      }
      if (on_edge && dot(centroid(tp) - piece->midpoint(), n) <= 0.0) continue;

      if (topo.cell_class[t] == CellClass::FullyOverlapped) {
        // Classification ignores uncovered slivers below detail::kAreaTolerance |T|;
        // boundary fragments of length <= sqrt(kAreaTolerance) h_T bound such slivers.
        if (norm(piece->b - piece->a) <= std::sqrt(detail::kAreaTolerance) * element_diameter(background, t)) continue;
        throw GeometryError("interface segment has background parent " + std::to_string(t) +
                            " outside the reduced mesh");
      }
      if (front.region_of(f.cell) == solid_tag)
        throw FinenessError("solid boundary (front cell " + std::to_string(f.cell) +
                            ") borders the background fluid directly");
      out.push_back({t, f.cell, piece->a, piece->b, n, segment_rule(piece->a, piece->b, order)});
    }
  }
  return out;
}

/// Intersections of moving-fluid cells with reduced background cells.
inline std::vector<OverlapPair> overlap_region_pairs(const Mesh& front, const OverlapTopology& topo, int order = 2,
                                                     int fluid_tag = region::kFluid) {
  std::vector<OverlapPair> out;
  for (Index t : topo.class_partial) {
    for (const CoveredPiece& p : topo.pieces[t]) {
      if (front.region_of(p.front_cell) != fluid_tag) continue;
      out.push_back({p.front_cell, t, p.polygon, polygon_rule(p.polygon, order)});
    }
  }
  return out;
}

/// Classification, interface segments and overlap pairs in one pass.
inline OverlapTopology build_topology(const Mesh& background, const Mesh& front, int order = 2) {
  OverlapTopology topo = classify(background, front, order);
  topo.interface_segments = interface_quadrature(front, background, topo, order);
  topo.overlap_pairs = overlap_region_pairs(front, topo, order);
  return topo;
}

/// Rule over the background-fluid part of a reduced cell, at any order.
inline QuadratureRule physical_rule(const Mesh& background, const OverlapTopology& topo, Index cell, int order) {
  const Polygon t = background.cell_polygon(cell);
  switch (topo.cell_class[cell]) {
    case CellClass::NotOverlapped:
      return triangle_rule(t[0], t[1], t[2], order);
    case CellClass::Partial:
      return order == topo.order ? topo.cut_rules[cell] : detail::subtractive_rule(t, topo.pieces[cell], order);
    case CellClass::FullyOverlapped:
      break;
  }
  return {};
}

/// Area of the background fluid domain (uncut cells plus cut-rule weights).
inline double background_fluid_area(const Mesh& background, const OverlapTopology& topo) {
  double a = 0.0;
  for (Index c : topo.class_not) a += background.cell_area(c);
  for (Index c : topo.class_partial) a += topo.cut_rules[c].weight_sum();
  return a;
}

}  // namespace olmfsi
