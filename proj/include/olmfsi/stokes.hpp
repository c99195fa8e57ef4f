#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>
#include <optional>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/geometry.hpp"
#include "olmfsi/linalg.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/overlap.hpp"
#include "olmfsi/quadrature.hpp"

namespace olmfsi {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;
using TensorField = std::function<Mat2(const Vec2&)>;

/// Background mesh, composite front mesh (moving fluid plus solid), the
/// moving-fluid submesh and their overlap topology.
struct FluidGeometry {
  Mesh background;
  Mesh front;
  SubMesh fluid2;
  std::vector<Index> front_to_fluid2;  // composite cell -> fluid-2 cell, -1 for solid cells
  OverlapTopology topo;
};

inline FluidGeometry build_fluid_geometry(Mesh background, Mesh front, int order = 2) {
  FluidGeometry g;
  g.background = std::move(background);
  g.front = std::move(front);
  g.topo = build_topology(g.background, g.front, order);
  g.fluid2 = extract_region(g.front, region::kFluid);
  g.front_to_fluid2.assign(g.front.num_cells(), -1);
  for (Index c = 0; c < static_cast<Index>(g.fluid2.cell_to_parent.size()); ++c)
    g.front_to_fluid2[g.fluid2.cell_to_parent[c]] = c;
  return g;
}

enum class PenaltyScale { BackgroundCell, FrontCell };

struct FluidProblem {
  double nu = 1.0;
  double gamma = 10.0;
  double delta = 0.5;
  double alpha1 = 0.0;
  double alpha2 = 1.0;
  VectorField force;              // empty means zero
  VectorField boundary_velocity;  // g on Dirichlet boundaries; empty means zero
  std::vector<int> background_dirichlet = {markers::kLeft, markers::kRight, markers::kBottom, markers::kTop};
  std::vector<int> front_dirichlet;  // markers of the moving-fluid mesh carrying g (walls)
  bool viscosity_in_forms = true;    // scale a_h and i_h by nu
  bool overlap_stabilization = true;        // i_h
  bool ghost_pressure_extension = true;     // j_h on full cells of partially covered background cells
  bool pin_pressure = false;                // fix one pressure dof; needed without a natural boundary
  ScalarField pressure_reference;           // with a pin: shift p_h to the mean of this field
  PenaltyScale penalty_scale = PenaltyScale::BackgroundCell;
  int load_order = 4;                       // quadrature order for force terms

  void validate() const {
    if (!(nu > 0.0)) throw InputError("fluid viscosity must be positive");
    if (!(gamma > 0.0)) throw InputError("Nitsche penalty gamma must be positive");
    if (!(delta >= 0.0)) throw InputError("pressure stabilization delta must be non-negative");
    if (alpha1 < 0.0 || alpha2 < 0.0 || std::abs(alpha1 + alpha2 - 1.0) > 1e-14)
      throw InputError("interface weights must be non-negative and sum to one");
  }
  Vec2 f(const Vec2& x) const { return force ? force(x) : Vec2{}; }
  Vec2 g(const Vec2& x) const { return boundary_velocity ? boundary_velocity(x) : Vec2{}; }
};

/// Dof layout: velocities of active background vertices (interleaved x,y),
/// velocities of moving-fluid vertices, then pressures in the same order.
struct CompositeSpace {
  Index n1 = 0;
  Index n2 = 0;
  std::vector<Index> bg_to_active;  // -1 for vertices not touching the reduced mesh
  std::vector<Index> active_to_bg;
  std::vector<Index> dirichlet_dofs;
  std::vector<double> dirichlet_values;
  Index pinned_pressure = -1;

  Index size() const { return 3 * (n1 + n2); }
  Index num_velocity() const { return 2 * (n1 + n2); }
  Index vel1(Index bg_vertex, int c) const { return 2 * bg_to_active[bg_vertex] + c; }
  Index vel2(Index v, int c) const { return 2 * n1 + 2 * v + c; }
  Index pre1(Index bg_vertex) const { return 2 * (n1 + n2) + bg_to_active[bg_vertex]; }
  Index pre2(Index v) const { return 2 * (n1 + n2) + n1 + v; }
};

namespace detail {

inline bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

inline bool has_natural_boundary(const FluidGeometry& geo, const FluidProblem& prob) {
  // A background boundary edge outside the Dirichlet set that is not hidden by the front.
  std::unordered_map<std::int64_t, Index> edge_cell;
  const Mesh& bg = geo.background;
  for (Index c = 0; c < bg.num_cells(); ++c)
    for (int k = 0; k < 3; ++k) edge_cell[edge_key(bg.cell(c)[k], bg.cell(c)[(k + 1) % 3])] = c;
  for (const BoundaryEdge& e : bg.boundary_edges()) {
    if (contains(prob.background_dirichlet, e.marker)) continue;
    const Index c = edge_cell.at(edge_key(e.v[0], e.v[1]));
    if (geo.topo.cell_class[c] != CellClass::FullyOverlapped) return true;
  }
  return false;
}

}  // namespace detail

inline CompositeSpace build_space(const FluidGeometry& geo, const FluidProblem& prob) {
  CompositeSpace s;
  const Mesh& bg = geo.background;
  const Mesh& m2 = geo.fluid2.mesh;
  s.bg_to_active.assign(bg.num_vertices(), -1);
  for (Index c : geo.topo.reduced_cells)
    for (Index v : bg.cell(c)) s.bg_to_active[v] = 0;
  for (Index v = 0; v < bg.num_vertices(); ++v) {
    if (s.bg_to_active[v] < 0) continue;
    s.bg_to_active[v] = static_cast<Index>(s.active_to_bg.size());
    s.active_to_bg.push_back(v);
  }
  s.n1 = static_cast<Index>(s.active_to_bg.size());
  s.n2 = m2.num_vertices();

  // value per dof; the moving-fluid interface with the solid wins over walls
  std::map<Index, double> fixed;
  auto set = [&](Index dof, double value, bool overwrite) {
    if (overwrite) {
      fixed[dof] = value;
    } else {
      fixed.emplace(dof, value);
    }
  };
  for (const BoundaryEdge& e : m2.boundary_edges()) {
    if (e.marker != markers::kFluidSolid) continue;
    for (Index v : e.v)
      for (int c = 0; c < 2; ++c) set(s.vel2(v, c), 0.0, true);
  }
  for (const BoundaryEdge& e : m2.boundary_edges()) {
    if (!detail::contains(prob.front_dirichlet, e.marker)) continue;
    for (Index v : e.v) {
      const Vec2 gv = prob.g(m2.vertex(v));
      for (int c = 0; c < 2; ++c) set(s.vel2(v, c), gv[c], false);
    }
  }
  for (const BoundaryEdge& e : bg.boundary_edges()) {
    if (!detail::contains(prob.background_dirichlet, e.marker)) continue;
    for (Index v : e.v) {
      if (s.bg_to_active[v] < 0) continue;
      const Vec2 gv = prob.g(bg.vertex(v));
      for (int c = 0; c < 2; ++c) set(s.vel1(v, c), gv[c], false);
    }
  }
  for (const auto& [d, v] : fixed) {
    s.dirichlet_dofs.push_back(d);
    s.dirichlet_values.push_back(v);
  }

  if (prob.pin_pressure) {
    s.pinned_pressure = s.n1 > 0 ? s.pre1(s.active_to_bg.front()) : s.pre2(0);
  } else if (!detail::has_natural_boundary(geo, prob)) {
    throw SolverError(
        "pressure is only determined up to a constant: no natural boundary is exposed and no pressure dof is pinned");
  }
  return s;
}

namespace detail {

struct CellBasis {
  std::array<Index, 3> vertices;
  std::array<Vec2, 3> grads;
};

inline CellBasis cell_basis(const Mesh& m, Index c) { return {m.cell(c), p1_gradients(m, c)}; }

/// Rule-weighted basis integrals: int phi_i over the rule.
inline std::array<double, 3> basis_integrals(const Mesh& m, Index c, const QuadratureRule& r) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t q = 0; q < r.size(); ++q) {
    const auto phi = p1_values(m, c, r.points[q]);
    for (int i = 0; i < 3; ++i) out[i] += r.weights[q] * phi[i];
  }
  return out;
}

/// Local volume contributions on one cell of either mesh.
template <typename VelDof, typename PreDof>
void add_volume(SparseSystem& sys, const FluidProblem& prob, const Mesh& m, Index c, double measure,
                const QuadratureRule& rule, const QuadratureRule& load_rule, const QuadratureRule& stab_rule,
                double stab_measure, VelDof vel, PreDof pre) {
  const CellBasis b = cell_basis(m, c);
  const double nu_a = prob.viscosity_in_forms ? prob.nu : 1.0;
  const auto psi_int = basis_integrals(m, c, rule);
  const double h = element_diameter(m, c);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double k = nu_a * measure * dot(b.grads[i], b.grads[j]);
      for (int comp = 0; comp < 2; ++comp) {
        sys.add(vel(b.vertices[i], comp), vel(b.vertices[j], comp), k);
        // -(div v, q): velocity row i, pressure column j
        const double bij = -b.grads[i][comp] * psi_int[j];
        sys.add(vel(b.vertices[i], comp), pre(b.vertices[j]), bij);
        sys.add(pre(b.vertices[j]), vel(b.vertices[i], comp), bij);
      }
      sys.add(pre(b.vertices[i]), pre(b.vertices[j]), -prob.delta * h * h * stab_measure * dot(b.grads[i], b.grads[j]));
    }
  }
  if (!prob.force) return;
  for (std::size_t q = 0; q < load_rule.size(); ++q) {
    const Vec2 fx = prob.force(load_rule.points[q]);
    const auto phi = p1_values(m, c, load_rule.points[q]);
    for (int i = 0; i < 3; ++i)
      for (int comp = 0; comp < 2; ++comp) sys.add_rhs(vel(b.vertices[i], comp), load_rule.weights[q] * fx[comp] * phi[i]);
  }
  for (std::size_t q = 0; q < stab_rule.size(); ++q) {
    const Vec2 fx = prob.force(stab_rule.points[q]);
    for (int i = 0; i < 3; ++i)
      sys.add_rhs(pre(b.vertices[i]), -prob.delta * h * h * stab_rule.weights[q] * dot(fx, b.grads[i]));
  }
}

}  // namespace detail

/// Stabilized Nitsche overlapping-mesh Stokes operator and load vector,
/// before boundary conditions. The matrix is symmetric.
inline SparseSystem assemble(const FluidProblem& prob, const CompositeSpace& space, const FluidGeometry& geo) {
  prob.validate();
  const Mesh& bg = geo.background;
  const Mesh& m2 = geo.fluid2.mesh;
  const OverlapTopology& topo = geo.topo;
  SparseSystem sys(space.size());
  auto vel1 = [&](Index v, int c) { return space.vel1(v, c); };
  auto pre1 = [&](Index v) { return space.pre1(v); };
  auto vel2 = [&](Index v, int c) { return space.vel2(v, c); };
  auto pre2 = [&](Index v) { return space.pre2(v); };
  const double nu_a = prob.viscosity_in_forms ? prob.nu : 1.0;

  // background fluid part: physical rules on reduced cells, stabilization on full cells
  for (Index c : topo.reduced_cells) {
    const bool cut = topo.cell_class[c] == CellClass::Partial;
    const Polygon t = bg.cell_polygon(c);
    const QuadratureRule vol = cut ? topo.cut_rule(c) : triangle_rule(t[0], t[1], t[2], topo.order);
    const QuadratureRule load = physical_rule(bg, topo, c, prob.load_order);
    const bool extend = prob.ghost_pressure_extension || !cut;
    const QuadratureRule stab = extend ? triangle_rule(t[0], t[1], t[2], prob.load_order) : load;
    const double measure = vol.weight_sum();
    const double stab_measure = extend ? bg.cell_area(c) : measure;
    detail::add_volume(sys, prob, bg, c, measure, vol, load, stab, stab_measure, vel1, pre1);
  }
  // moving fluid mesh: full cells
  for (Index c = 0; c < m2.num_cells(); ++c) {
    const Polygon t = m2.cell_polygon(c);
    const QuadratureRule vol = triangle_rule(t[0], t[1], t[2], 2);
    const QuadratureRule load = triangle_rule(t[0], t[1], t[2], prob.load_order);
    detail::add_volume(sys, prob, m2, c, m2.cell_area(c), vol, load, load, m2.cell_area(c), vel2, pre2);
  }

  // Nitsche coupling on the fluid-fluid interface; n points from the moving
  // fluid into the background fluid, [v] = v1 - v2, <w> = a1 w1 + a2 w2.
  for (const InterfaceSegment& seg : topo.interface_segments) {
    const Index t = seg.background_cell;
    const Index k = geo.front_to_fluid2.at(seg.front_cell);
    if (k < 0) throw GeometryError("interface segment attached to a solid cell");
    const detail::CellBasis b1 = detail::cell_basis(bg, t);
    const detail::CellBasis b2 = detail::cell_basis(m2, k);
    const double h = prob.penalty_scale == PenaltyScale::BackgroundCell ? element_diameter(bg, t)
                                                                        : element_diameter(m2, k);
    // 6 velocity "slots" per component: 3 background then 3 moving-fluid basis functions
    std::array<double, 6> flux{};  // <d_n phi>
    for (int i = 0; i < 3; ++i) {
      flux[i] = prob.alpha1 * dot(b1.grads[i], seg.normal);
      flux[3 + i] = prob.alpha2 * dot(b2.grads[i], seg.normal);
    }
    std::array<double, 6> jump_int{};
    std::array<std::array<double, 6>, 6> jump_jump{};
    std::array<std::array<double, 6>, 6> jump_mean_p{};  // int [phi_I] <psi_J>
    for (std::size_t q = 0; q < seg.rule.size(); ++q) {
      const Vec2 x = seg.rule.points[q];
      const double w = seg.rule.weights[q];
      const auto p1 = p1_values(bg, t, x);
      const auto p2 = p1_values(m2, k, x);
      std::array<double, 6> jump{p1[0], p1[1], p1[2], -p2[0], -p2[1], -p2[2]};
      std::array<double, 6> mean{prob.alpha1 * p1[0], prob.alpha1 * p1[1], prob.alpha1 * p1[2],
                                 prob.alpha2 * p2[0], prob.alpha2 * p2[1], prob.alpha2 * p2[2]};
      for (int i = 0; i < 6; ++i) {
        jump_int[i] += w * jump[i];
        for (int j = 0; j < 6; ++j) {
          jump_jump[i][j] += w * jump[i] * jump[j];
          jump_mean_p[i][j] += w * jump[i] * mean[j];
        }
      }
    }
    auto vdof = [&](int slot, int comp) {
      return slot < 3 ? space.vel1(b1.vertices[slot], comp) : space.vel2(b2.vertices[slot - 3], comp);
    };
    auto pdof = [&](int slot) { return slot < 3 ? space.pre1(b1.vertices[slot]) : space.pre2(b2.vertices[slot - 3]); };
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double a = nu_a * (flux[j] * jump_int[i] + flux[i] * jump_int[j] + prob.gamma / h * jump_jump[i][j]);
        for (int comp = 0; comp < 2; ++comp) {
          sys.add(vdof(i, comp), vdof(j, comp), a);
          const double bij = -seg.normal[comp] * jump_mean_p[i][j];
          sys.add(vdof(i, comp), pdof(j), bij);
          sys.add(pdof(j), vdof(i, comp), bij);
        }
      }
    }
  }

  // overlap stabilization: nu (grad(u1 - u2), grad(v1 - v2)) on the overlap region
  if (prob.overlap_stabilization) {
    for (const OverlapPair& pair : topo.overlap_pairs) {
      const Index k = geo.front_to_fluid2.at(pair.front_cell);
      const detail::CellBasis b1 = detail::cell_basis(bg, pair.background_cell);
      const detail::CellBasis b2 = detail::cell_basis(m2, k);
      const double a = area(pair.polygon);
      std::array<Vec2, 6> g{b1.grads[0], b1.grads[1], b1.grads[2], -b2.grads[0], -b2.grads[1], -b2.grads[2]};
      auto vdof = [&](int slot, int comp) {
        return slot < 3 ? space.vel1(b1.vertices[slot], comp) : space.vel2(b2.vertices[slot - 3], comp);
      };
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          for (int comp = 0; comp < 2; ++comp) sys.add(vdof(i, comp), vdof(j, comp), nu_a * a * dot(g[i], g[j]));
    }
  }
  sys.finalize();
  return sys;
}

/// Discrete velocity and pressure, stored per vertex of each mesh (background
/// entries of inactive vertices are zero).
struct FluidSolution {
  std::vector<Vec2> u1;
  std::vector<double> p1;
  std::vector<Vec2> u2;
  std::vector<double> p2;
  Vector coefficients;
};

inline FluidSolution unpack(const CompositeSpace& space, const FluidGeometry& geo, const Vector& x) {
  FluidSolution s;
  s.coefficients = x;
  s.u1.assign(geo.background.num_vertices(), Vec2{});
  s.p1.assign(geo.background.num_vertices(), 0.0);
  for (Index v : space.active_to_bg) {
    s.u1[v] = {x[space.vel1(v, 0)], x[space.vel1(v, 1)]};
    s.p1[v] = x[space.pre1(v)];
  }
  s.u2.resize(space.n2);
  s.p2.resize(space.n2);
  for (Index v = 0; v < space.n2; ++v) {
    s.u2[v] = {x[space.vel2(v, 0)], x[space.vel2(v, 1)]};
    s.p2[v] = x[space.pre2(v)];
  }
  return s;
}

/// Integral over the physical fluid domain of f1 on the background part and
/// f2 on the moving-fluid part; each receives (cell, point).
template <typename F1, typename F2>
double integrate_fluid(const FluidGeometry& geo, int order, F1&& f1, F2&& f2) {
  double s = 0.0;
  for (Index c : geo.topo.reduced_cells) {
    const QuadratureRule r = physical_rule(geo.background, geo.topo, c, order);
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f1(c, r.points[q]);
  }
  const Mesh& m2 = geo.fluid2.mesh;
  for (Index c = 0; c < m2.num_cells(); ++c) {
    const auto p = m2.cell_points(c);
    const QuadratureRule r = triangle_rule(p[0], p[1], p[2], order);
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * f2(c, r.points[q]);
  }
  return s;
}

inline double fluid_area(const FluidGeometry& geo) {
  return integrate_fluid(geo, 1, [](Index, const Vec2&) { return 1.0; }, [](Index, const Vec2&) { return 1.0; });
}

inline double pressure_mean(const FluidGeometry& geo, const FluidSolution& s) {
  const double total = integrate_fluid(
      geo, 2, [&](Index c, const Vec2& x) { return evaluate_p1(geo.background, c, s.p1, x); },
      [&](Index c, const Vec2& x) { return evaluate_p1(geo.fluid2.mesh, c, s.p2, x); });
  return total / fluid_area(geo);
}

/// Solves the fluid problem on the given geometry. With a pressure pin the
/// result is shifted to the mean of `pressure_reference` (or to zero mean).
inline FluidSolution solve_stokes(const FluidProblem& prob, const CompositeSpace& space, const FluidGeometry& geo) {
  SparseSystem sys = assemble(prob, space, geo);
  std::vector<Index> dofs = space.dirichlet_dofs;
  std::vector<double> vals = space.dirichlet_values;
  if (space.pinned_pressure >= 0) {
    dofs.push_back(space.pinned_pressure);
    vals.push_back(0.0);
  }
  const SparseSystem constrained = apply_dirichlet(sys, dofs, vals);
  FluidSolution s = unpack(space, geo, solve_direct(constrained));
  if (space.pinned_pressure >= 0) {
    double target = 0.0;
    if (prob.pressure_reference) {
      target = integrate_fluid(
                   geo, 4, [&](Index, const Vec2& x) { return prob.pressure_reference(x); },
                   [&](Index, const Vec2& x) { return prob.pressure_reference(x); }) /
               fluid_area(geo);
    }
    const double shift = target - pressure_mean(geo, s);
    for (Index v : space.active_to_bg) s.p1[v] += shift;
    for (double& p : s.p2) p += shift;
    for (Index v : space.active_to_bg) s.coefficients[space.pre1(v)] += shift;
    for (Index v = 0; v < space.n2; ++v) s.coefficients[space.pre2(v)] += shift;
  }
  return s;
}

struct FluidErrors {
  double velocity_h1 = 0.0;  // H1 seminorm of u - u_h
  double velocity_l2 = 0.0;
  double pressure_l2 = 0.0;
};

/// Errors against exact fields on the physical fluid domain. With
/// `mean_shift` the pressure error is measured modulo constants.
inline FluidErrors error_norms(const FluidGeometry& geo, const FluidSolution& s, const VectorField& exact_u,
                               const TensorField& exact_grad_u, const ScalarField& exact_p, int order = 4,
                               bool mean_shift = false) {
  const Mesh& bg = geo.background;
  const Mesh& m2 = geo.fluid2.mesh;
  double shift = 0.0;
  if (mean_shift) {
    const double exact_mean = integrate_fluid(
        geo, order, [&](Index, const Vec2& x) { return exact_p(x); }, [&](Index, const Vec2& x) { return exact_p(x); });
    shift = exact_mean / fluid_area(geo) - pressure_mean(geo, s);
  }
  FluidErrors e;
  e.velocity_h1 = std::sqrt(std::max(
      0.0, integrate_fluid(
               geo, order,
               [&](Index c, const Vec2& x) {
                 const Mat2 d = exact_grad_u(x) - p1_gradient(bg, c, s.u1);
                 return ddot(d, d);
               },
               [&](Index c, const Vec2& x) {
                 const Mat2 d = exact_grad_u(x) - p1_gradient(m2, c, s.u2);
                 return ddot(d, d);
               })));
  e.velocity_l2 = std::sqrt(std::max(
      0.0, integrate_fluid(
               geo, order,
               [&](Index c, const Vec2& x) {
                 const Vec2 d = exact_u(x) - evaluate_p1(bg, c, s.u1, x);
                 return dot(d, d);
               },
               [&](Index c, const Vec2& x) {
                 const Vec2 d = exact_u(x) - evaluate_p1(m2, c, s.u2, x);
                 return dot(d, d);
               })));
  e.pressure_l2 = std::sqrt(std::max(
      0.0, integrate_fluid(
               geo, order,
               [&](Index c, const Vec2& x) {
                 const double d = exact_p(x) - evaluate_p1(bg, c, s.p1, x) - shift;
                 return d * d;
               },
               [&](Index c, const Vec2& x) {
                 const double d = exact_p(x) - evaluate_p1(m2, c, s.p2, x) - shift;
                 return d * d;
               })));
  return e;
}

/// Largest velocity jump |u1 - u2| over interface quadrature points.
inline double max_interface_jump(const FluidGeometry& geo, const FluidSolution& s) {
  double m = 0.0;
  for (const InterfaceSegment& seg : geo.topo.interface_segments) {
    const Index k = geo.front_to_fluid2.at(seg.front_cell);
    for (const Vec2& x : seg.rule.points) {
      const Vec2 d = evaluate_p1(geo.background, seg.background_cell, s.u1, x) - evaluate_p1(geo.fluid2.mesh, k, s.u2, x);
      m = std::max(m, norm(d));
    }
  }
  return m;
}

}  // namespace olmfsi
