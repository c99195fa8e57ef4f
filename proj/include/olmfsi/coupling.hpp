#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/mesh_motion.hpp"
#include "olmfsi/solid.hpp"
#include "olmfsi/stokes.hpp"

namespace olmfsi {

/// Reference composite front (moving fluid plus solid, conforming across the
/// fluid-solid interface) split into its two parts.
struct FrontPartition {
  Mesh composite;
  SubMesh fluid2;
  SubMesh solid;
  std::vector<Index> interface_composite;  // composite vertices shared by both parts, ascending
  std::vector<Index> interface_fluid2;     // same nodes in fluid-2 numbering
  std::vector<Index> interface_solid;      // same nodes in solid numbering
};

inline FrontPartition partition_front(const Mesh& composite) {
  FrontPartition f;
  f.composite = composite;
  f.fluid2 = extract_region(composite, region::kFluid);
  f.solid = extract_region(composite, region::kSolid);
  for (Index v = 0; v < composite.num_vertices(); ++v) {
    if (f.fluid2.parent_to_vertex[v] < 0 || f.solid.parent_to_vertex[v] < 0) continue;
    f.interface_composite.push_back(v);
    f.interface_fluid2.push_back(f.fluid2.parent_to_vertex[v]);
    f.interface_solid.push_back(f.solid.parent_to_vertex[v]);
  }
  return f;
}

/// Force exerted by the fluid on the solid, tested with the moving-fluid hat
/// function of each interface node:
///   L(phi) = -[(nu grad u_h - p_h I, grad phi) - (f, phi)]  over supp(phi).
/// Returns one vector per entry of `interface_nodes` (fluid-2 numbering).
inline std::vector<Vec2> traction_functional(const FluidGeometry& geo, const FluidSolution& sol,
                                             const FluidProblem& prob, const std::vector<Index>& interface_nodes,
                                             bool symmetric_gradient = false) {
  const Mesh& m2 = geo.fluid2.mesh;
  std::vector<int> slot(m2.num_vertices(), -1);
  for (std::size_t k = 0; k < interface_nodes.size(); ++k) {
    const Index v = interface_nodes[k];
    if (v < 0 || v >= m2.num_vertices())
      throw GeometryError("traction functional: interface node " + std::to_string(v) + " is not a moving-fluid vertex");
    slot[v] = static_cast<int>(k);
  }
  const double nu = prob.viscosity_in_forms ? prob.nu : 1.0;
  std::vector<Vec2> out(interface_nodes.size());
  for (Index c = 0; c < m2.num_cells(); ++c) {
    const Cell& cell = m2.cell(c);
    if (slot[cell[0]] < 0 && slot[cell[1]] < 0 && slot[cell[2]] < 0) continue;
    const auto g = p1_gradients(m2, c);
    const double area = m2.cell_area(c);
    Mat2 gu = p1_gradient(m2, c, sol.u2);
    if (symmetric_gradient) gu = gu + gu.transpose();
    const double pbar = (sol.p2[cell[0]] + sol.p2[cell[1]] + sol.p2[cell[2]]) / 3.0;
    const Mat2 sigma = nu * gu - pbar * Mat2::identity();
    const auto pts = m2.cell_points(c);
    const QuadratureRule r = triangle_rule(pts[0], pts[1], pts[2], prob.load_order);
    for (int i = 0; i < 3; ++i) {
      const int k = slot[cell[i]];
      if (k < 0) continue;
      out[k] -= area * (sigma * g[i]);
      if (!prob.force) continue;
      for (std::size_t q = 0; q < r.size(); ++q) out[k] += r.weights[q] * p1_values(m2, c, r.points[q])[i] * prob.force(r.points[q]);
    }
  }
  return out;
}

/// Carries nodal functional values to the solid dofs by node identity.
inline std::vector<double> transfer_traction_to_reference(const std::vector<Vec2>& functional,
                                                          const std::vector<Index>& solid_nodes, Index solid_vertices) {
  if (functional.size() != solid_nodes.size())
    throw GeometryError("traction transfer: " + std::to_string(functional.size()) + " values for " +
                        std::to_string(solid_nodes.size()) + " interface nodes");
  std::vector<double> load(2 * static_cast<std::size_t>(solid_vertices), 0.0);
  std::vector<char> seen(solid_vertices, 0);
  for (std::size_t k = 0; k < solid_nodes.size(); ++k) {
    const Index v = solid_nodes[k];
    if (v < 0 || v >= solid_vertices || seen[v])
      throw GeometryError("traction transfer: inconsistent node map at entry " + std::to_string(k));
    seen[v] = 1;
    load[2 * v] = functional[k].x;
    load[2 * v + 1] = functional[k].y;
  }
  return load;
}

inline constexpr double kOmegaMin = 0.05;

/// Aitken relaxation factor from two consecutive fixed-point residuals,
/// clamped into [kOmegaMin, omega_max]. A vanishing residual difference keeps
/// the previous factor.
inline double aitken_update(double omega_prev, const std::vector<double>& d_prev, const std::vector<double>& d_next,
                            double omega_max) {
  if (d_prev.size() != d_next.size()) throw InputError("aitken_update: residual sizes differ");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < d_prev.size(); ++i) {
    const double diff = d_next[i] - d_prev[i];
    num += d_prev[i] * diff;
    den += diff * diff;
  }
  if (!(den > 0.0)) return omega_prev;
  return std::clamp(-omega_prev * num / den, kOmegaMin, omega_max);
}

struct FsiConfig {
  double tol = 1e-3;
  int max_outer = 50;
  double omega_max = 1.5;
  double omega0 = 1.0;
  bool relaxation = true;
  FluidProblem fluid;
  Material material = Material::from_young(10.0, 0.3);
  std::function<Vec2(const Vec2&)> solid_force;          // reference coordinates
  std::vector<int> solid_dirichlet = {markers::kLeft, markers::kRight, markers::kTop};
  std::function<Vec2(const Vec2&)> solid_dirichlet_value;  // empty means clamped
  std::function<Vec2(const Vec2&)> extra_traction;         // additional reference traction on the interface
  bool symmetric_stress = false;
  double mesh_mu = 1.0;
  double mesh_lambda = 1.0;
  bool mesh_stiffen = false;
  std::vector<int> mesh_fixed_markers;  // moving-fluid edges held in place besides the interface
  double newton_tol = 1e-10;
  int newton_maxit = 25;
  bool solid_load_continuation = false;  // retry a failed solid solve by stepping the load from zero
  int order = 2;
  std::string diagnostics_csv;  // per-iteration log, written when non-empty
};

struct FsiIteration {
  int k = 0;
  double omega = 1.0;
  double increment = 0.0;  // relative L2 displacement increment
  Index fluid_dofs = 0;
  Index cut_cells = 0;
  double interface_gap = 0.0;  // max distance between solid and moving-fluid interface nodes
  int newton_iterations = 0;
};

struct FsiState {
  FrontPartition front;
  std::vector<Vec2> solid_u;  // per solid vertex, reference mesh
  std::vector<Vec2> mesh_u;   // per moving-fluid vertex, reference mesh
  FluidGeometry geometry;     // current configuration of the last fluid solve
  FluidSolution fluid;
  std::vector<FsiIteration> history;
  bool converged = false;

  int iterations() const { return static_cast<int>(history.size()); }
  Mesh solid_deformed() const { return deform_mesh(front.solid.mesh, solid_u); }
  Mesh fluid2_deformed() const { return deform_mesh(front.fluid2.mesh, mesh_u); }
};

namespace detail {

inline std::vector<double> flatten(const std::vector<Vec2>& v) {
  std::vector<double> out(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[2 * i] = v[i].x;
    out[2 * i + 1] = v[i].y;
  }
  return out;
}

template <typename F>
auto with_iteration_context(int k, F&& body) -> decltype(body()) {
  const std::string at = "outer iteration " + std::to_string(k) + ": ";
  try {
    return body();
  } catch (const MeshTangleError& e) {
    throw MeshTangleError(at + e.what(), e.cell());
  } catch (const FinenessError& e) {
    throw FinenessError(at + e.what());
  } catch (const GeometryError& e) {
    throw GeometryError(at + e.what());
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(at + e.what(), e.history());
  } catch (const SolverError& e) {
    throw SolverError(at + e.what());
  }
}

}  // namespace detail

/// Composite front in the configuration given by solid and mesh displacements.
inline Mesh deformed_front(const FrontPartition& f, const std::vector<Vec2>& solid_u, const std::vector<Vec2>& mesh_u) {
  std::vector<Vec2> d(f.composite.num_vertices());
  for (std::size_t v = 0; v < mesh_u.size(); ++v) d[f.fluid2.vertex_to_parent[v]] = mesh_u[v];
  for (std::size_t v = 0; v < solid_u.size(); ++v) d[f.solid.vertex_to_parent[v]] = solid_u[v];
  return deform_mesh(f.composite, d);
}

inline SolidProblem make_solid_problem(const FsiConfig& cfg, const FrontPartition& f) {
  SolidProblem sp;
  sp.mesh = f.solid.mesh;
  sp.material = cfg.material;
  sp.body_force = cfg.solid_force;
  sp.dirichlet_markers = cfg.solid_dirichlet;
  sp.dirichlet_value = cfg.solid_dirichlet_value;
  sp.traction_markers = {markers::kFluidSolid};
  sp.traction = cfg.extra_traction;
  return sp;
}

inline MeshMotionProblem make_mesh_problem(const FsiConfig& cfg, const FrontPartition& f,
                                           const std::vector<Vec2>& solid_u) {
  MeshMotionProblem mp;
  mp.mesh = f.fluid2.mesh;
  mp.mu = cfg.mesh_mu;
  mp.lambda = cfg.mesh_lambda;
  mp.stiffen_small_cells = cfg.mesh_stiffen;
  mp.fixed_markers = cfg.mesh_fixed_markers;
  mp.interface_nodes = f.interface_fluid2;
  for (Index s : f.interface_solid) mp.interface_values.push_back(solid_u[s]);
  return mp;
}

/// Solves the fluid problem on the configuration of the given displacements.
inline void solve_fluid_on(FsiState& st, const FsiConfig& cfg, const Mesh& background) {
  st.geometry = build_fluid_geometry(background, deformed_front(st.front, st.solid_u, st.mesh_u), cfg.order);
  const CompositeSpace space = build_space(st.geometry, cfg.fluid);
  st.fluid = solve_stokes(cfg.fluid, space, st.geometry);
}

/// Dirichlet-Neumann fixed point with Aitken relaxation, starting from zero
/// displacements. Geometry is rebuilt from the deformed front every iteration.
inline FsiState fsi_fixed_point(const FsiConfig& cfg, const Mesh& background, const Mesh& front_reference) {
  if (!(cfg.tol > 0.0)) throw InputError("fsi: tol must be positive");
  if (!(cfg.omega0 > 0.0 && cfg.omega0 <= cfg.omega_max)) throw InputError("fsi: need 0 < omega0 <= omega_max");
  FsiState st;
  st.front = partition_front(front_reference);
  if (st.front.interface_composite.empty()) throw GeometryError("fsi: front has no fluid-solid interface nodes");
  st.solid_u.assign(st.front.solid.mesh.num_vertices(), Vec2{});
  st.mesh_u.assign(st.front.fluid2.mesh.num_vertices(), Vec2{});
  const SolidProblem solid_base = make_solid_problem(cfg, st.front);

  std::optional<std::ofstream> log;
  if (!cfg.diagnostics_csv.empty()) {
    log.emplace(cfg.diagnostics_csv);
    if (!*log) throw InputError("cannot write diagnostics file " + cfg.diagnostics_csv);
    *log << "k,omega,increment,fluid_dofs,cut_cells\n";
    log->precision(12);
  }

  std::vector<double> d_prev;
  double omega = cfg.omega0;
  std::vector<double> increments;
  for (int k = 0; k < cfg.max_outer; ++k) {
    FsiIteration it;
    it.k = k;
    detail::with_iteration_context(k, [&] {
      solve_fluid_on(st, cfg, background);
      const std::vector<Vec2> func =
          traction_functional(st.geometry, st.fluid, cfg.fluid, st.front.interface_fluid2, cfg.symmetric_stress);
      SolidProblem sp = solid_base;
      sp.interface_load = transfer_traction_to_reference(func, st.front.interface_solid, sp.mesh.num_vertices());
      const SolidSolution trial = cfg.solid_load_continuation
                                        ? solve_with_continuation(sp, cfg.newton_tol, cfg.newton_maxit, st.solid_u)
                                        : solve_newton(sp, cfg.newton_tol, cfg.newton_maxit, st.solid_u);
      it.newton_iterations = trial.iterations;

      std::vector<double> d = detail::flatten(trial.u);
      const std::vector<double> cur = detail::flatten(st.solid_u);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= cur[i];
      if (!cfg.relaxation) {
        omega = 1.0;
      } else if (!d_prev.empty()) {
        omega = aitken_update(omega, d_prev, d, cfg.omega_max);
      }
      d_prev = d;

      std::vector<Vec2> step(st.solid_u.size());
      for (std::size_t v = 0; v < step.size(); ++v) step[v] = omega * Vec2{d[2 * v], d[2 * v + 1]};
      std::vector<Vec2> next = st.solid_u;
      for (std::size_t v = 0; v < next.size(); ++v) next[v] += step[v];
      const double step_norm = l2_norm(sp.mesh, step);
      const double next_norm = l2_norm(sp.mesh, next);
      it.increment = next_norm > 0.0 ? step_norm / next_norm : step_norm;
      st.solid_u = std::move(next);
      st.mesh_u = solve_mesh_motion(make_mesh_problem(cfg, st.front, st.solid_u));
      deformed_front(st.front, st.solid_u, st.mesh_u);  // tangle check of the new configuration

      double gap = 0.0;
      for (std::size_t i = 0; i < st.front.interface_fluid2.size(); ++i) {
        const Vec2 xs = st.front.solid.mesh.vertex(st.front.interface_solid[i]) + st.solid_u[st.front.interface_solid[i]];
        const Vec2 xm = st.front.fluid2.mesh.vertex(st.front.interface_fluid2[i]) + st.mesh_u[st.front.interface_fluid2[i]];
        gap = std::max(gap, norm(xs - xm));
      }
      it.interface_gap = gap;
    });
    it.omega = omega;
    it.fluid_dofs = static_cast<Index>(st.fluid.coefficients.size());
    it.cut_cells = static_cast<Index>(st.geometry.topo.class_partial.size());
    st.history.push_back(it);
    increments.push_back(it.increment);
    if (log) *log << it.k << ',' << it.omega << ',' << it.increment << ',' << it.fluid_dofs << ',' << it.cut_cells << '\n';
    if (it.increment <= cfg.tol) {
      st.converged = true;
      detail::with_iteration_context(k + 1, [&] { solve_fluid_on(st, cfg, background); });
      return st;
    }
  }
  throw NonConvergenceError("fsi fixed point did not converge in " + std::to_string(cfg.max_outer) +
                                " outer iterations; increment history: " + format_history(increments),
                            increments);
}

}  // namespace olmfsi
