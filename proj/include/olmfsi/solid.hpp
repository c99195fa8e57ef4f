#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/geometry.hpp"
#include "olmfsi/linalg.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/quadrature.hpp"

namespace olmfsi {

enum class MaterialModel { StVenantKirchhoff, Linear };

/// Plane-strain Lame parameters.
struct Material {
  MaterialModel model = MaterialModel::StVenantKirchhoff;
  double mu = 1.0;
  double lambda = 1.0;

  static Material from_young(double E, double poisson, MaterialModel model = MaterialModel::StVenantKirchhoff) {
    if (!(E > 0.0) || !(poisson > -1.0 && poisson < 0.5))
      throw InputError("material: need E > 0 and -1 < nu < 1/2");
    return {model, E / (2.0 + 2.0 * poisson), E * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))};
  }
  void validate() const {
    if (!(mu > 0.0) || !(lambda > 0.0)) throw InputError("material: Lame parameters must be positive");
  }
};

/// Strain energy density.
inline double strain_energy(const Mat2& F, const Material& m) {
  if (m.model == MaterialModel::Linear) {
    const Mat2 e = (F - Mat2::identity()).sym();
    return m.mu * ddot(e, e) + 0.5 * m.lambda * e.trace() * e.trace();
  }
  const Mat2 E = 0.5 * (F.transpose() * F - Mat2::identity());
  return m.mu * ddot(E, E) + 0.5 * m.lambda * E.trace() * E.trace();
}

/// First Piola-Kirchhoff stress; requires det F > 0.
inline Mat2 first_piola(const Mat2& F, const Material& m, int cell = -1) {
  if (!(F.det() > 0.0))
    throw MeshTangleError("inverted element: det F = " + std::to_string(F.det()) +
                              (cell >= 0 ? " in solid cell " + std::to_string(cell) : std::string{}),
                          cell);
  if (m.model == MaterialModel::Linear) {
    const Mat2 e = (F - Mat2::identity()).sym();
    return 2.0 * m.mu * e + m.lambda * e.trace() * Mat2::identity();
  }
  const Mat2 E = 0.5 * (F.transpose() * F - Mat2::identity());
  return F * (2.0 * m.mu * E + m.lambda * E.trace() * Mat2::identity());
}

/// Directional derivative D Pi(F)[dF].
inline Mat2 piola_derivative(const Mat2& F, const Mat2& dF, const Material& m) {
  if (m.model == MaterialModel::Linear) {
    const Mat2 de = dF.sym();
    return 2.0 * m.mu * de + m.lambda * de.trace() * Mat2::identity();
  }
  const Mat2 E = 0.5 * (F.transpose() * F - Mat2::identity());
  const Mat2 dE = (F.transpose() * dF).sym();
  return dF * (2.0 * m.mu * E + m.lambda * E.trace() * Mat2::identity()) +
         F * (2.0 * m.mu * dE + m.lambda * dE.trace() * Mat2::identity());
}

/// Reference-configuration solid problem. `interface_load` is a dof-indexed
/// functional (2 * vertex + component) added to the external load.
struct SolidProblem {
  Mesh mesh;
  Material material;
  std::function<Vec2(const Vec2&)> body_force;
  std::vector<int> dirichlet_markers;
  std::function<Vec2(const Vec2&)> dirichlet_value;  // empty means zero
  std::vector<int> traction_markers;
  std::function<Vec2(const Vec2&)> traction;  // reference traction on traction_markers
  std::vector<double> interface_load;
  int load_order = 4;
};

inline std::vector<Index> dirichlet_vertices(const SolidProblem& p) {
  std::vector<char> on(p.mesh.num_vertices(), 0);
  for (const BoundaryEdge& e : p.mesh.boundary_edges())
    if (std::find(p.dirichlet_markers.begin(), p.dirichlet_markers.end(), e.marker) != p.dirichlet_markers.end())
      on[e.v[0]] = on[e.v[1]] = 1;
  std::vector<Index> out;
  for (Index v = 0; v < p.mesh.num_vertices(); ++v)
    if (on[v]) out.push_back(v);
  return out;
}

/// External load vector: body force, reference traction and interface functional.
inline Vector solid_load(const SolidProblem& p) {
  const Mesh& m = p.mesh;
  Vector f = Vector::Zero(2 * m.num_vertices());
  if (p.body_force) {
    for (Index c = 0; c < m.num_cells(); ++c) {
      const auto pts = m.cell_points(c);
      const QuadratureRule r = triangle_rule(pts[0], pts[1], pts[2], p.load_order);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Vec2 b = p.body_force(r.points[q]);
        const auto phi = p1_values(m, c, r.points[q]);
        for (int i = 0; i < 3; ++i)
          for (int d = 0; d < 2; ++d) f[2 * m.cell(c)[i] + d] += r.weights[q] * b[d] * phi[i];
      }
    }
  }
  if (p.traction) {
    for (const BoundaryEdge& e : m.boundary_edges()) {
      if (std::find(p.traction_markers.begin(), p.traction_markers.end(), e.marker) == p.traction_markers.end()) continue;
      const Vec2 a = m.vertex(e.v[0]), b = m.vertex(e.v[1]);
      const QuadratureRule r = segment_rule(a, b, p.load_order);
      const double len = norm(b - a);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Vec2 t = p.traction(r.points[q]);
        const double s = norm(r.points[q] - a) / len;
        const double phi[2] = {1.0 - s, s};
        for (int i = 0; i < 2; ++i)
          for (int d = 0; d < 2; ++d) f[2 * e.v[i] + d] += r.weights[q] * t[d] * phi[i];
      }
    }
  }
  if (!p.interface_load.empty()) {
    if (p.interface_load.size() != static_cast<std::size_t>(f.size()))
      throw InputError("solid: interface load has " + std::to_string(p.interface_load.size()) + " entries, expected " +
                       std::to_string(f.size()));
    for (Index i = 0; i < f.size(); ++i) f[i] += p.interface_load[i];
  }
  return f;
}

struct SolidAssembly {
  Vector residual;  // internal forces minus external load
  SparseMatrix tangent;
};

/// Residual R(u).v = (Pi(u), grad v) - L(v) and its analytic tangent, before
/// Dirichlet conditions. Displacements are stored per vertex.
inline SolidAssembly assemble_solid(const SolidProblem& p, const std::vector<Vec2>& u) {
  p.material.validate();
  const Mesh& m = p.mesh;
  if (u.size() != static_cast<std::size_t>(m.num_vertices())) throw InputError("solid: displacement size mismatch");
  SolidAssembly out;
  out.residual = -solid_load(p);
  SparseSystem k(2 * m.num_vertices());
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto g = p1_gradients(m, c);
    const Cell& cell = m.cell(c);
    const double area = m.cell_area(c);
    const Mat2 F = Mat2::identity() + p1_gradient(m, c, u);
    const Mat2 P = first_piola(F, p.material, c);
    for (int i = 0; i < 3; ++i) {
      const Vec2 pg = P * g[i];
      out.residual[2 * cell[i]] += area * pg.x;
      out.residual[2 * cell[i] + 1] += area * pg.y;
    }
    for (int j = 0; j < 3; ++j) {
      for (int d = 0; d < 2; ++d) {
        Vec2 e{};
        e[d] = 1.0;
        const Mat2 dP = piola_derivative(F, Mat2::outer(e, g[j]), p.material);
        for (int i = 0; i < 3; ++i) {
          const Vec2 col = dP * g[i];
          k.add(2 * cell[i], 2 * cell[j] + d, area * col.x);
          k.add(2 * cell[i] + 1, 2 * cell[j] + d, area * col.y);
        }
      }
    }
  }
  k.finalize();
  out.tangent = k.matrix();
  return out;
}

/// Newton iteration did not reach the tolerance.
class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : SolverError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

inline std::string format_history(const std::vector<double>& h) {
  std::ostringstream os;
  os.precision(3);
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? ", " : "") << h[i];
  return os.str();
}

struct SolidSolution {
  std::vector<Vec2> u;
  int iterations = 0;
  std::vector<double> residuals;  // free-dof residual norms: initial state, then after each step
};

/// Full Newton without line search. At least one step is taken so that the
/// Dirichlet lift enters through the first increment.
inline SolidSolution solve_newton(const SolidProblem& p, double tol = 1e-10, int maxit = 25,
                                  std::vector<Vec2> initial = {}) {
  const Mesh& m = p.mesh;
  const std::vector<Index> dv = dirichlet_vertices(p);
  if (dv.empty()) throw SolverError("solid: no Dirichlet vertices, rigid motions are not fixed");
  SolidSolution s;
  s.u = initial.empty() ? std::vector<Vec2>(m.num_vertices()) : std::move(initial);
  std::vector<char> fixed(2 * m.num_vertices(), 0);
  for (Index v : dv) fixed[2 * v] = fixed[2 * v + 1] = 1;
  auto free_norm = [&](const Vector& r) {
    double acc = 0.0;
    for (Index i = 0; i < r.size(); ++i)
      if (!fixed[i]) acc += r[i] * r[i];
    return std::sqrt(acc);
  };

  SolidAssembly a = assemble_solid(p, s.u);
  s.residuals.push_back(free_norm(a.residual));
  for (int it = 1; it <= maxit; ++it) {
    std::vector<Index> dofs;
    std::vector<double> vals;
    for (Index v : dv) {
      const Vec2 g = p.dirichlet_value ? p.dirichlet_value(m.vertex(v)) : Vec2{};
      for (int d = 0; d < 2; ++d) {
        dofs.push_back(2 * v + d);
        vals.push_back(g[d] - s.u[v][d]);
      }
    }
    const SparseSystem sys = apply_dirichlet(SparseSystem(a.tangent, Vector(-a.residual)), dofs, vals);
    const Vector du = solve_direct(sys);
    for (Index v = 0; v < m.num_vertices(); ++v) s.u[v] += Vec2{du[2 * v], du[2 * v + 1]};
    a = assemble_solid(p, s.u);
    s.residuals.push_back(free_norm(a.residual));
    s.iterations = it;
    if (s.residuals.back() <= tol) return s;
  }
  throw NonConvergenceError("solid Newton did not converge in " + std::to_string(maxit) +
                                " iterations; residual history: " + format_history(s.residuals),
                            s.residuals);
}

/// Problem with every load and the Dirichlet data multiplied by `factor`.
inline SolidProblem scaled_problem(const SolidProblem& p, double factor) {
  SolidProblem q = p;
  auto scale = [factor](const std::function<Vec2(const Vec2&)>& f) -> std::function<Vec2(const Vec2&)> {
    if (!f) return f;
    return [f, factor](const Vec2& x) { return factor * f(x); };
  };
  q.body_force = scale(p.body_force);
  q.traction = scale(p.traction);
  q.dirichlet_value = scale(p.dirichlet_value);
  for (double& v : q.interface_load) v *= factor;
  return q;
}

/// Newton from `initial`. If that fails, the full load is reached by adaptive
/// continuation in the load factor, starting from the unloaded state. The
/// returned state always solves the unscaled problem; `iterations` counts all
/// Newton steps taken.
inline SolidSolution solve_with_continuation(const SolidProblem& p, double tol = 1e-10, int maxit = 25,
                                             std::vector<Vec2> initial = {}, double min_step = 1.0 / 256.0) {
  try {
    return solve_newton(p, tol, maxit, std::move(initial));
  } catch (const NonConvergenceError&) {
  } catch (const MeshTangleError&) {
  }
  int total = 0;
  double factor = 0.0, step = 0.5;
  std::vector<Vec2> u(p.mesh.num_vertices());
  for (;;) {
    const double target = std::min(1.0, factor + step);
    try {
      SolidSolution s = solve_newton(scaled_problem(p, target), tol, maxit, u);
      total += s.iterations;
      factor = target;
      u = s.u;
      if (factor == 1.0) {
        s.iterations = total;
        return s;
      }
      step *= 1.5;
    } catch (const NonConvergenceError&) {
      step *= 0.5;
    } catch (const MeshTangleError&) {
      step *= 0.5;
    }
    if (step < min_step)
      throw NonConvergenceError("solid load continuation stalled at load factor " + std::to_string(factor), {factor});
  }
}

/// L2 norm of a P1 vector field.
inline double l2_norm(const Mesh& m, const std::vector<Vec2>& u) {
  double acc = 0.0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto pts = m.cell_points(c);
    const QuadratureRule r = triangle_rule(pts[0], pts[1], pts[2], 2);
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Vec2 v = evaluate_p1(m, c, u, r.points[q]);
      acc += r.weights[q] * dot(v, v);
    }
  }
  return std::sqrt(acc);
}

/// H1 seminorm error of a P1 field against an exact gradient.
inline double h1_error(const Mesh& m, const std::vector<Vec2>& u, const std::function<Mat2(const Vec2&)>& grad_exact,
                       int order = 4) {
  double acc = 0.0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto pts = m.cell_points(c);
    const Mat2 gh = p1_gradient(m, c, u);
    const QuadratureRule r = triangle_rule(pts[0], pts[1], pts[2], order);
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Mat2 d = grad_exact(r.points[q]) - gh;
      acc += r.weights[q] * ddot(d, d);
    }
  }
  return std::sqrt(acc);
}

}  // namespace olmfsi
