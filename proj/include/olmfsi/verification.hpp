#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "olmfsi/coupling.hpp"
#include "olmfsi/manufactured_fields.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/stokes.hpp"

namespace olmfsi {

/// Experimental order between two errors on meshes refined by a factor two.
inline double eoc(double coarse, double fine) { return std::log(coarse / fine) / std::log(2.0); }

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double err_u_h1 = 0.0;
  double err_p_l2 = 0.0;
  std::optional<double> err_s_h1;  // absent for fluid-only runs
  std::optional<double> eoc_u;
  std::optional<double> eoc_p;
  std::optional<double> eoc_s;
  int iterations = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<std::vector<FsiIteration>> histories;  // per level, FSI runs only

  /// Appends a row and fills its EOC columns from the previous row.
  void add(ConvergenceRow r) {
    if (!rows.empty()) {
      const ConvergenceRow& p = rows.back();
      r.eoc_u = eoc(p.err_u_h1, r.err_u_h1);
      r.eoc_p = eoc(p.err_p_l2, r.err_p_l2);
      if (p.err_s_h1 && r.err_s_h1) r.eoc_s = eoc(*p.err_s_h1, *r.err_s_h1);
    }
    rows.push_back(r);
  }
};

inline Mesh refine_times(Mesh m, int times) {
  for (int i = 0; i < times; ++i) m = refine_uniform(m);
  return m;
}

// ------------------------------------------------------------ strip FSI

struct ManufacturedParams {
  double L = 1.0;
  double R = 0.4;    // fluid height
  double R1 = 0.3;   // lower edge of the moving fluid layer
  double Hs = 0.1;   // solid thickness and bump amplitude
  double U0 = 1.0;
  double nu_f = 1e-3;
  double E = 10.0;
  double nu_s = 0.3;
  MaterialModel model = MaterialModel::StVenantKirchhoff;
  bool symmetric_stress = false;
  double background_top = 0.45;
  Index background_nx = 8;
  Index background_ny = 5;
  Index front_nx = 12;
  int fluid_layers = 2;
  int solid_layers = 2;
  double gamma = 10.0;
  double delta = 0.5;
  double tol = 1e-3;
  double omega_max = 1.5;
  double omega0 = 1.0;
  bool relaxation = true;
  int newton_maxit = 25;
  int max_outer = 50;
};

/// Fluid layer (0,L)x(0,R) under a solid layer (0,L)x(R,R+Hs); the solid is
/// lifted by H(x) e_y, the fluid stretched by (x, y(1 + H/R)).
struct ManufacturedFsi2d {
  ManufacturedParams prm;
  Material material;

  explicit ManufacturedFsi2d(ManufacturedParams p = {}) : prm(p), material(Material::from_young(p.E, p.nu_s, p.model)) {}

  double H(double x) const { return prm.Hs * 2.0 * x * (1.0 - x); }
  Vec2 fluid_map(const Vec2& X) const { return {X.x, X.y * (1.0 + H(X.x) / prm.R)}; }
  Vec2 mesh_u(const Vec2& X) const { return fluid_map(X) - X; }

  Vec2 u(const Vec2& x) const {
    const auto v = manufactured::strip_fluid_velocity(x.x, x.y, prm.R, prm.Hs, prm.U0);
    return {v[0], v[1]};
  }
  Mat2 grad_u(const Vec2& x) const {
    const auto g = manufactured::strip_fluid_velocity_gradient(x.x, x.y, prm.R, prm.Hs, prm.U0);
    return Mat2::from_rows(g[0], g[1], g[2], g[3]);
  }
  double p(const Vec2& x) const { return manufactured::strip_fluid_pressure(x.x, x.y); }
  Vec2 f(const Vec2& x) const {
    const auto v = manufactured::strip_fluid_force(x.x, x.y, prm.R, prm.Hs, prm.U0, prm.nu_f);
    return {v[0], v[1]};
  }
  Vec2 solid_u(const Vec2& X) const {
    const auto v = manufactured::strip_solid_displacement(X.x, X.y, prm.Hs);
    return {v[0], v[1]};
  }
  Mat2 solid_grad(const Vec2& X) const {
    const auto g = manufactured::strip_solid_displacement_gradient(X.x, X.y, prm.Hs);
    return Mat2::from_rows(g[0], g[1], g[2], g[3]);
  }
  Vec2 solid_force(const Vec2& X) const {
    const auto v = prm.model == MaterialModel::Linear
                       ? manufactured::strip_solid_force_linear(X.x, X.y, prm.Hs, material.mu, material.lambda)
                       : manufactured::strip_solid_force_stvk(X.x, X.y, prm.Hs, material.mu, material.lambda);
    return {v[0], v[1]};
  }
  /// Auxiliary reference traction closing the interface balance.
  Vec2 t_a(const Vec2& X) const {
    using namespace manufactured;
    const double mu = material.mu, lam = material.lambda;
    std::array<double, 2> v;
    if (prm.model == MaterialModel::Linear) {
      v = prm.symmetric_stress ? strip_aux_traction_linear_sym(X.x, prm.R, prm.Hs, prm.U0, prm.nu_f, mu, lam)
                               : strip_aux_traction_linear_full(X.x, prm.R, prm.Hs, prm.U0, prm.nu_f, mu, lam);
    } else {
      v = prm.symmetric_stress ? strip_aux_traction_stvk_sym(X.x, prm.R, prm.Hs, prm.U0, prm.nu_f, mu, lam)
                               : strip_aux_traction_stvk_full(X.x, prm.R, prm.Hs, prm.U0, prm.nu_f, mu, lam);
    }
    return {v[0], v[1]};
  }

  Mesh background(int level) const {
    return refine_times(build_rect_mesh(prm.background_nx, prm.background_ny, Rect{{0.0, 0.0}, {prm.L, prm.background_top}}),
                        level);
  }
  /// Conforming moving-fluid plus solid mesh in the reference configuration.
  Mesh front(int level) const {
    std::vector<double> xs, ys;
    for (Index i = 0; i <= prm.front_nx; ++i) xs.push_back(prm.L * i / prm.front_nx);
    for (int j = 0; j <= prm.fluid_layers; ++j) ys.push_back(prm.R1 + (prm.R - prm.R1) * j / prm.fluid_layers);
    for (int j = 1; j <= prm.solid_layers; ++j) ys.push_back(prm.R + prm.Hs * j / prm.solid_layers);
    const double r = prm.R;
    const Mesh m = tag_regions(build_tensor_mesh(xs, ys),
                               [r](const Vec2& c) { return c.y > r ? region::kSolid : region::kFluid; });
    return refine_times(m, level);
  }

  FsiConfig config() const {
    FsiConfig c;
    c.tol = prm.tol;
    c.omega_max = prm.omega_max;
    c.omega0 = prm.omega0;
    c.relaxation = prm.relaxation;
    c.newton_maxit = prm.newton_maxit;
    c.max_outer = prm.max_outer;
    c.fluid.nu = prm.nu_f;
    c.fluid.gamma = prm.gamma;
    c.fluid.delta = prm.delta;
    c.fluid.force = [this](const Vec2& x) { return f(x); };
    c.fluid.boundary_velocity = [this](const Vec2& x) { return u(x); };
    c.fluid.background_dirichlet = {markers::kLeft, markers::kRight, markers::kBottom};
    c.fluid.front_dirichlet = {markers::kLeft, markers::kRight};
    c.fluid.pin_pressure = true;
    c.fluid.pressure_reference = [this](const Vec2& x) { return p(x); };
    c.material = material;
    c.solid_force = [this](const Vec2& X) { return solid_force(X); };
    c.solid_dirichlet = {markers::kLeft, markers::kRight, markers::kTop};
    c.solid_dirichlet_value = [this](const Vec2& X) { return solid_u(X); };
    c.extra_traction = [this](const Vec2& X) { return t_a(X); };
    c.symmetric_stress = prm.symmetric_stress;
    c.mesh_fixed_markers = {markers::kLeft, markers::kRight};
    return c;
  }
};

struct ManufacturedRun {
  FsiState state;
  Mesh background;
  FluidErrors fluid_errors;
  double solid_h1 = 0.0;
};

inline ManufacturedRun run_manufactured(const ManufacturedFsi2d& mf, int level, FsiConfig cfg) {
  ManufacturedRun run;
  run.background = mf.background(level);
  run.state = fsi_fixed_point(cfg, run.background, mf.front(level));
  run.fluid_errors = error_norms(
      run.state.geometry, run.state.fluid, [&](const Vec2& x) { return mf.u(x); },
      [&](const Vec2& x) { return mf.grad_u(x); }, [&](const Vec2& x) { return mf.p(x); });
  run.solid_h1 = h1_error(run.state.front.solid.mesh, run.state.solid_u, [&](const Vec2& X) { return mf.solid_grad(X); });
  return run;
}

/// Full FSI fixed point on `levels` uniformly refined mesh triples.
inline ConvergenceReport run_convergence(int levels, const ManufacturedParams& prm = {},
                                         const std::string& diagnostics_prefix = {},
                                         const std::function<void(int, const ManufacturedRun&)>& on_level = {}) {
  if (levels < 2) throw InputError("run_convergence: need at least two levels for an EOC");
  const ManufacturedFsi2d mf(prm);
  ConvergenceReport rep;
  for (int l = 0; l < levels; ++l) {
    FsiConfig cfg = mf.config();
    if (!diagnostics_prefix.empty()) cfg.diagnostics_csv = diagnostics_prefix + std::to_string(l) + ".csv";
    ManufacturedRun run;
    try {
      run = run_manufactured(mf, l, cfg);
    } catch (const std::exception& e) {
      throw SolverError("convergence level " + std::to_string(l) + ": " + e.what());
    }
    ConvergenceRow r;
    r.level = l;
    r.h = max_diameter(run.background);
    r.err_u_h1 = run.fluid_errors.velocity_h1;
    r.err_p_l2 = run.fluid_errors.pressure_l2;
    r.err_s_h1 = run.solid_h1;
    r.iterations = run.state.iterations();
    rep.add(r);
    rep.histories.push_back(run.state.history);
    if (on_level) on_level(l, run);
  }
  return rep;
}

// ------------------------------------------------------------ fluid-only Stokes

struct StokesParams {
  double nu = 1.0;
  double gamma = 10.0;
  double delta = 0.5;
  Index background_n = 8;
  Index front_n = 6;
  double front_angle = 0.3;   // radians, about the square center
  Vec2 front_shift{0.013, -0.021};
};

inline Mesh stokes_front(const StokesParams& prm, int level) {
  const double cs = std::cos(prm.front_angle), sn = std::sin(prm.front_angle);
  const Mesh m = transform(build_rect_mesh(prm.front_n, prm.front_n, Rect{{0.3, 0.3}, {0.7, 0.7}}), [&](const Vec2& p) {
    const Vec2 d = p - Vec2{0.5, 0.5};
    return Vec2{0.5, 0.5} + Vec2{cs * d.x - sn * d.y, sn * d.x + cs * d.y} + prm.front_shift;
  });
  return refine_times(m, level);
}

inline FluidProblem stokes_problem(const StokesParams& prm) {
  FluidProblem fp;
  fp.nu = prm.nu;
  fp.gamma = prm.gamma;
  fp.delta = prm.delta;
  const double nu = prm.nu;
  fp.force = [nu](const Vec2& x) {
    const auto f = manufactured::trig_force(x.x, x.y, nu);
    return Vec2{f[0], f[1]};
  };
  fp.pin_pressure = true;
  fp.pressure_reference = [](const Vec2& x) { return manufactured::trig_pressure(x.x, x.y); };
  return fp;
}

struct StokesRun {
  FluidGeometry geometry;
  FluidSolution solution;
  FluidErrors errors;
};

inline StokesRun run_stokes(const StokesParams& prm, int level) {
  StokesRun r;
  r.geometry = build_fluid_geometry(
      refine_times(build_rect_mesh(prm.background_n, prm.background_n, Rect{{0.0, 0.0}, {1.0, 1.0}}), level),
      stokes_front(prm, level));
  const FluidProblem fp = stokes_problem(prm);
  r.solution = solve_stokes(fp, build_space(r.geometry, fp), r.geometry);
  r.errors = error_norms(
      r.geometry, r.solution,
      [](const Vec2& x) {
        const auto v = manufactured::trig_velocity(x.x, x.y);
        return Vec2{v[0], v[1]};
      },
      [](const Vec2& x) {
        const auto g = manufactured::trig_velocity_gradient(x.x, x.y);
        return Mat2::from_rows(g[0], g[1], g[2], g[3]);
      },
      [](const Vec2& x) { return manufactured::trig_pressure(x.x, x.y); });
  return r;
}

inline ConvergenceReport run_stokes_convergence(int levels, const StokesParams& prm = {},
                                                const std::function<void(int, const StokesRun&)>& on_level = {}) {
  if (levels < 1) throw InputError("run_stokes_convergence: need at least one level");
  ConvergenceReport rep;
  for (int l = 0; l < levels; ++l) {
    const StokesRun run = run_stokes(prm, l);
    ConvergenceRow r;
    r.level = l;
    r.h = max_diameter(run.geometry.background);
    r.err_u_h1 = run.errors.velocity_h1;
    r.err_p_l2 = run.errors.pressure_l2;
    r.iterations = 1;
    rep.add(r);
    if (on_level) on_level(l, run);
  }
  return rep;
}

// ------------------------------------------------------------ elastic flap

struct FlapParams {
  double length = 2.5;
  double height = 0.41;
  double flap_width = 0.06;
  double flap_height = 0.24;
  double base_x = 1.25;
  double margin_x = 0.12;  // moving-fluid layer beside the flap
  double margin_y = 0.1;   // moving-fluid layer above the flap
  double ubar = 0.45;
  double nu_f = 1e-3;
  double E = 15.0;
  double nu_s = 0.3;
  Index background_nx = 100;
  Index background_ny = 16;
  double cell = 0.03;  // front mesh spacing
  int refinements = 0;
  double tol = 1e-3;
  double omega_max = 1.5;
  // The unrelaxed first iterate solves the solid under the load of the
  // undeformed flap, which bends it close to collapse on refined meshes.
  double omega0 = 0.5;
  bool relaxation = true;
  int newton_maxit = 60;
  int max_outer = 50;
  double gamma = 10.0;
  double delta = 0.5;
};

/// Reference composite mesh around the flap. A nonzero angle rotates the flap
/// about its base center and extends the footprint along the floor:
///   (X, Y) -> (xc + (X - xc) / cos a + Y sin a, Y cos a).
/// The map has unit determinant; axis length and thickness are preserved.
inline Mesh flap_front(const FlapParams& prm, double angle_deg) {
  auto span = [&](double a, double b) {
    const int n = std::max(1, static_cast<int>(std::lround((b - a) / prm.cell)));
    std::vector<double> out;
    for (int i = 0; i <= n; ++i) out.push_back(a + (b - a) * i / n);
    return out;
  };
  const double x0 = prm.base_x - 0.5 * prm.flap_width, x1 = prm.base_x + 0.5 * prm.flap_width;
  std::vector<double> xs = span(x0 - prm.margin_x, x0);
  for (double v : span(x0, x1)) if (v > xs.back()) xs.push_back(v);
  for (double v : span(x1, x1 + prm.margin_x)) if (v > xs.back()) xs.push_back(v);
  std::vector<double> ys = span(0.0, prm.flap_height);
  for (double v : span(prm.flap_height, prm.flap_height + prm.margin_y)) if (v > ys.back()) ys.push_back(v);
  const double fh = prm.flap_height;
  Mesh m = tag_regions(build_tensor_mesh(xs, ys), [=](const Vec2& c) {
    return c.x > x0 && c.x < x1 && c.y < fh ? region::kSolid : region::kFluid;
  });
  const double a = angle_deg * std::acos(-1.0) / 180.0;
  if (!(std::abs(a) < 0.5 * std::acos(-1.0))) throw InputError("flap2d: angle must lie in (-90, 90) degrees");
  if (a != 0.0) {
    const double cs = std::cos(a), sn = std::sin(a), xc = prm.base_x;
    m = transform(m, [=](const Vec2& p) { return Vec2{xc + (p.x - xc) / cs + p.y * sn, p.y * cs}; });
  }
  return refine_times(m, prm.refinements);
}

inline FsiConfig flap_config(const FlapParams& prm) {
  FsiConfig c;
  c.tol = prm.tol;
  c.omega_max = prm.omega_max;
  c.omega0 = prm.omega0;
  c.relaxation = prm.relaxation;
  c.max_outer = prm.max_outer;
  c.newton_maxit = prm.newton_maxit;
  c.solid_load_continuation = true;
  c.fluid.nu = prm.nu_f;
  c.fluid.gamma = prm.gamma;
  c.fluid.delta = prm.delta;
  const double H = prm.height, ubar = prm.ubar;
  c.fluid.boundary_velocity = [=](const Vec2& x) { return Vec2{ubar * 4.0 * x.y * (H - x.y) / (H * H), 0.0}; };
  c.fluid.background_dirichlet = {markers::kLeft, markers::kBottom, markers::kTop};
  c.fluid.front_dirichlet = {markers::kBottom};
  c.material = Material::from_young(prm.E, prm.nu_s);
  c.solid_dirichlet = {markers::kBottom};
  c.mesh_fixed_markers = {markers::kBottom};
  return c;
}

struct FlapRun {
  FsiState state;
  Mesh background;
  double max_displacement = 0.0;
  double max_jump = 0.0;  // largest velocity jump across the fluid-fluid interface
  double max_gap = 0.0;   // largest solid / moving-fluid interface mismatch over iterations
};

inline FlapRun flap2d(double angle_deg, const FlapParams& prm = {}, const std::string& diagnostics_csv = {}) {
  FlapRun r;
  r.background = refine_times(
      build_rect_mesh(prm.background_nx, prm.background_ny, Rect{{0.0, 0.0}, {prm.length, prm.height}}), prm.refinements);
  FsiConfig cfg = flap_config(prm);
  cfg.diagnostics_csv = diagnostics_csv;
  r.state = fsi_fixed_point(cfg, r.background, flap_front(prm, angle_deg));
  for (const Vec2& v : r.state.solid_u) r.max_displacement = std::max(r.max_displacement, norm(v));
  r.max_jump = max_interface_jump(r.state.geometry, r.state.fluid);
  for (const FsiIteration& it : r.state.history) r.max_gap = std::max(r.max_gap, it.interface_gap);
  return r;
}

}  // namespace olmfsi
