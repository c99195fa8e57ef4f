#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "olmfsi/coupling.hpp"
#include "olmfsi/verification.hpp"

using namespace olmfsi;

namespace {

// ---------------------------------------------------------------- Aitken

TEST(Aitken, ScalarLinearIterationLandsOnFixedPoint) {
  // x <- 0.5 x + 1, fixed point 2. Two plain increments, then one relaxed step.
  auto g = [](double x) { return 0.5 * x + 1.0; };
  double x = 0.0;
  const std::vector<double> d0{g(x) - x};
  x += d0[0];
  const std::vector<double> d1{g(x) - x};
  const double omega = aitken_update(1.0, d0, d1, 2.0);
  x += omega * d1[0];
  EXPECT_NEAR(omega, 2.0, 1e-14);
  EXPECT_NEAR(x, 2.0, 1e-12);
}

TEST(Aitken, ClampsToOmegaMax) {
  EXPECT_DOUBLE_EQ(aitken_update(1.0, {1.0, 0.0}, {0.5, 0.0}, 1.5), 1.5);
  EXPECT_DOUBLE_EQ(aitken_update(1.0, {1.0, 0.0}, {0.5, 0.0}, 3.0), 2.0);
}

TEST(Aitken, ClampsToOmegaMin) {
  // Growing residual in the same direction gives a negative raw factor.
  EXPECT_DOUBLE_EQ(aitken_update(1.0, {1.0}, {2.0}, 1.5), kOmegaMin);
}

TEST(Aitken, DegenerateDifferenceKeepsPreviousFactor) {
  EXPECT_DOUBLE_EQ(aitken_update(0.7, {0.3, -0.2}, {0.3, -0.2}, 1.5), 0.7);
  EXPECT_THROW(aitken_update(1.0, {1.0}, {1.0, 2.0}, 1.5), InputError);
}

// ---------------------------------------------------------------- traction functional

Mesh wall_front(int k) {
  // Moving fluid (0,2)x(0,0.2) above a solid (0,2)x(-0.2,0).
  std::vector<double> xs, ys;
  for (int i = 0; i <= 10 * k; ++i) xs.push_back(2.0 * i / (10 * k));
  for (int j = 0; j <= 4 * k; ++j) ys.push_back(-0.2 + 0.4 * j / (4 * k));
  return tag_regions(build_tensor_mesh(xs, ys), [](const Vec2& c) { return c.y < 0.0 ? region::kSolid : region::kFluid; });
}

struct DragResult {
  double computed;
  double exact;
};

DragResult poiseuille_drag(int k) {
  // u = (4y(1-y), 0), p = 8(2 - x), nu = 1: wall shear nu du/dy(0) = 4.
  const FluidGeometry geo = build_fluid_geometry(build_rect_mesh(16 * k, 8 * k, Rect{{0.0, 0.0}, {2.0, 1.0}}), wall_front(k));
  FluidProblem prob;
  prob.nu = 1.0;
  prob.background_dirichlet = {markers::kLeft, markers::kTop};
  prob.front_dirichlet = {markers::kLeft};
  prob.boundary_velocity = [](const Vec2& x) { return Vec2{4.0 * x.y * (1.0 - x.y), 0.0}; };
  const FluidSolution s = solve_stokes(prob, build_space(geo, prob), geo);
  const FrontPartition part = partition_front(geo.front);
  std::vector<Index> nodes;
  for (Index v : part.interface_fluid2) {
    const double x = geo.fluid2.mesh.vertex(v).x;
    if (x > 1e-12 && x < 2.0 - 1e-12) nodes.push_back(v);
  }
  const std::vector<Vec2> l = traction_functional(geo, s, prob, nodes);
  double sum = 0.0;
  for (const Vec2& v : l) sum += v.x;
  const double hx = 2.0 / (10 * k);
  return {sum, 4.0 * (2.0 - hx)};
}

TEST(TractionFunctional, ZeroStateGivesZero) {
  const FluidGeometry geo = build_fluid_geometry(build_rect_mesh(16, 8, Rect{{0.0, 0.0}, {2.0, 1.0}}), wall_front(1));
  FluidProblem prob;
  FluidSolution s;
  s.u1.assign(geo.background.num_vertices(), Vec2{});
  s.p1.assign(geo.background.num_vertices(), 0.0);
  s.u2.assign(geo.fluid2.mesh.num_vertices(), Vec2{});
  s.p2.assign(geo.fluid2.mesh.num_vertices(), 0.0);
  const FrontPartition part = partition_front(geo.front);
  for (const Vec2& v : traction_functional(geo, s, prob, part.interface_fluid2)) EXPECT_EQ(norm(v), 0.0);
}

TEST(TractionFunctional, PoiseuilleWallDragWithinTwoPercent) {
  std::vector<double> rel;
  for (int k : {1, 2, 4}) {
    const DragResult d = poiseuille_drag(k);
    rel.push_back(std::abs(d.computed - d.exact) / d.exact);
  }
  EXPECT_LT(rel[1], rel[0]);
  EXPECT_LT(rel[2], rel[1]);
  EXPECT_LE(rel[2], 0.02);
}

TEST(TractionFunctional, RejectsUnknownInterfaceNode) {
  const FluidGeometry geo = build_fluid_geometry(build_rect_mesh(16, 8, Rect{{0.0, 0.0}, {2.0, 1.0}}), wall_front(1));
  FluidSolution s;
  s.u2.assign(geo.fluid2.mesh.num_vertices(), Vec2{});
  s.p2.assign(geo.fluid2.mesh.num_vertices(), 0.0);
  EXPECT_THROW(traction_functional(geo, s, FluidProblem{}, {geo.fluid2.mesh.num_vertices()}), GeometryError);
}

// Functional of the interpolated manufactured fields against Gauss quadrature
// of -(sigma n) phi_i along the reference interface y = R. End nodes are
// skipped: their hats also reach the vertical sides of the layer.
double manufactured_functional_error(int level) {
  const ManufacturedFsi2d mf;
  const FluidGeometry geo = build_fluid_geometry(mf.background(level), mf.front(level));
  const FluidProblem prob = mf.config().fluid;
  FluidSolution s;
  s.u2 = interpolate_vector(geo.fluid2.mesh, [&](const Vec2& x) { return mf.u(x); });
  s.p2 = interpolate(geo.fluid2.mesh, [&](const Vec2& x) { return mf.p(x); });
  const FrontPartition part = partition_front(geo.front);
  const std::vector<Vec2> l = traction_functional(geo, s, prob, part.interface_fluid2);

  std::vector<double> xs;
  for (Index v : part.interface_fluid2) xs.push_back(geo.fluid2.mesh.vertex(v).x);
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const double R = mf.prm.R;
  auto traction = [&](double x) {
    const Mat2 g = mf.grad_u({x, R});
    return -Vec2{prob.nu * g(0, 1), prob.nu * g(1, 1) - mf.p({x, R})};
  };
  const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), xs[i]);
    if (it == sorted.begin() || it + 1 == sorted.end()) continue;
    Vec2 exact;
    // left and right edges of the hat, each with 3-point Gauss
    for (int side : {-1, 1}) {
      const double a = xs[i], b = side < 0 ? *(it - 1) : *(it + 1);
      const double len = std::abs(b - a);
      for (int q = 0; q < 3; ++q) {
        const double t = 0.5 * (1.0 + gp[q]);  // 1 at node i, 0 at the neighbour
        exact += 0.5 * len * gw[q] * (1.0 - t) * traction(a + t * (b - a));
      }
    }
    err = std::max(err, norm(l[i] - exact));
    scale = std::max(scale, norm(exact));
  }
  return err / scale;
}

TEST(TractionFunctional, ManufacturedMatchesBoundaryQuadrature) {
  const double e0 = manufactured_functional_error(0);
  const double e1 = manufactured_functional_error(1);
  const double e2 = manufactured_functional_error(2);
  EXPECT_LT(e1, 0.7 * e0);
  EXPECT_LT(e2, 0.7 * e1);
  EXPECT_LT(e2, 0.05);
}

TEST(TractionFunctional, TranslationInvariant) {
  const Vec2 shift{0.3, -0.2};
  const FluidGeometry a = build_fluid_geometry(build_rect_mesh(16, 8, Rect{{0.0, 0.0}, {2.0, 1.0}}), wall_front(1));
  const FluidGeometry b = build_fluid_geometry(translate(a.background, shift), translate(a.front, shift));
  auto u = [](const Vec2& x) { return Vec2{x.y * (1.0 - x.y) + 0.1 * x.x, std::sin(x.x)}; };
  auto p = [](const Vec2& x) { return 1.0 + x.x * x.y; };
  FluidProblem pa, pb;
  pa.force = [](const Vec2& x) { return Vec2{x.x, x.y * x.y}; };
  pb.force = [&](const Vec2& x) { return pa.force(x - shift); };
  FluidSolution sa, sb;
  sa.u2 = interpolate_vector(a.fluid2.mesh, u);
  sa.p2 = interpolate(a.fluid2.mesh, p);
  sb.u2 = sa.u2;
  sb.p2 = sa.p2;
  const FrontPartition part = partition_front(a.front);
  const auto la = traction_functional(a, sa, pa, part.interface_fluid2);
  const auto lb = traction_functional(b, sb, pb, part.interface_fluid2);
  double scale = 0.0;
  for (std::size_t i = 0; i < la.size(); ++i) scale = std::max(scale, norm(la[i]));
  ASSERT_GT(scale, 1e-3);
  for (std::size_t i = 0; i < la.size(); ++i) EXPECT_LE(norm(la[i] - lb[i]), 1e-12 * scale);

  const Index ns = part.solid.mesh.num_vertices();
  const auto ta = transfer_traction_to_reference(la, part.interface_solid, ns);
  const auto tb = transfer_traction_to_reference(lb, part.interface_solid, ns);
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_NEAR(ta[i], tb[i], 1e-12 * scale);
}

// ---------------------------------------------------------------- transfer

TEST(TractionTransfer, CarriesValuesByNodeIdentity) {
  const std::vector<Vec2> f{{1.0, 2.0}, {-3.0, 0.5}};
  const std::vector<double> load = transfer_traction_to_reference(f, {4, 1}, 5);
  ASSERT_EQ(load.size(), 10u);
  EXPECT_EQ(load[8], 1.0);
  EXPECT_EQ(load[9], 2.0);
  EXPECT_EQ(load[2], -3.0);
  EXPECT_EQ(load[3], 0.5);
  double rest = 0.0;
  for (int i : {0, 1, 4, 5, 6, 7}) rest += std::abs(load[i]);
  EXPECT_EQ(rest, 0.0);
}

TEST(TractionTransfer, RejectsInconsistentMaps) {
  const std::vector<Vec2> f{{1.0, 2.0}, {-3.0, 0.5}};
  EXPECT_THROW(transfer_traction_to_reference(f, {1, 1}, 5), GeometryError);
  EXPECT_THROW(transfer_traction_to_reference(f, {1}, 5), GeometryError);
  EXPECT_THROW(transfer_traction_to_reference(f, {1, 5}, 5), GeometryError);
}

TEST(FrontPartition, InterfaceNodesCorrespond) {
  const FrontPartition p = partition_front(ManufacturedFsi2d{}.front(0));
  ASSERT_EQ(p.interface_fluid2.size(), p.interface_solid.size());
  ASSERT_EQ(p.interface_fluid2.size(), 13u);
  for (std::size_t i = 0; i < p.interface_fluid2.size(); ++i) {
    const Vec2 a = p.fluid2.mesh.vertex(p.interface_fluid2[i]);
    const Vec2 b = p.solid.mesh.vertex(p.interface_solid[i]);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NEAR(a.y, 0.4, 1e-15);
  }
}

// ---------------------------------------------------------------- fixed point

double relative_l2_difference(const Mesh& m, const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::vector<Vec2> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(m, d) / l2_norm(m, a);
}

TEST(FsiFixedPoint, ZeroDataConvergesInOneIteration) {
  const ManufacturedFsi2d mf;
  FsiConfig cfg;
  cfg.fluid.background_dirichlet = {markers::kLeft, markers::kRight, markers::kBottom};
  cfg.fluid.front_dirichlet = {markers::kLeft, markers::kRight};
  cfg.fluid.pin_pressure = true;
  cfg.mesh_fixed_markers = {markers::kLeft, markers::kRight};
  const FsiState st = fsi_fixed_point(cfg, mf.background(0), mf.front(0));
  EXPECT_TRUE(st.converged);
  EXPECT_EQ(st.iterations(), 1);
  for (const Vec2& v : st.solid_u) EXPECT_EQ(norm(v), 0.0);
  for (const Vec2& v : st.mesh_u) EXPECT_EQ(norm(v), 0.0);
  for (const Vec2& v : st.fluid.u2) EXPECT_LE(norm(v), 1e-14);
}

class ManufacturedFixedPoint : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    mf_ = new ManufacturedFsi2d();
    cfg_ = new FsiConfig(mf_->config());
    cfg_->diagnostics_csv = (std::filesystem::temp_directory_path() / "olmfsi_fsi_diagnostics.csv").string();
    state_ = new FsiState(fsi_fixed_point(*cfg_, mf_->background(0), mf_->front(0)));
  }
  static void TearDownTestSuite() {
    delete state_;
    delete cfg_;
    delete mf_;
  }
  static ManufacturedFsi2d* mf_;
  static FsiConfig* cfg_;
  static FsiState* state_;
};
ManufacturedFsi2d* ManufacturedFixedPoint::mf_ = nullptr;
FsiConfig* ManufacturedFixedPoint::cfg_ = nullptr;
FsiState* ManufacturedFixedPoint::state_ = nullptr;

TEST_F(ManufacturedFixedPoint, ConvergesWithinFifteenIterations) {
  EXPECT_TRUE(state_->converged);
  EXPECT_LE(state_->iterations(), 15);
  EXPECT_LE(state_->history.back().increment, cfg_->tol);
}

TEST_F(ManufacturedFixedPoint, InterfaceStaysWatertight) {
  for (const FsiIteration& it : state_->history) EXPECT_LE(it.interface_gap, 1e-14);
}

TEST_F(ManufacturedFixedPoint, RelaxationFactorsStayInRange) {
  for (const FsiIteration& it : state_->history) {
    EXPECT_GT(it.omega, kOmegaMin * (1.0 - 1e-15));
    EXPECT_LE(it.omega, cfg_->omega_max);
  }
}

TEST_F(ManufacturedFixedPoint, InterfaceQuadratureMatchesDeformedPerimeter) {
  // Gamma_ff is the bottom edge of the moving layer.
  const Mesh def = deformed_front(state_->front, state_->solid_u, state_->mesh_u);
  double len = 0.0;
  for (const BoundaryEdge& e : def.boundary_edges())
    if (e.marker == markers::kBottom) len += norm(def.vertex(e.v[1]) - def.vertex(e.v[0]));
  EXPECT_NEAR(state_->geometry.topo.interface_length(), len, 1e-10);
}

TEST_F(ManufacturedFixedPoint, ConvergedStateIsNearlyIdempotent) {
  const FsiState& st = *state_;
  const std::vector<Vec2> l = traction_functional(st.geometry, st.fluid, cfg_->fluid, st.front.interface_fluid2);
  SolidProblem sp = make_solid_problem(*cfg_, st.front);
  sp.interface_load = transfer_traction_to_reference(l, st.front.interface_solid, sp.mesh.num_vertices());
  const SolidSolution again = solve_newton(sp, cfg_->newton_tol, cfg_->newton_maxit, st.solid_u);
  EXPECT_LE(relative_l2_difference(sp.mesh, st.solid_u, again.u), cfg_->tol);
}

TEST_F(ManufacturedFixedPoint, RelaxationChangesPathNotResult) {
  FsiConfig plain = *cfg_;
  plain.relaxation = false;
  plain.diagnostics_csv.clear();
  const FsiState st = fsi_fixed_point(plain, mf_->background(0), mf_->front(0));
  for (const FsiIteration& it : st.history) EXPECT_EQ(it.omega, 1.0);
  EXPECT_LE(relative_l2_difference(state_->front.solid.mesh, state_->solid_u, st.solid_u), 10.0 * cfg_->tol);
}

TEST_F(ManufacturedFixedPoint, WritesDiagnosticsLog) {
  std::ifstream is(cfg_->diagnostics_csv);
  ASSERT_TRUE(is);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "k,omega,increment,fluid_dofs,cut_cells");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    ++rows;
  }
  EXPECT_EQ(rows, state_->iterations());
}

TEST_F(ManufacturedFixedPoint, SolidApproximatesManufacturedDisplacement) {
  double err = 0.0, scale = 0.0;
  const Mesh& m = state_->front.solid.mesh;
  for (Index v = 0; v < m.num_vertices(); ++v) {
    err = std::max(err, norm(state_->solid_u[v] - mf_->solid_u(m.vertex(v))));
    scale = std::max(scale, norm(mf_->solid_u(m.vertex(v))));
  }
  EXPECT_LT(err, 0.05 * scale);
}

TEST(FsiFixedPoint, IterationCapRaisesWithHistory) {
  const ManufacturedFsi2d mf;
  FsiConfig cfg = mf.config();
  cfg.max_outer = 1;
  try {
    fsi_fixed_point(cfg, mf.background(0), mf.front(0));
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    ASSERT_EQ(e.history().size(), 1u);
    EXPECT_EQ(e.history()[0], 1.0);
    EXPECT_NE(std::string(e.what()).find("increment history"), std::string::npos);
  }
}

TEST(FsiFixedPoint, SubSolverFailuresCarryIterationContext) {
  const ManufacturedFsi2d mf;
  FsiConfig cfg = mf.config();
  cfg.material = Material::from_young(1e-4, 0.3);
  try {
    fsi_fixed_point(cfg, mf.background(0), mf.front(0));
    FAIL() << "expected a solver or geometry error";
  } catch (const SolverError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("outer iteration ", 0), 0u) << e.what();
  } catch (const GeometryError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("outer iteration ", 0), 0u) << e.what();
  }
}

TEST(FsiFixedPoint, RejectsInvalidRelaxationSettings) {
  const ManufacturedFsi2d mf;
  FsiConfig cfg = mf.config();
  cfg.omega0 = 2.0;
  EXPECT_THROW(fsi_fixed_point(cfg, mf.background(0), mf.front(0)), InputError);
  cfg.omega0 = 1.0;
  cfg.tol = 0.0;
  EXPECT_THROW(fsi_fixed_point(cfg, mf.background(0), mf.front(0)), InputError);
}

TEST(FsiFixedPoint, StiffSolidScalesDisplacement) {
  // 65 degree flap: small strains, so the response is close to linear in 1/E.
  FlapParams soft;
  FlapParams stiff;
  stiff.E = 1000.0 * soft.E;
  const FlapRun a = flap2d(65.0, soft);
  const FlapRun b = flap2d(65.0, stiff);
  const double ratio = a.max_displacement / b.max_displacement;
  EXPECT_GT(ratio, 900.0);
  EXPECT_LT(ratio, 1100.0);
  EXPECT_LE(b.state.iterations(), 3);
}

}  // namespace
