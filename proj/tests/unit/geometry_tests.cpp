#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "olmfsi/geometry.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/mesh_io.hpp"
#include "olmfsi/overlap.hpp"
#include "olmfsi/quadrature.hpp"
#include "support/oracles.hpp"

using namespace olmfsi;

namespace {

oracle::Tri to_tri(const Mesh& m, Index c) {
  const auto p = m.cell_points(c);
  return {{{p[0].x, p[0].y}, {p[1].x, p[1].y}, {p[2].x, p[2].y}}};
}

std::vector<oracle::Tri> all_tris(const Mesh& m, int only_region = -1) {
  std::vector<oracle::Tri> out;
  for (Index c = 0; c < m.num_cells(); ++c)
    if (only_region < 0 || m.region_of(c) == only_region) out.push_back(to_tri(m, c));
  return out;
}

Mesh rotate_about(const Mesh& m, const Vec2& center, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return transform(m, [&](const Vec2& p) {
    const Vec2 d = p - center;
    return center + Vec2{c * d.x - s * d.y, s * d.x + c * d.y};
  });
}

Polygon square(double x0, double y0, double s) { return {{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}}; }

}  // namespace

// ---------------------------------------------------------------- mesh_core

TEST(Mesh, RectMeshCountsAndArea) {
  const Mesh m1 = build_rect_mesh(1, 1, {{0, 0}, {1, 1}});
  EXPECT_EQ(m1.num_cells(), 2);
  EXPECT_EQ(m1.num_vertices(), 4);
  EXPECT_NEAR(m1.total_area(), 1.0, 1e-15);

  const Mesh m2 = build_rect_mesh(2, 2, {{0, 0}, {1, 1}});
  EXPECT_EQ(m2.num_cells(), 8);
  EXPECT_EQ(m2.num_vertices(), 9);

  const Mesh m3 = build_rect_mesh(7, 3, {{-1.3, 0.2}, {2.1, 0.9}});
  EXPECT_EQ(m3.num_cells(), 42);
  EXPECT_NEAR(m3.total_area(), 3.4 * 0.7, 1e-12);
  EXPECT_TRUE(boundary_is_closed(m3));
}

TEST(Mesh, RectMeshRejectsDegenerateInput) {
  EXPECT_THROW(build_rect_mesh(2, 2, {{0, 0}, {0, 1}}), GeometryError);
  EXPECT_THROW(build_rect_mesh(0, 2, {{0, 0}, {1, 1}}), GeometryError);
}

TEST(Mesh, BoundaryMarkersBySide) {
  const Mesh m = build_rect_mesh(3, 2, {{0, 0}, {3, 2}});
  int counts[5] = {0, 0, 0, 0, 0};
  for (const BoundaryEdge& e : m.boundary_edges()) {
    const Vec2 mid = 0.5 * (m.vertex(e.v[0]) + m.vertex(e.v[1]));
    switch (e.marker) {
      case markers::kLeft: EXPECT_NEAR(mid.x, 0.0, 1e-15); break;
      case markers::kRight: EXPECT_NEAR(mid.x, 3.0, 1e-15); break;
      case markers::kBottom: EXPECT_NEAR(mid.y, 0.0, 1e-15); break;
      case markers::kTop: EXPECT_NEAR(mid.y, 2.0, 1e-15); break;
      default: ADD_FAILURE() << "unexpected marker";
    }
    ++counts[e.marker];
  }
  EXPECT_EQ(counts[markers::kLeft], 2);
  EXPECT_EQ(counts[markers::kRight], 2);
  EXPECT_EQ(counts[markers::kBottom], 3);
  EXPECT_EQ(counts[markers::kTop], 3);
}

TEST(Mesh, CellsAreCounterclockwiseAfterConstruction) {
  const Mesh m({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}});
  EXPECT_GT(triangle_signed_area(m.cell_points(0)[0], m.cell_points(0)[1], m.cell_points(0)[2]), 0.0);
  EXPECT_THROW(Mesh({{0, 0}, {1, 1}, {2, 2}}, {{0, 1, 2}}), GeometryError);
  EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}), GeometryError);
}

TEST(Mesh, ElementDiameter) {
  const Mesh right({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  EXPECT_NEAR(element_diameter(right, 0), std::sqrt(2.0), 1e-15);
  const Mesh eq({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}, {{0, 1, 2}});
  EXPECT_NEAR(element_diameter(eq, 0), 1.0, 1e-15);
  const Mesh m = build_rect_mesh(3, 4, {{0, 0}, {1, 1}});
  const Mesh m2 = transform(m, [](const Vec2& p) { return 2.0 * p; });
  for (Index c = 0; c < m.num_cells(); ++c)
    EXPECT_NEAR(element_diameter(m2, c), 2.0 * element_diameter(m, c), 1e-14);
}

TEST(Mesh, P1Gradients) {
  const Mesh right({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const auto g = p1_gradients(right, 0);
  EXPECT_NEAR(g[0].x, -1.0, 1e-15);
  EXPECT_NEAR(g[0].y, -1.0, 1e-15);
  EXPECT_NEAR(g[1].x, 1.0, 1e-15);
  EXPECT_NEAR(g[1].y, 0.0, 1e-15);
  const Mesh m = rotate_about(build_rect_mesh(4, 3, {{0, 0}, {1.3, 0.7}}), {0.2, 0.1}, 0.4);
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto gc = p1_gradients(m, c);
    const Vec2 s = gc[0] + gc[1] + gc[2];
    EXPECT_LT(norm(s), 1e-14 / m.cell_area(c));
  }
}

TEST(Mesh, P1ValuesPartitionOfUnityAndAffineReproduction) {
  const Mesh m = rotate_about(build_rect_mesh(5, 4, {{0, 0}, {1, 1}}), {0.5, 0.5}, 0.3);
  const auto f = [](const Vec2& p) { return 3.0 - 2.0 * p.x + 0.7 * p.y; };
  const auto nodal = interpolate(m, f);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index c = 0; c < m.num_cells(); ++c) {
    double a = u(rng), b = u(rng);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    const auto p = m.cell_points(c);
    const Vec2 x = p[0] + a * (p[1] - p[0]) + b * (p[2] - p[0]);
    const auto phi = p1_values(m, c, x);
    EXPECT_NEAR(phi[0] + phi[1] + phi[2], 1.0, 1e-14);
    EXPECT_NEAR(evaluate_p1(m, c, nodal, x), f(x), 1e-13);
  }
}

TEST(Mesh, RefinementPreservesAreaAndHalvesDiameter) {
  const Mesh m = rotate_about(build_rect_mesh(3, 2, {{0, 0}, {1.5, 1.0}}), {0, 0}, 0.2);
  const Mesh r = refine_uniform(m);
  EXPECT_EQ(r.num_cells(), 4 * m.num_cells());
  EXPECT_NEAR(r.total_area(), m.total_area(), 1e-13);
  EXPECT_NEAR(max_diameter(r), 0.5 * max_diameter(m), 1e-14);
  EXPECT_TRUE(boundary_is_closed(r));
  EXPECT_EQ(r.boundary_edges().size(), 2 * m.boundary_edges().size());
}

TEST(Mesh, TextFormatRoundTrip) {
  const Mesh m = tag_regions(build_rect_mesh(3, 2, {{0, 0}, {1, 0.7}}),
                             [](const Vec2& c) { return c.y > 0.35 ? region::kSolid : region::kFluid; });
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh back = read_mesh(ss);
  ASSERT_EQ(back.num_vertices(), m.num_vertices());
  ASSERT_EQ(back.num_cells(), m.num_cells());
  ASSERT_EQ(back.boundary_edges().size(), m.boundary_edges().size());
  for (Index v = 0; v < m.num_vertices(); ++v) {
    EXPECT_EQ(back.vertex(v).x, m.vertex(v).x);
    EXPECT_EQ(back.vertex(v).y, m.vertex(v).y);
  }
  for (Index c = 0; c < m.num_cells(); ++c) {
    EXPECT_EQ(back.cell(c), m.cell(c));
    EXPECT_EQ(back.region_of(c), m.region_of(c));
  }
}

TEST(Mesh, TextFormatErrors) {
  std::stringstream bad_header("mesh3d 1 1 0\n");
  EXPECT_THROW(read_mesh(bad_header), InputError);
  std::stringstream short_file("mesh2d 3 1 0\nv 0 0\nv 1 0\nc 0 1 2\n");
  EXPECT_THROW(read_mesh(short_file), InputError);
  std::stringstream unknown("mesh2d 3 1 0\nv 0 0\nv 1 0\nv 0 1\nx 1 2\nc 0 1 2\n");
  EXPECT_THROW(read_mesh(unknown), InputError);
  std::stringstream ok("# comment\nmesh2d 3 1 1\nv 0 0\nv 1 0\nv 0 1\nc 0 1 2\nb 0 1 3\n");
  const Mesh m = read_mesh(ok);
  EXPECT_EQ(m.region_of(0), region::kFluid);
  EXPECT_EQ(m.boundary_edges()[0].marker, markers::kBottom);
}

TEST(Mesh, ExtractRegionMarksInterface) {
  const Mesh m = tag_regions(build_rect_mesh(4, 4, {{0, 0}, {1, 1}}),
                             [](const Vec2& c) { return c.y > 0.5 ? region::kSolid : region::kFluid; });
  const SubMesh fluid = extract_region(m, region::kFluid);
  EXPECT_EQ(fluid.mesh.num_cells(), 16);
  EXPECT_NEAR(fluid.mesh.total_area(), 0.5, 1e-14);
  int interface_edges = 0;
  for (const BoundaryEdge& e : fluid.mesh.boundary_edges()) {
    if (e.marker != markers::kFluidSolid) continue;
    ++interface_edges;
    EXPECT_NEAR(fluid.mesh.vertex(e.v[0]).y, 0.5, 1e-15);
    EXPECT_NEAR(fluid.mesh.vertex(e.v[1]).y, 0.5, 1e-15);
  }
  EXPECT_EQ(interface_edges, 4);
  EXPECT_TRUE(boundary_is_closed(fluid.mesh));
}

// ---------------------------------------------------------------- geometry

TEST(Geometry, IntersectConvexExamples) {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_NEAR(area(intersect_convex(tri, tri)), 0.5, 1e-15);
  const Polygon far{{5, 5}, {6, 5}, {5, 6}};
  EXPECT_TRUE(intersect_convex(tri, far).empty());
  EXPECT_NEAR(area(intersect_convex(square(0, 0, 1), square(0.5, 0.5, 1))), 0.25, 1e-15);
  // edge-touching squares share no area
  EXPECT_TRUE(intersect_convex(square(0, 0, 1), square(1, 0, 1)).empty());
}

TEST(Geometry, IntersectConvexMatchesBooleanOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    oracle::Tri a{}, b{};
    for (auto& p : a) p = {u(rng), u(rng)};
    for (auto& p : b) p = {0.5 * u(rng), 0.5 * u(rng)};
    if (oracle::tri_area(a) < 1e-3 || oracle::tri_area(b) < 1e-3) continue;
    Polygon pa, pb;
    for (auto& p : a) pa.push_back({p[0], p[1]});
    for (auto& p : b) pb.push_back({p[0], p[1]});
    if (signed_area(pa) < 0) std::swap(pa[1], pa[2]);
    if (signed_area(pb) < 0) std::swap(pb[1], pb[2]);
    const Polygon r = intersect_convex(pa, pb);
    const double expect = oracle::covered_moment(a, {b}, 0, 0);
    EXPECT_NEAR(area(r), expect, 1e-12);
    EXPECT_LE(area(r), std::min(area(pa), area(pb)) + 1e-14);
  }
}

TEST(Geometry, ClipSegment) {
  const Polygon sq = square(0, 0, 1);
  auto s = clip_segment({{-1, 0.5}, {2, 0.5}}, sq, 1e-12);
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(s->length(), 1.0, 1e-12);
  EXPECT_FALSE(clip_segment({{-1, 2}, {2, 2}}, sq, 1e-12).has_value());
  // segment on an edge belongs to the closed polygon
  auto e = clip_segment({{0.2, 0.0}, {0.7, 0.0}}, sq, 1e-12);
  ASSERT_TRUE(e.has_value());
  EXPECT_NEAR(e->length(), 0.5, 1e-12);
}

// ---------------------------------------------------------------- quadrature

TEST(Quadrature, TriangleRulesExactForMonomials) {
  const Vec2 a{0.1, -0.2}, b{1.3, 0.4}, c{0.2, 0.9};
  const std::vector<oracle::Pt> ring{{a.x, a.y}, {b.x, b.y}, {c.x, c.y}};
  for (int order = 0; order <= 10; ++order) {
    const QuadratureRule r = triangle_rule(a, b, c, order);
    for (int p = 0; p <= order; ++p) {
      for (int q = 0; p + q <= order; ++q) {
        const double got = r.integrate([&](const Vec2& x) { return std::pow(x.x, p) * std::pow(x.y, q); });
        EXPECT_NEAR(got, oracle::ring_moment(ring, p, q), 1e-13) << "order " << order << " x^" << p << " y^" << q;
      }
    }
  }
}

TEST(Quadrature, SegmentRulesExact) {
  const Vec2 a{0.3, 0.1}, b{1.1, -0.5};
  for (int order = 0; order <= 9; ++order) {
    const QuadratureRule r = segment_rule(a, b, order);
    EXPECT_NEAR(r.weight_sum(), 1.0, 1e-14);
    for (int k = 0; k <= order; ++k) {
      // integral over arclength of t^k with t in [0,1] is L/(k+1)
      const double got = r.integrate([&](const Vec2& x) { return std::pow((x.x - a.x) / (b.x - a.x), k); });
      EXPECT_NEAR(got, 1.0 / (k + 1), 1e-13);
    }
  }
}

TEST(Quadrature, PolygonRuleWeightsSumToArea) {
  const Polygon hex{{1, 0}, {0.5, 0.8}, {-0.5, 0.8}, {-1, 0}, {-0.5, -0.8}, {0.5, -0.8}};
  EXPECT_NEAR(polygon_rule(hex, 2).weight_sum(), area(hex), 1e-14);
}

// ---------------------------------------------------------------- overlap

TEST(Overlap, FrontOutsideOrCovering) {
  const Mesh bg = build_rect_mesh(4, 4, {{0, 0}, {1, 1}});
  const Mesh outside = build_rect_mesh(2, 2, {{3, 3}, {4, 4}});
  const OverlapTopology t1 = classify(bg, outside);
  EXPECT_EQ(t1.class_not.size(), 32u);
  EXPECT_TRUE(t1.class_fully.empty() && t1.class_partial.empty());

  const Mesh cover = build_rect_mesh(3, 3, {{-0.1, -0.1}, {1.1, 1.1}});
  const OverlapTopology t2 = classify(bg, cover);
  EXPECT_EQ(t2.class_fully.size(), 32u);
  EXPECT_TRUE(t2.class_not.empty() && t2.class_partial.empty());
}

TEST(Overlap, ClassificationMatchesSamplingOracle) {
  const Mesh bg = build_rect_mesh(2, 2, {{0, 0}, {1, 1}});
  const Mesh front = build_rect_mesh(3, 3, {{0.45, 0.45}, {1.05, 1.05}});
  const OverlapTopology t = classify(bg, front);
  const auto cover = all_tris(front);
  ASSERT_EQ(t.class_not.size() + t.class_fully.size() + t.class_partial.size(), 8u);
  for (Index c = 0; c < bg.num_cells(); ++c) {
    const auto m = oracle::classify_by_sampling(to_tri(bg, c), cover);
    const CellClass expect = m == oracle::Membership::Inside    ? CellClass::FullyOverlapped
                             : m == oracle::Membership::Outside ? CellClass::NotOverlapped
                                                                : CellClass::Partial;
    EXPECT_EQ(t.cell_class[c], expect) << "cell " << c;
  }
}

TEST(Overlap, ClassificationRandomizedAgainstSampling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Mesh bg = build_rect_mesh(6, 5, {{0, 0}, {1, 1}});
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh front = rotate_about(build_rect_mesh(3, 2, {{0, 0}, {0.43, 0.31}}), {0, 0}, 3.0 * u(rng));
    const Mesh placed = translate(front, {0.3 + 0.3 * u(rng), 0.3 + 0.3 * u(rng)});
    const OverlapTopology t = classify(bg, placed);
    const auto cover = all_tris(placed);
    for (Index c = 0; c < bg.num_cells(); ++c) {
      const oracle::Tri tc = to_tri(bg, c);
      const double free_area = oracle::uncovered_moment(tc, cover, 0, 0);
      const double covered = oracle::covered_moment(tc, cover, 0, 0);
      const double cell = oracle::tri_area(tc);
      const CellClass expect = free_area <= 1e-10 * cell ? CellClass::FullyOverlapped
                               : covered <= 1e-10 * cell ? CellClass::NotOverlapped
                                                         : CellClass::Partial;
      EXPECT_EQ(t.cell_class[c], expect) << "cell " << c;
      if (oracle::classify_by_sampling(tc, cover, 120) == oracle::Membership::Mixed)
        EXPECT_EQ(t.cell_class[c], CellClass::Partial);
    }
  }
}

TEST(Overlap, FinenessViolationIsReported) {
  const Mesh bg = build_rect_mesh(2, 2, {{0, 0}, {1, 1}});
  // solid cells straddle the background gridlines
  const Mesh front = tag_regions(build_rect_mesh(4, 4, {{0.3, 0.3}, {0.8, 0.8}}), [](const Vec2&) { return region::kSolid; });
  try {
    classify(bg, front);
    FAIL() << "expected FinenessError";
  } catch (const FinenessError& e) {
    EXPECT_NE(std::string(e.what()).find("too coarse"), std::string::npos);
  }
}

TEST(Overlap, CutCellQuadratureExamples) {
  const Mesh bg({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const Mesh big = build_rect_mesh(1, 1, {{0.5, -1.0}, {3.0, 3.0}});
  // remaining part {x < 0.5} of the unit right triangle: 1/2 - 1/8
  const QuadratureRule r = cut_cell_quadrature(bg, 0, big, 2);
  EXPECT_NEAR(r.weight_sum(), 0.375, 1e-12);
  const double mc = oracle::monte_carlo_uncovered_area(to_tri(bg, 0), all_tris(big), 400000);
  EXPECT_NEAR(mc, 0.375, 5e-3);

  const Mesh far = build_rect_mesh(1, 1, {{5, 5}, {6, 6}});
  EXPECT_NEAR(cut_cell_quadrature(bg, 0, far, 2).weight_sum(), 0.5, 1e-15);
  const Mesh cover = build_rect_mesh(1, 1, {{-1, -1}, {2, 2}});
  EXPECT_TRUE(cut_cell_quadrature(bg, 0, cover, 2).empty());

  const OverlapTopology t = classify(bg, far);
  EXPECT_THROW(t.cut_rule(0), GeometryError);
}

TEST(Overlap, CutQuadratureMomentsMatchBooleanOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Mesh bg = build_rect_mesh(5, 5, {{0, 0}, {1, 1}});
  int partial_cells = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const Mesh front = translate(rotate_about(build_rect_mesh(2, 3, {{0, 0}, {0.37, 0.41}}), {0, 0}, 6.0 * u(rng)),
                                 {0.3 + 0.4 * u(rng), 0.3 + 0.4 * u(rng)});
    const OverlapTopology t = classify(bg, front, 4);
    const auto cover = all_tris(front);
    for (Index c : t.class_partial) {
      ++partial_cells;
      const oracle::Tri tc = to_tri(bg, c);
      EXPECT_NEAR(t.cut_rule(c).weight_sum(), oracle::uncovered_moment(tc, cover, 0, 0), 1e-10);
      for (int p = 0; p <= 4; ++p) {
        for (int q = 0; p + q <= 4; ++q) {
          const double got =
              t.cut_rule(c).integrate([&](const Vec2& x) { return std::pow(x.x, p) * std::pow(x.y, q); });
          EXPECT_NEAR(got, oracle::uncovered_moment(tc, cover, p, q), 1e-9);
        }
      }
    }
  }
  EXPECT_GE(partial_cells, 20);
}

TEST(Overlap, InterfaceSegmentsSquareInsideOneCell) {
  const Mesh bg = build_rect_mesh(1, 1, {{0, 0}, {1, 1}});
  // square of side s inside the lower-right triangle of the single quad
  const double s = 0.2;
  const Mesh front = build_rect_mesh(1, 1, {{0.6, 0.1}, {0.6 + s, 0.1 + s}});
  const OverlapTopology t = build_topology(bg, front);
  ASSERT_EQ(t.interface_segments.size(), 4u);
  EXPECT_NEAR(t.interface_length(), 4 * s, 1e-14);
  bool found_right = false;
  for (const auto& seg : t.interface_segments) {
    if (std::abs(seg.a.x - 0.8) < 1e-14 && std::abs(seg.b.x - 0.8) < 1e-14) {
      found_right = true;
      EXPECT_NEAR(seg.normal.x, 1.0, 1e-15);
      EXPECT_NEAR(seg.normal.y, 0.0, 1e-15);
    }
  }
  EXPECT_TRUE(found_right);
}

TEST(Overlap, InterfaceSegmentsMatchGridSplittingOracle) {
  const Mesh bg = build_rect_mesh(2, 2, {{0, 0}, {1, 1}});
  const Mesh front = build_rect_mesh(3, 3, {{0.2, 0.2}, {0.8, 0.8}});
  const OverlapTopology t = build_topology(bg, front);
  EXPECT_NEAR(t.interface_length(), 2.4, 1e-12);

  std::vector<double> expected;
  for (const BoundaryFacet& f : boundary_facets(front)) {
    const oracle::Pt a{front.vertex(f.a).x, front.vertex(f.a).y};
    const oracle::Pt b{front.vertex(f.b).x, front.vertex(f.b).y};
    const auto ts = oracle::grid_split_parameters(a, b, 0.0, 0.0, 0.5, 0.5, 2, 2);
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) expected.push_back((ts[k + 1] - ts[k]) * len);
  }
  std::vector<double> got;
  for (const auto& s : t.interface_segments) got.push_back(s.length());
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], expected[k], 1e-12);

  // each segment sits in its background parent and points away from the front
  for (const auto& s : t.interface_segments) {
    const Vec2 mid = 0.5 * (s.a + s.b);
    const auto p = bg.cell_points(s.background_cell);
    EXPECT_TRUE(point_in_triangle(mid, p[0], p[1], p[2], 1e-12));
    EXPECT_FALSE(oracle::in_union({mid.x + 1e-7 * s.normal.x, mid.y + 1e-7 * s.normal.y}, all_tris(front)));
    EXPECT_TRUE(t.is_reduced(s.background_cell));
  }
}

TEST(Overlap, InterfaceOnGridlinesHasOneParentPerPiece) {
  // front boundary lies exactly on background gridlines
  const Mesh bg = build_rect_mesh(4, 4, {{0, 0}, {1, 1}});
  const Mesh front = build_rect_mesh(2, 2, {{0.25, 0.25}, {0.75, 0.75}});
  const OverlapTopology t = build_topology(bg, front);
  EXPECT_NEAR(t.interface_length(), 2.0, 1e-12);
  EXPECT_TRUE(t.class_partial.empty());
  for (const auto& s : t.interface_segments) {
    EXPECT_EQ(t.cell_class[s.background_cell], CellClass::NotOverlapped);
    const Vec2 c = centroid(bg.cell_polygon(s.background_cell));
    EXPECT_GT(dot(c - 0.5 * (s.a + s.b), s.normal), 0.0);
  }
}

TEST(Overlap, OverlapPairs) {
  const Mesh bg = build_rect_mesh(2, 2, {{0, 0}, {1, 1}});
  const Mesh far = build_rect_mesh(1, 1, {{3, 3}, {4, 4}});
  EXPECT_TRUE(build_topology(bg, far).overlap_pairs.empty());

  const Mesh one({{0.7, 0.05}, {0.9, 0.05}, {0.9, 0.25}}, {{0, 1, 2}});
  const OverlapTopology t = build_topology(bg, one);
  ASSERT_EQ(t.overlap_pairs.size(), 1u);
  EXPECT_NEAR(area(t.overlap_pairs[0].polygon), one.cell_area(0), 1e-15);
}

TEST(Overlap, OverlapAreaMatchesOracles) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Mesh bg = build_rect_mesh(14, 14, {{0, 0}, {1, 1}});
  for (int trial = 0; trial < 5; ++trial) {
    const Mesh composite = tag_regions(
        translate(rotate_about(build_rect_mesh(6, 6, {{0, 0}, {0.6, 0.6}}), {0.3, 0.3}, 3.0 * u(rng)),
                  {0.2 + 0.01 * trial, 0.2 + 0.02 * u(rng)}),
        [](const Vec2&) { return region::kFluid; });
    // inner solid block well inside the composite
    const Vec2 ctr = 0.5 * (composite.box().lo + composite.box().hi);
    const Mesh front = tag_regions(
        composite, [&](const Vec2& c) { return norm(c - ctr) < 0.1 ? region::kSolid : region::kFluid; });
    const OverlapTopology t = build_topology(bg, front);
    std::vector<oracle::Tri> reduced;
    for (Index c : t.reduced_cells) reduced.push_back(to_tri(bg, c));
    double exact = 0.0;
    for (const auto& k : all_tris(front, region::kFluid)) exact += oracle::covered_moment(k, reduced, 0, 0);
    EXPECT_NEAR(t.overlap_area(), exact, 1e-10);
  }
}

TEST(Overlap, AreaBalanceAndTranslationEquivariance) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Mesh bg = build_rect_mesh(7, 5, {{0, 0}, {1, 1}});
  for (int trial = 0; trial < 6; ++trial) {
    const Mesh front = translate(rotate_about(build_rect_mesh(3, 3, {{0, 0}, {0.3, 0.3}}), {0.15, 0.15}, 6 * u(rng)),
                                 {0.2 + 0.4 * u(rng), 0.2 + 0.4 * u(rng)});
    const OverlapTopology t = build_topology(bg, front);
    EXPECT_NEAR(background_fluid_area(bg, t) + front.total_area(), 1.0, 1e-9);
    double perimeter = 0.0;
    for (const BoundaryFacet& f : boundary_facets(front)) perimeter += norm(front.vertex(f.b) - front.vertex(f.a));
    EXPECT_NEAR(t.interface_length(), perimeter, 1e-10);

    const Vec2 shift{0.37, -0.21};
    const OverlapTopology ts = build_topology(translate(bg, shift), translate(front, shift));
    EXPECT_NEAR(background_fluid_area(translate(bg, shift), ts), background_fluid_area(bg, t), 1e-10);
    EXPECT_NEAR(ts.interface_length(), t.interface_length(), 1e-10);
    EXPECT_NEAR(ts.overlap_area(), t.overlap_area(), 1e-10);
    EXPECT_EQ(ts.class_partial, t.class_partial);
  }
}
