#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mesh_fixtures.hpp"
#include "psflow/error.hpp"
#include "psflow/ps_split.hpp"

using namespace psflow;

namespace {

double line_distance(Point2 p, Point2 a, Point2 b) { return std::abs(cross(b - a, p - a)) / distance(a, b); }

}  // namespace

TEST(Incenter, EquilateralTriangleGivesCentroid) {
  const Point2 a{0, 0}, b{1, 0}, c{0.5, std::sqrt(3.0) / 2};
  const Point2 z = incenter(a, b, c);
  const Point2 g = (a + b + c) / 3.0;
  EXPECT_NEAR(z.x, g.x, 1e-15);
  EXPECT_NEAR(z.y, g.y, 1e-15);
}

TEST(Incenter, ReferenceTriangleClosedForm) {
  const Point2 z = incenter({0, 0}, {1, 0}, {0, 1});
  const double r = 1.0 / (2.0 + std::sqrt(2.0));
  EXPECT_NEAR(z.x, r, 1e-16);
  EXPECT_NEAR(z.y, r, 1e-16);
  EXPECT_NEAR(r, 0.292893, 1e-6);
}

TEST(Incenter, EquidistantFromAllEdgeLines) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    if (triangle_area(a, b, c) < 1e-2) continue;
    const Point2 z = incenter(a, b, c);
    const double r = line_distance(z, a, b);
    EXPECT_NEAR(line_distance(z, b, c), r, 1e-12 * (1 + r));
    EXPECT_NEAR(line_distance(z, c, a), r, 1e-12 * (1 + r));
  }
}

TEST(Incenter, DegenerateTriangleThrows) {
  EXPECT_THROW(incenter({0, 0}, {1, 1}, {2, 2}), Error);
}

TEST(Split, SmallestMeshCounts) {
  const PSMesh ps = split(generate_structured(1));
  EXPECT_EQ(ps.num_vertices(), 11);
  EXPECT_EQ(ps.num_subtriangles(), 12);
  int singular = 0, centers = 0;
  for (int v = 0; v < ps.num_vertices(); ++v) {
    singular += ps.kind(v) == SplitVertexKind::kSingular;
    centers += ps.kind(v) == SplitVertexKind::kIncenter;
  }
  EXPECT_EQ(singular, 5);
  EXPECT_EQ(centers, 2);
}

TEST(Split, TwoByTwoCounts) {
  const PSMesh ps = split(generate_structured(2));
  EXPECT_EQ(ps.num_vertices(), 9 + 16 + 8);
  EXPECT_EQ(ps.num_subtriangles(), 48);
  EXPECT_EQ(ps.num_singular_interior(), 8);
  EXPECT_EQ(ps.num_singular_exterior(), 8);
}

TEST(Split, PointSymmetricPairMeetsAtMidpoint) {
  // Second triangle is the first rotated by 180 degrees about the shared edge midpoint.
  const MacroMesh m({{0, 0}, {1, 0}, {0.3, 0.8}, {0.7, -0.8}}, {{0, 1, 2}, {0, 3, 1}});
  const PSMesh ps = split(m);
  const int e = m.find_edge(0, 1);
  ASSERT_FALSE(m.edge_exterior(e));
  const Point2 s = ps.vertex(ps.singular_vertex(e));
  EXPECT_NEAR(s.x, 0.5, 1e-15);
  EXPECT_NEAR(s.y, 0.0, 1e-15);
}

TEST(Split, AxisMirrorPairMeetsAtIncenterFoot) {
  const MacroMesh m({{0, 0}, {1, 0}, {0.3, 0.8}, {0.3, -0.8}}, {{0, 1, 2}, {0, 3, 1}});
  const PSMesh ps = split(m);
  const Point2 s = ps.vertex(ps.singular_vertex(m.find_edge(0, 1)));
  const Point2 c0 = ps.vertex(ps.incenter_vertex(0)), c1 = ps.vertex(ps.incenter_vertex(1));
  EXPECT_NEAR(c0.x, c1.x, 1e-15);
  EXPECT_NEAR(c0.y, -c1.y, 1e-15);
  EXPECT_NEAR(s.x, c0.x, 1e-15);
  EXPECT_NEAR(s.y, 0.0, 1e-15);
}

TEST(Split, StructuredDiagonalsMeetAtMidpoints) {
  const PSMesh ps = split(generate_structured(4));
  const MacroMesh& m = ps.macro();
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ev = m.edges()[e].vertices;
    const Point2 mid = 0.5 * (m.vertex(ev[0]) + m.vertex(ev[1]));
    EXPECT_EQ(ps.vertex(ps.singular_vertex(e)), mid) << e;
  }
}

TEST(Split, ExteriorSingularVerticesAreMidpoints) {
  const PSMesh ps = split(fixtures::jittered_mesh(4));
  const MacroMesh& m = ps.macro();
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.edge_exterior(e)) continue;
    const auto& ev = m.edges()[e].vertices;
    const Point2 mid = 0.5 * (m.vertex(ev[0]) + m.vertex(ev[1]));
    EXPECT_NEAR(distance(ps.vertex(ps.singular_vertex(e)), mid), 0.0, 1e-15);
  }
}

TEST(Split, InteriorSingularVertexLiesOnEdgeAndCenterSegment) {
  const PSMesh ps = split(fixtures::jittered_mesh(5));
  const MacroMesh& m = ps.macro();
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_exterior(e)) continue;
    const MacroEdge& edge = m.edges()[e];
    const Point2 s = ps.vertex(ps.singular_vertex(e));
    const Point2 a = m.vertex(edge.vertices[0]), b = m.vertex(edge.vertices[1]);
    const Point2 c0 = ps.vertex(ps.incenter_vertex(edge.triangles[0]));
    const Point2 c1 = ps.vertex(ps.incenter_vertex(edge.triangles[1]));
    EXPECT_LT(line_distance(s, a, b), 1e-15);
    EXPECT_LT(line_distance(s, c0, c1), 1e-15);
    EXPECT_GT(dot(s - a, b - a), 0.0);
    EXPECT_GT(dot(s - b, a - b), 0.0);
  }
}

TEST(Split, SubtriangleAreasSumToMacroArea) {
  for (const MacroMesh& m : {generate_structured(3), fixtures::jittered_mesh(6), fixtures::l_shaped_mesh(2)}) {
    const PSMesh ps = split(m);
    for (int k = 0; k < m.num_triangles(); ++k) {
      double sum = 0.0;
      for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
        const int s = ps.subtriangle_index(k, i);
        const auto p = ps.subtriangle_points(s);
        EXPECT_GT(signed_area2(p[0], p[1], p[2]), 0.0);
        EXPECT_EQ(ps.subtriangles()[s].parent, k);
        sum += ps.subtriangle_area(s);
      }
      EXPECT_NEAR(sum, m.triangle_area(k), 1e-12 * m.triangle_area(k));
    }
  }
}

TEST(Split, SplitDiameterIsBelowMacroDiameter) {
  const PSMesh ps = split(generate_structured(4));
  EXPECT_LT(ps.max_subtriangle_diameter(), ps.macro().max_diameter());
  EXPECT_GT(ps.max_subtriangle_diameter(), 0.5 * ps.macro().max_diameter());
}

TEST(SingularVertices, EverySingularVertexVerifies) {
  for (const MacroMesh& m : {generate_structured(1), generate_structured(4), fixtures::jittered_mesh(5)}) {
    const PSMesh ps = split(m);
    for (int e = 0; e < m.num_edges(); ++e) EXPECT_TRUE(verify_singular(ps, ps.singular_vertex(e)));
  }
}

TEST(SingularVertices, IncentersAndGenericMacroVerticesDoNot) {
  const PSMesh ps1 = split(generate_structured(1));
  for (int k = 0; k < 2; ++k) EXPECT_FALSE(verify_singular(ps1, ps1.incenter_vertex(k)));
  const PSMesh ps = split(fixtures::jittered_mesh(5));
  const MacroMesh& m = ps.macro();
  for (int k = 0; k < m.num_triangles(); ++k) EXPECT_FALSE(verify_singular(ps, ps.incenter_vertex(k)));
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (!m.vertex_exterior(v)) {
      EXPECT_FALSE(verify_singular(ps, v)) << v;
    }
  }
}

TEST(SingularVertices, PerturbationBreaksCollinearity) {
  const PSMesh ps = split(fixtures::jittered_mesh(3));
  const MacroMesh& m = ps.macro();
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_exterior(e)) continue;
    const int z = ps.singular_vertex(e);
    std::vector<Point2> nb;
    for (int v : split_neighbors(ps, z)) nb.push_back(ps.vertex(v));
    EXPECT_TRUE(lies_on_two_lines(ps.vertex(z), nb));
    const MacroEdge& edge = m.edges()[e];
    const Vec2 d = ps.vertex(ps.incenter_vertex(edge.triangles[1])) - ps.vertex(ps.incenter_vertex(edge.triangles[0]));
    const Point2 moved = ps.vertex(z) + 1e-3 * rot90(d) / norm(d);
    EXPECT_FALSE(lies_on_two_lines(moved, nb));
  }
}

TEST(ReferenceMap, IdentityTriangleHasReferenceIncenter) {
  const PSMesh ps = split(MacroMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  const ReferenceGeometry g = reference_geometry(ps, 0);
  EXPECT_EQ(g.jacobian.a, 1.0);
  EXPECT_EQ(g.jacobian.d, 1.0);
  EXPECT_EQ(g.jacobian.b, 0.0);
  const double r = 1.0 / (2.0 + std::sqrt(2.0));
  EXPECT_NEAR(g.center.x, r, 1e-16);
  EXPECT_NEAR(g.center.y, r, 1e-16);
  EXPECT_NEAR(g.singular[0].y, 0.5, 1e-16);
  EXPECT_NEAR(g.singular[1].x, 0.5, 1e-16);
}

TEST(ReferenceMap, RoundTripAndDeterminant) {
  const PSMesh ps = split(fixtures::jittered_mesh(4));
  const MacroMesh& m = ps.macro();
  for (int k = 0; k < m.num_triangles(); ++k) {
    const ReferenceGeometry g = reference_geometry(ps, k);
    EXPECT_NEAR(g.det, 2.0 * m.triangle_area(k), 1e-15);
    const auto ref = g.local_coordinates();
    const auto phys = ps.local_coordinates(k);
    for (int i = 0; i < kLocalPoints; ++i) {
      EXPECT_LT(distance(g.map(ref[i]), phys[i]), 1e-12 * (1 + norm(phys[i])));
    }
    EXPECT_NEAR(g.singular[0].x, 0.0, 1e-14);
    EXPECT_NEAR(g.singular[1].y, 0.0, 1e-14);
    EXPECT_NEAR(g.singular[2].x + g.singular[2].y, 1.0, 1e-14);
  }
}

TEST(Split, SplitVertexNumbering) {
  const PSMesh ps = split(generate_structured(2));
  const MacroMesh& m = ps.macro();
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(ps.kind(v), SplitVertexKind::kMacroVertex);
  for (int e = 0; e < m.num_edges(); ++e) {
    EXPECT_EQ(ps.macro_entity(ps.singular_vertex(e)), e);
    EXPECT_EQ(ps.vertex_exterior(ps.singular_vertex(e)), m.edge_exterior(e));
  }
  for (int k = 0; k < m.num_triangles(); ++k) {
    EXPECT_EQ(ps.macro_entity(ps.incenter_vertex(k)), k);
    EXPECT_FALSE(ps.vertex_exterior(ps.incenter_vertex(k)));
  }
}
