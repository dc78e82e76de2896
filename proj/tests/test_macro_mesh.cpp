#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "psflow/error.hpp"
#include "psflow/macro_mesh.hpp"

using namespace psflow;

namespace {

ErrorCode parse_error_code(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_mesh(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::kInvalidArgument;
}

void expect_valid_topology(const MacroMesh& m) {
  EXPECT_EQ(m.num_edges() - m.num_triangles(), m.num_vertices() - 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    const MacroEdge& edge = m.edges()[e];
    EXPECT_LT(edge.vertices[0], edge.vertices[1]);
    EXPECT_EQ(edge.exterior(), edge.triangles[1] == kNoTriangle);
  }
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto p = m.triangle_points(k);
    EXPECT_GT(signed_area2(p[0], p[1], p[2]), 0.0);
    const auto& t = m.triangles()[k];
    EXPECT_EQ(t[0], *std::min_element(t.begin(), t.end()));
  }
  // One boundary cycle through every exterior vertex, domain on the left.
  const auto& bv = m.boundary_vertices();
  const auto& be = m.boundary_edges();
  ASSERT_EQ(static_cast<int>(bv.size()), m.num_exterior_vertices());
  ASSERT_EQ(bv.size(), be.size());
  std::set<int> seen(bv.begin(), bv.end());
  EXPECT_EQ(seen.size(), bv.size());
  double twice_area = 0.0;
  for (std::size_t i = 0; i < bv.size(); ++i) {
    const int a = bv[i], b = bv[(i + 1) % bv.size()];
    EXPECT_EQ(m.find_edge(a, b), be[i]);
    EXPECT_TRUE(m.edge_exterior(be[i]));
    twice_area += cross(m.vertex(a), m.vertex(b));
  }
  double total = 0.0;
  for (int k = 0; k < m.num_triangles(); ++k) total += m.triangle_area(k);
  EXPECT_NEAR(0.5 * twice_area, total, 1e-12);
}

}  // namespace

TEST(StructuredMesh, SmallestCaseCounts) {
  const MacroMesh m = generate_structured(1);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_triangles(), 2);
  EXPECT_EQ(m.num_edges(), 5);
  EXPECT_EQ(m.num_interior_edges(), 1);
  EXPECT_EQ(m.num_exterior_edges(), 4);
  EXPECT_EQ(m.num_interior_vertices(), 0);
}

TEST(StructuredMesh, TwoByTwoCountsByEnumeration) {
  const MacroMesh m = generate_structured(2);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_EQ(m.num_triangles(), 8);
  // 6 horizontal + 6 vertical grid edges and 4 diagonals.
  EXPECT_EQ(m.num_edges(), 16);
  EXPECT_EQ(m.num_interior_edges(), 8);
  EXPECT_EQ(m.num_exterior_edges(), 8);
  EXPECT_EQ(m.num_interior_vertices(), 1);
  EXPECT_FALSE(m.vertex_exterior(4));
}

TEST(StructuredMesh, TopologyInvariantsForManySizes) {
  for (int n = 1; n <= 9; ++n) {
    SCOPED_TRACE(n);
    const MacroMesh m = generate_structured(n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(m.num_interior_vertices(), (n - 1) * (n - 1));
    EXPECT_NEAR(m.max_diameter(), std::sqrt(2.0) / n, 1e-15);
    expect_valid_topology(m);
  }
}

TEST(StructuredMesh, RejectsNonPositiveSize) {
  EXPECT_THROW(generate_structured(0), Error);
  EXPECT_THROW(generate_structured(-3), Error);
}

TEST(MeshIo, RoundTripMatchesGenerator) {
  const MacroMesh a = generate_structured(3);
  std::stringstream buf;
  write_mesh(a, buf);
  const MacroMesh b = parse_mesh(buf);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  EXPECT_EQ(a.triangles(), b.triangles());
  for (int v = 0; v < a.num_vertices(); ++v) EXPECT_EQ(a.vertex(v), b.vertex(v));
  ASSERT_EQ(a.num_edges(), b.num_edges());
  for (int e = 0; e < a.num_edges(); ++e) EXPECT_EQ(a.edges()[e].vertices, b.edges()[e].vertices);
}

TEST(MeshIo, TextFileOfUnitSquareEqualsGenerator) {
  std::istringstream in(
      "# unit square\n4 2\n0 0\n1 0\n0 1\n1 1\n0 1 3\n0 3 2\n");
  const MacroMesh m = parse_mesh(in);
  const MacroMesh g = generate_structured(1);
  EXPECT_EQ(m.triangles(), g.triangles());
  EXPECT_EQ(m.num_interior_edges(), g.num_interior_edges());
}

TEST(MeshIo, ClockwiseTriangleIsFlipped) {
  std::istringstream in("4 2\n0 0\n1 0\n0 1\n1 1\n0 3 1\n0 3 2\n");
  const MacroMesh m = parse_mesh(in);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto p = m.triangle_points(k);
    EXPECT_GT(signed_area2(p[0], p[1], p[2]), 0.0);
  }
  EXPECT_EQ(m.triangles()[0], (std::array<int, 3>{0, 1, 3}));
}

TEST(MeshIo, EdgeWithThreeTrianglesIsNonConforming) {
  EXPECT_EQ(parse_error_code("5 3\n0 0\n1 0\n0.5 1\n0.5 -1\n0.6 2\n0 1 2\n0 3 1\n0 1 4\n"),
            ErrorCode::kNonConforming);
}

TEST(MeshIo, MalformedInputIsReported) {
  EXPECT_EQ(parse_error_code("3 1\n0 0\n1 0\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code("3 1\n0 0\n1 0\n0 1\n0 1 7\n"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_error_code("3 1\n0 0\n1 0\n2 0\n0 1 2\n"), ErrorCode::kDegenerate);
}

TEST(MeshIo, MissingFileIsIoError) {
  try {
    load_mesh("/nonexistent/mesh.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(VertexStar, CornerOnDiagonalHasTwoTrianglesSharingIt) {
  const MacroMesh m = generate_structured(1);
  const VertexStar s = vertex_star(m, 0);
  EXPECT_FALSE(s.cyclic);
  ASSERT_EQ(s.triangles.size(), 2u);
  ASSERT_EQ(s.edges.size(), 3u);
  EXPECT_EQ(s.edges[1], m.find_edge(0, 3));
}

TEST(VertexStar, CenterOfTwoByTwoIsCyclicCounterClockwise) {
  const MacroMesh m = generate_structured(2);
  const VertexStar s = vertex_star(m, 4);
  EXPECT_TRUE(s.cyclic);
  ASSERT_EQ(s.triangles.size(), 6u);
  ASSERT_EQ(s.edges.size(), 6u);
  const Point2 z = m.vertex(4);
  for (std::size_t j = 0; j < s.triangles.size(); ++j) {
    const std::size_t next = (j + 1) % s.triangles.size();
    const auto& a = m.triangles()[s.triangles[j]];
    const auto& b = m.triangles()[s.triangles[next]];
    // The shared edge of consecutive triangles is edges[j+1].
    const auto& ev = m.edges()[s.edges[next]].vertices;
    for (int v : ev) {
      EXPECT_NE(std::find(a.begin(), a.end(), v), a.end());
      EXPECT_NE(std::find(b.begin(), b.end(), v), b.end());
    }
    // Consecutive star edges turn counter-clockwise around the center.
    const int wa = ev[0] == 4 ? ev[1] : ev[0];
    const auto& pv = m.edges()[s.edges[j]].vertices;
    const int wp = pv[0] == 4 ? pv[1] : pv[0];
    EXPECT_GT(cross(m.vertex(wp) - z, m.vertex(wa) - z), 0.0);
  }
}

TEST(VertexStar, InteriorStarsHaveEqualTriangleAndEdgeCounts) {
  const MacroMesh m = generate_structured(5);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const VertexStar s = vertex_star(m, v);
    EXPECT_EQ(s.cyclic, !m.vertex_exterior(v));
    if (s.cyclic) {
      EXPECT_EQ(s.triangles.size(), s.edges.size());
    } else {
      EXPECT_EQ(s.edges.size(), s.triangles.size() + 1);
      EXPECT_TRUE(m.edge_exterior(s.edges.front()));
      EXPECT_TRUE(m.edge_exterior(s.edges.back()));
    }
  }
}

TEST(UnstructuredMesh, HexagonFanIsValid) {
  std::vector<Point2> v = {{0, 0}};
  std::vector<std::array<int, 3>> t;
  for (int i = 0; i < 6; ++i) v.push_back({std::cos(i * M_PI / 3), std::sin(i * M_PI / 3)});
  for (int i = 0; i < 6; ++i) t.push_back({0, 1 + i, 1 + (i + 1) % 6});
  const MacroMesh m(v, t);
  EXPECT_EQ(m.num_interior_vertices(), 1);
  EXPECT_EQ(m.num_interior_edges(), 6);
  expect_valid_topology(m);
}
