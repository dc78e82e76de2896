#pragma once

#include <array>
#include <span>
#include <vector>

#include "psflow/geometry.hpp"
#include "psflow/macro_mesh.hpp"

namespace psflow {

/// Local point ids of the seven split vertices of one macro-triangle.
/// kEdgeAB is the singular vertex on the edge joining local vertices A and B.
enum LocalPoint : int { kVertex0 = 0, kVertex1, kVertex2, kEdge01, kEdge12, kEdge20, kCenter };
inline constexpr int kLocalPoints = 7;
inline constexpr int kSubtrianglesPerMacro = 6;

/// Subtriangle i of a macro-triangle spans (center, cycle[i], cycle[i+1]).
inline constexpr std::array<int, 6> kBoundaryCycle = {kVertex0, kEdge01, kVertex1, kEdge12, kVertex2, kEdge20};

/// Singular point of the macro edge starting at local vertex i.
inline constexpr int edge_point(int i) { return kEdge01 + i; }

enum class SplitVertexKind { kMacroVertex, kSingular, kIncenter };

struct SubTriangle {
  std::array<int, 3> vertices{};  // split-vertex indices, counter-clockwise
  int parent = 0;                 // macro-triangle
};

/// Powell-Sabin 6-split of a macro-mesh.
///
/// Split vertices are numbered: macro vertices first, then one singular vertex per
/// macro edge (same order as the edges), then one incenter per macro-triangle.
class PSMesh {
 public:
  explicit PSMesh(MacroMesh macro);

  const MacroMesh& macro() const { return macro_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_subtriangles() const { return static_cast<int>(subtriangles_.size()); }
  const std::vector<Point2>& vertices() const { return vertices_; }
  Point2 vertex(int v) const { return vertices_[v]; }
  const std::vector<SubTriangle>& subtriangles() const { return subtriangles_; }

  int singular_vertex(int macro_edge) const { return macro_.num_vertices() + macro_edge; }
  int incenter_vertex(int macro_triangle) const {
    return macro_.num_vertices() + macro_.num_edges() + macro_triangle;
  }
  SplitVertexKind kind(int v) const;
  /// Macro vertex, edge or triangle that produced split vertex v.
  int macro_entity(int v) const;
  bool vertex_exterior(int v) const;

  int num_singular_interior() const { return macro_.num_interior_edges(); }
  int num_singular_exterior() const { return macro_.num_exterior_edges(); }

  /// Split-vertex indices of the seven local points of macro-triangle k.
  const std::array<int, kLocalPoints>& local_points(int k) const { return local_points_[k]; }
  std::array<Point2, kLocalPoints> local_coordinates(int k) const;

  int subtriangle_index(int k, int i) const { return kSubtrianglesPerMacro * k + i; }
  const std::vector<int>& vertex_subtriangles(int v) const { return vertex_subtriangles_[v]; }

  std::array<Point2, 3> subtriangle_points(int s) const;
  double subtriangle_area(int s) const;
  double max_subtriangle_diameter() const;

 private:
  MacroMesh macro_;
  std::vector<Point2> vertices_;
  std::vector<SubTriangle> subtriangles_;
  std::vector<std::array<int, kLocalPoints>> local_points_;
  std::vector<std::vector<int>> vertex_subtriangles_;
};

/// Local subtriangle i as local point ids.
inline constexpr std::array<int, 3> local_subtriangle(int i) {
  return {kCenter, kBoundaryCycle[i], kBoundaryCycle[(i + 1) % 6]};
}

Point2 incenter(Point2 a, Point2 b, Point2 c);

PSMesh split(const MacroMesh& mesh);

/// True iff the segments from center to each neighbor lie on exactly two lines.
bool lies_on_two_lines(Point2 center, std::span<const Point2> neighbors, double rel_tol = 1e-12);

/// Singular-vertex test on the split mesh.
bool verify_singular(const PSMesh& ps, int z);

/// Split vertices adjacent to z through subtriangle edges.
std::vector<int> split_neighbors(const PSMesh& ps, int z);

/// Affine map F(p) = J p + offset from the reference triangle (0,0), (1,0), (0,1)
/// onto macro-triangle k, and the preimages of its incenter and singular vertices.
struct ReferenceGeometry {
  Mat2 jacobian;
  Point2 offset;
  double det = 0.0;
  Point2 center;
  /// singular[i] lies on reference edge i+1, the edge between reference vertices
  /// i and i-1 (mod 3): singular[0] on x=0, singular[1] on y=0, singular[2] on x+y=1.
  std::array<Point2, 3> singular;

  Point2 map(Point2 ref) const { return jacobian * ref + offset; }
  Point2 unmap(Point2 phys) const { return jacobian.inverse() * (phys - offset); }
  /// The seven reference points in LocalPoint order.
  std::array<Point2, kLocalPoints> local_coordinates() const;
};

ReferenceGeometry reference_geometry(const PSMesh& ps, int k);

}  // namespace psflow
