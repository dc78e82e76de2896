#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "psflow/geometry.hpp"

namespace psflow {

inline constexpr int kNoTriangle = -1;

struct MacroEdge {
  std::array<int, 2> vertices{};  // sorted, vertices[0] < vertices[1]
  std::array<int, 2> triangles{kNoTriangle, kNoTriangle};

  bool exterior() const { return triangles[1] == kNoTriangle; }
};

/// Conforming triangulation of a simply connected polygon.
///
/// Construction validates the input, re-orients clockwise triangles, and rotates
/// each triangle so that its smallest global vertex index comes first. Triangle
/// local edge i joins local vertices i and i+1 (mod 3).
class MacroMesh {
 public:
  MacroMesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<MacroEdge>& edges() const { return edges_; }
  const std::array<int, 3>& triangle_edges(int k) const { return triangle_edges_[k]; }
  const std::vector<int>& vertex_triangles(int v) const { return vertex_triangles_[v]; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_interior_vertices() const { return num_interior_vertices_; }
  int num_exterior_vertices() const { return num_vertices() - num_interior_vertices_; }
  int num_interior_edges() const { return num_interior_edges_; }
  int num_exterior_edges() const { return num_edges() - num_interior_edges_; }

  bool vertex_exterior(int v) const { return vertex_exterior_[v]; }
  bool edge_exterior(int e) const { return edges_[e].exterior(); }

  Point2 vertex(int v) const { return vertices_[v]; }
  std::array<Point2, 3> triangle_points(int k) const;
  double triangle_area(int k) const;

  /// Edge index joining a and b, or -1.
  int find_edge(int a, int b) const;

  /// Exterior vertices in counter-clockwise order (domain on the left), starting
  /// at the smallest exterior index. Boundary edge k joins boundary vertex k to k+1.
  const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }

  /// Largest macro-triangle diameter.
  double max_diameter() const;

 private:
  void orient_and_validate_triangles();
  void build_edges();
  void build_boundary_cycle();

  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<MacroEdge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::vector<int>> vertex_triangles_;
  std::vector<bool> vertex_exterior_;
  std::vector<int> boundary_vertices_;
  std::vector<int> boundary_edges_;
  int num_interior_vertices_ = 0;
  int num_interior_edges_ = 0;
};

/// Unit square split into n x n cells, each cut along its lower-left to
/// upper-right diagonal. Vertex (i, j) has index j * (n + 1) + i.
MacroMesh generate_structured(int n);

/// Text format: "V T", then V lines "x y", then T lines "i j k" (0-based).
/// Lines starting with '#' are comments.
MacroMesh parse_mesh(std::istream& in);
MacroMesh load_mesh(const std::filesystem::path& path);
void write_mesh(const MacroMesh& mesh, std::ostream& out);

struct VertexStar {
  int center = 0;
  /// Counter-clockwise around the center; triangles[j] and triangles[j+1] share edges[j+1].
  std::vector<int> triangles;
  /// Triangle j is bounded by edges[j] and edges[(j+1) % edges.size()]. An open fan
  /// has one more edge than triangles and starts at a boundary edge.
  std::vector<int> edges;
  bool cyclic = false;
};

VertexStar vertex_star(const MacroMesh& mesh, int z);

}  // namespace psflow
