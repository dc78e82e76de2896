#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "psflow/geometry.hpp"
#include "psflow/ps_split.hpp"
#include "psflow/velocity_basis.hpp"

namespace psflow {

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// False when a and b were already joined.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

/// Spanning tree of the graph on {z0} and the interior macro vertices, using
/// macro edges with both endpoints in that set.
struct SpanningTree {
  int root = 0;
  std::vector<int> nodes;        // root first, then interior vertices by index
  std::vector<int> edges;        // tree edges, ordered by breadth-first depth from the root
  std::vector<int> parent;       // per macro vertex, -1 for the root and non-nodes
  std::vector<int> parent_edge;  // per macro vertex, -1 for the root and non-nodes
  std::vector<int> depth;        // per macro vertex, -1 for non-nodes
};

/// Kruskal with edge index as weight.
SpanningTree kruskal_tree(const MacroMesh& mesh, int z0);

/// Unit tangent of a macro edge, from its lower to its higher vertex index.
Vec2 edge_tangent(const MacroMesh& mesh, int edge);
/// The tangent rotated by +90 degrees.
Vec2 edge_normal(const MacroMesh& mesh, int edge);

enum class PressureFunctionKind { kSingularNormal, kSingularTangent, kCenterX, kCenterY };

/// Nodal hat at one split vertex times a fixed direction.
struct PressureFunction {
  PressureFunctionKind kind = PressureFunctionKind::kCenterX;
  int entity = 0;        // macro edge (singular kinds) or macro-triangle (center kinds)
  int split_vertex = 0;  // center of the hat
  Vec2 direction;
};

/// Velocity functions whose divergences span the discrete pressure space.
struct PressureBasis {
  std::vector<PressureFunction> functions;
  /// Interior macro edges relabeled so the tree edges come first.
  std::vector<int> edge_order;
  int num_tree_edges = 0;

  int size() const { return static_cast<int>(functions.size()); }
};

PressureBasis build_pressure_basis(const PSMesh& ps, const SpanningTree& tree);

/// Normal-directed singular functions on tree edges; these are dropped from the basis.
std::vector<PressureFunction> excluded_pressure_functions(const PSMesh& ps, const SpanningTree& tree);

/// Nonzero per-subtriangle divergences of one function, as (subtriangle, value).
std::vector<std::pair<int, double>> divergence_entries(const PSMesh& ps, const PressureFunction& f);

PressureField divergence_field(const PSMesh& ps, const PressureFunction& f);

/// The function as a nodal vector field.
NodalField as_nodal_field(const PSMesh& ps, const PressureFunction& f);

/// Pressure field sum_i coefficients[i] * div(functions[i]).
PressureField pressure_from_coefficients(const PSMesh& ps, const PressureBasis& basis,
                                         std::span<const double> coefficients);

}  // namespace psflow
