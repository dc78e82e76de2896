#include "psflow/pressure_basis.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "psflow/error.hpp"

namespace psflow {

SpanningTree kruskal_tree(const MacroMesh& mesh, int z0) {
  if (z0 < 0 || z0 >= mesh.num_vertices() || !mesh.vertex_exterior(z0)) {
    throw Error(ErrorCode::kInvalidArgument, "tree root must be an exterior macro vertex");
  }
  const int nv = mesh.num_vertices();
  std::vector<bool> in_graph(static_cast<std::size_t>(nv), false);
  SpanningTree tree;
  tree.root = z0;
  tree.nodes.push_back(z0);
  in_graph[z0] = true;
  for (int v = 0; v < nv; ++v) {
    if (!mesh.vertex_exterior(v)) {
      in_graph[v] = true;
      tree.nodes.push_back(v);
    }
  }

  DisjointSet components(nv);
  std::vector<int> tree_edges;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MacroEdge& edge = mesh.edges()[e];
    if (edge.exterior() || !in_graph[edge.vertices[0]] || !in_graph[edge.vertices[1]]) continue;
    if (components.unite(edge.vertices[0], edge.vertices[1])) tree_edges.push_back(e);
  }
  if (static_cast<int>(tree_edges.size()) != mesh.num_interior_vertices()) {
    std::map<int, std::vector<int>> groups;
    for (int v : tree.nodes) groups[components.find(v)].push_back(v);
    std::ostringstream os;
    os << "spanning-tree graph is disconnected; components:";
    for (const auto& [root, members] : groups) {
      os << " {";
      for (std::size_t i = 0; i < members.size(); ++i) os << (i ? " " : "") << members[i];
      os << "}";
    }
    throw Error(ErrorCode::kDisconnectedGraph, os.str());
  }

  std::vector<std::vector<std::pair<int, int>>> adjacency(static_cast<std::size_t>(nv));
  for (int e : tree_edges) {
    const auto& ev = mesh.edges()[e].vertices;
    adjacency[ev[0]].push_back({ev[1], e});
    adjacency[ev[1]].push_back({ev[0], e});
  }
  tree.parent.assign(static_cast<std::size_t>(nv), -1);
  tree.parent_edge.assign(static_cast<std::size_t>(nv), -1);
  tree.depth.assign(static_cast<std::size_t>(nv), -1);
  tree.depth[z0] = 0;
  std::queue<int> frontier;
  frontier.push(z0);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (auto [w, e] : adjacency[v]) {
      if (tree.depth[w] >= 0) continue;
      tree.depth[w] = tree.depth[v] + 1;
      tree.parent[w] = v;
      tree.parent_edge[w] = e;
      tree.edges.push_back(e);
      frontier.push(w);
    }
  }
  return tree;
}

Vec2 edge_tangent(const MacroMesh& mesh, int edge) {
  const auto& ev = mesh.edges()[edge].vertices;
  const Vec2 d = mesh.vertex(ev[1]) - mesh.vertex(ev[0]);
  return d / norm(d);
}

Vec2 edge_normal(const MacroMesh& mesh, int edge) { return rot90(edge_tangent(mesh, edge)); }

namespace {

PressureFunction singular_function(const PSMesh& ps, int edge, PressureFunctionKind kind) {
  const Vec2 dir = kind == PressureFunctionKind::kSingularNormal ? edge_normal(ps.macro(), edge)
                                                                 : edge_tangent(ps.macro(), edge);
  return {kind, edge, ps.singular_vertex(edge), dir};
}

}  // namespace

PressureBasis build_pressure_basis(const PSMesh& ps, const SpanningTree& tree) {
  const MacroMesh& mesh = ps.macro();
  PressureBasis basis;
  std::vector<bool> on_tree(static_cast<std::size_t>(mesh.num_edges()), false);
  for (int e : tree.edges) on_tree[e] = true;
  basis.edge_order = tree.edges;
  basis.num_tree_edges = static_cast<int>(tree.edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edge_exterior(e) && !on_tree[e]) basis.edge_order.push_back(e);
  }

  for (std::size_t j = tree.edges.size(); j < basis.edge_order.size(); ++j) {
    basis.functions.push_back(singular_function(ps, basis.edge_order[j], PressureFunctionKind::kSingularNormal));
  }
  for (int e : basis.edge_order) {
    basis.functions.push_back(singular_function(ps, e, PressureFunctionKind::kSingularTangent));
  }
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    basis.functions.push_back({PressureFunctionKind::kCenterX, k, ps.incenter_vertex(k), {1.0, 0.0}});
  }
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    basis.functions.push_back({PressureFunctionKind::kCenterY, k, ps.incenter_vertex(k), {0.0, 1.0}});
  }
  return basis;
}

std::vector<PressureFunction> excluded_pressure_functions(const PSMesh& ps, const SpanningTree& tree) {
  std::vector<PressureFunction> out;
  for (int e : tree.edges) out.push_back(singular_function(ps, e, PressureFunctionKind::kSingularNormal));
  return out;
}

std::vector<std::pair<int, double>> divergence_entries(const PSMesh& ps, const PressureFunction& f) {
  std::vector<std::pair<int, double>> out;
  for (int s : ps.vertex_subtriangles(f.split_vertex)) {
    const auto& idx = ps.subtriangles()[s].vertices;
    const auto p = ps.subtriangle_points(s);
    const auto grads = barycentric_gradients(p[0], p[1], p[2]);
    const int m = static_cast<int>(std::find(idx.begin(), idx.end(), f.split_vertex) - idx.begin());
    out.push_back({s, dot(grads[m], f.direction)});
  }
  return out;
}

PressureField divergence_field(const PSMesh& ps, const PressureFunction& f) {
  PressureField q(static_cast<std::size_t>(ps.num_subtriangles()), 0.0);
  for (auto [s, value] : divergence_entries(ps, f)) q[s] = value;
  return q;
}

NodalField as_nodal_field(const PSMesh& ps, const PressureFunction& f) {
  NodalField v(static_cast<std::size_t>(ps.num_vertices()), Vec2{0.0, 0.0});
  v[f.split_vertex] = f.direction;
  return v;
}

PressureField pressure_from_coefficients(const PSMesh& ps, const PressureBasis& basis,
                                         std::span<const double> coefficients) {
  PressureField q(static_cast<std::size_t>(ps.num_subtriangles()), 0.0);
  for (int i = 0; i < basis.size(); ++i) {
    for (auto [s, value] : divergence_entries(ps, basis.functions[i])) q[s] += coefficients[i] * value;
  }
  return q;
}

}  // namespace psflow
