#include "psflow/ps_split.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psflow/error.hpp"

namespace psflow {

namespace {

// Split geometry is computed in extended precision and rounded once, so points
// that are exact in binary (edge midpoints of dyadic meshes) come out exact.
struct ExtPoint {
  long double x = 0.0L, y = 0.0L;
};

ExtPoint extend(Point2 p) { return {p.x, p.y}; }
long double ext_distance(ExtPoint a, ExtPoint b) { return std::hypot(b.x - a.x, b.y - a.y); }
long double ext_cross(ExtPoint o, ExtPoint a, ExtPoint b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

ExtPoint ext_incenter(Point2 a, Point2 b, Point2 c) {
  const ExtPoint pa = extend(a), pb = extend(b), pc = extend(c);
  const long double la = ext_distance(pb, pc);
  const long double lb = ext_distance(pc, pa);
  const long double lc = ext_distance(pa, pb);
  const long double perimeter = la + lb + lc;
  if (!(std::abs(ext_cross(pa, pb, pc)) > 1e-14L * perimeter * perimeter)) {
    throw Error(ErrorCode::kDegenerate, "incenter of a degenerate triangle");
  }
  return {(la * pa.x + lb * pb.x + lc * pc.x) / perimeter, (la * pa.y + lb * pb.y + lc * pc.y) / perimeter};
}

Point2 round_point(ExtPoint p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

}  // namespace

Point2 incenter(Point2 a, Point2 b, Point2 c) { return round_point(ext_incenter(a, b, c)); }

PSMesh::PSMesh(MacroMesh macro) : macro_(std::move(macro)) {
  const int nv = macro_.num_vertices();
  const int ne = macro_.num_edges();
  const int nt = macro_.num_triangles();

  vertices_ = macro_.vertices();
  vertices_.resize(static_cast<std::size_t>(nv + ne + nt));

  std::vector<ExtPoint> centers(static_cast<std::size_t>(nt));
  for (int k = 0; k < nt; ++k) {
    const auto p = macro_.triangle_points(k);
    centers[k] = ext_incenter(p[0], p[1], p[2]);
    vertices_[incenter_vertex(k)] = round_point(centers[k]);
  }

  for (int e = 0; e < ne; ++e) {
    const MacroEdge& edge = macro_.edges()[e];
    const ExtPoint a = extend(macro_.vertex(edge.vertices[0]));
    const ExtPoint b = extend(macro_.vertex(edge.vertices[1]));
    long double t = 0.5L;
    if (!edge.exterior()) {
      // Intersect the incenter segment with the edge, parameterized along the edge.
      const ExtPoint c0 = centers[edge.triangles[0]];
      const ExtPoint c1 = centers[edge.triangles[1]];
      const ExtPoint d{c1.x - c0.x, c1.y - c0.y};
      const ExtPoint origin{};
      t = ext_cross(origin, {c0.x - a.x, c0.y - a.y}, d) / ext_cross(origin, {b.x - a.x, b.y - a.y}, d);
      if (!(t > 1e-12L && t < 1.0L - 1e-12L)) {
        throw Error(ErrorCode::kGeometry, "incenter segment misses the open edge " + std::to_string(e));
      }
    }
    vertices_[singular_vertex(e)] = round_point({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }

  local_points_.resize(static_cast<std::size_t>(nt));
  subtriangles_.reserve(static_cast<std::size_t>(kSubtrianglesPerMacro * nt));
  vertex_subtriangles_.assign(vertices_.size(), {});
  for (int k = 0; k < nt; ++k) {
    const auto& t = macro_.triangles()[k];
    const auto& te = macro_.triangle_edges(k);
    auto& lp = local_points_[k];
    for (int i = 0; i < 3; ++i) {
      lp[i] = t[i];
      lp[edge_point(i)] = singular_vertex(te[i]);
    }
    lp[kCenter] = incenter_vertex(k);
    for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
      const auto local = local_subtriangle(i);
      SubTriangle st{{lp[local[0]], lp[local[1]], lp[local[2]]}, k};
      for (int v : st.vertices) vertex_subtriangles_[v].push_back(static_cast<int>(subtriangles_.size()));
      subtriangles_.push_back(st);
    }
  }
}

SplitVertexKind PSMesh::kind(int v) const {
  if (v < macro_.num_vertices()) return SplitVertexKind::kMacroVertex;
  if (v < macro_.num_vertices() + macro_.num_edges()) return SplitVertexKind::kSingular;
  return SplitVertexKind::kIncenter;
}

int PSMesh::macro_entity(int v) const {
  switch (kind(v)) {
    case SplitVertexKind::kMacroVertex: return v;
    case SplitVertexKind::kSingular: return v - macro_.num_vertices();
    case SplitVertexKind::kIncenter: return v - macro_.num_vertices() - macro_.num_edges();
  }
  return -1;
}

bool PSMesh::vertex_exterior(int v) const {
  switch (kind(v)) {
    case SplitVertexKind::kMacroVertex: return macro_.vertex_exterior(v);
    case SplitVertexKind::kSingular: return macro_.edge_exterior(macro_entity(v));
    case SplitVertexKind::kIncenter: return false;
  }
  return false;
}

std::array<Point2, kLocalPoints> PSMesh::local_coordinates(int k) const {
  std::array<Point2, kLocalPoints> out;
  for (int i = 0; i < kLocalPoints; ++i) out[i] = vertices_[local_points_[k][i]];
  return out;
}

std::array<Point2, 3> PSMesh::subtriangle_points(int s) const {
  const auto& v = subtriangles_[s].vertices;
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double PSMesh::subtriangle_area(int s) const {
  const auto p = subtriangle_points(s);
  return triangle_area(p[0], p[1], p[2]);
}

double PSMesh::max_subtriangle_diameter() const {
  double h = 0.0;
  for (int s = 0; s < num_subtriangles(); ++s) {
    const auto p = subtriangle_points(s);
    h = std::max(h, triangle_diameter(p[0], p[1], p[2]));
  }
  return h;
}

PSMesh split(const MacroMesh& mesh) { return PSMesh(mesh); }

bool lies_on_two_lines(Point2 center, std::span<const Point2> neighbors, double rel_tol) {
  std::vector<Vec2> lines;
  for (const Point2& q : neighbors) {
    const Vec2 d = q - center;
    const bool known = std::any_of(lines.begin(), lines.end(), [&](const Vec2& l) {
      return std::abs(cross(l, d)) <= rel_tol * norm(l) * norm(d);
    });
    if (!known) lines.push_back(d);
  }
  return lines.size() == 2;
}

std::vector<int> split_neighbors(const PSMesh& ps, int z) {
  std::vector<int> out;
  for (int s : ps.vertex_subtriangles(z)) {
    for (int v : ps.subtriangles()[s].vertices) {
      if (v != z) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool verify_singular(const PSMesh& ps, int z) {
  std::vector<Point2> pts;
  for (int v : split_neighbors(ps, z)) pts.push_back(ps.vertex(v));
  return lies_on_two_lines(ps.vertex(z), pts);
}

std::array<Point2, kLocalPoints> ReferenceGeometry::local_coordinates() const {
  return {Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{0.0, 1.0}, singular[1], singular[2], singular[0], center};
}

ReferenceGeometry reference_geometry(const PSMesh& ps, int k) {
  const auto p = ps.local_coordinates(k);
  ReferenceGeometry g;
  g.jacobian = Mat2::columns(p[kVertex1] - p[kVertex0], p[kVertex2] - p[kVertex0]);
  g.offset = p[kVertex0];
  g.det = g.jacobian.det();
  g.center = g.unmap(p[kCenter]);
  g.singular[0] = g.unmap(p[kEdge20]);
  g.singular[1] = g.unmap(p[kEdge01]);
  g.singular[2] = g.unmap(p[kEdge12]);
  return g;
}

}  // namespace psflow
