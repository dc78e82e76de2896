#include "psflow/velocity_basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "psflow/error.hpp"
#include "psflow/quadrature.hpp"

namespace psflow {

double div_integral(const std::array<Point2, 3>& points, const std::array<Vec2, 3>& values) {
  // Extended precision: coordinate differences of O(1) points lose bits on small triangles.
  long double sum = 0.0L;
  for (int m = 0; m < 3; ++m) {
    // |e_m| n_m = -rot90(p_{m+2} - p_{m+1}) for a counter-clockwise triangle.
    const Point2 p = points[(m + 2) % 3];
    const Point2 q = points[(m + 1) % 3];
    const long double dx = static_cast<long double>(p.x) - q.x;
    const long double dy = static_cast<long double>(p.y) - q.y;
    sum += -dy * values[m].x + dx * values[m].y;
  }
  return static_cast<double>(sum / 2);
}

double segment_flux(Point2 p, Point2 s, Point2 q, Vec2 vp, Vec2 vs, Vec2 vq, Vec2 normal) {
  const double l0 = distance(p, s);
  const double l1 = distance(s, q);
  return 0.5 * l0 * dot(vp + vs, normal) + 0.5 * l1 * dot(vs + vq, normal);
}

namespace {

using Extended = long double;
using ExtendedSolution = Eigen::Matrix<Extended, 8, 3>;
constexpr std::array<int, 4> free_points(int j) { return {j, edge_point(j), edge_point((j + 2) % 3), kCenter}; }

// Nodal values of the free points for the three functions, solved in extended
// precision so that the rounded tables are divergence free to working accuracy.
ExtendedSolution solve_vertex_functions(const std::array<Point2, kLocalPoints>& points, int j) {
  using Vec = Eigen::Matrix<Extended, 2, 1>;
  auto at = [&](int p) { return Vec(points[p].x, points[p].y); };
  auto rot = [](const Vec& v) { return Vec(-v.y(), v.x()); };

  const int a = (j + 1) % 3;
  const int b = (j + 2) % 3;
  const auto free = free_points(j);
  std::array<int, kLocalPoints> slot;
  slot.fill(-1);
  for (int s = 0; s < 4; ++s) slot[free[s]] = s;

  Eigen::Matrix<Extended, 8, 8> system = Eigen::Matrix<Extended, 8, 8>::Zero();
  ExtendedSolution rhs = ExtendedSolution::Zero();
  system(0, 0) = 1;
  system(1, 1) = 1;
  rhs(0, 0) = 1;
  rhs(1, 1) = 1;

  // Normal moment on the edge j -> b, normal rotated counter-clockwise from the edge.
  {
    const Vec z = at(j), s = at(edge_point(b)), w = at(b);
    const Extended l0 = (s - z).norm();
    const Extended l1 = (w - s).norm();
    const Vec n = rot(w - z) / (w - z).norm();
    const Extended scale = 1 / (l0 + l1);
    const Vec cz = n * (l0 * scale / 2);
    const Vec cs = n * ((l0 + l1) * scale / 2);
    system(2, 2 * slot[j]) = cz.x();
    system(2, 2 * slot[j] + 1) = cz.y();
    system(2, 2 * slot[edge_point(b)]) = cs.x();
    system(2, 2 * slot[edge_point(b)] + 1) = cs.y();
    rhs(2, 2) = scale;
  }

  // Zero divergence on five subtriangles; the sixth follows.
  const int skipped = 2 * a;
  int row = 3;
  for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
    if (i == skipped) continue;
    const auto local = local_subtriangle(i);
    const std::array<Vec, 3> p = {at(local[0]), at(local[1]), at(local[2])};
    const Extended scale = 1 / std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
    for (int m = 0; m < 3; ++m) {
      const int s = slot[local[m]];
      if (s < 0) continue;
      const Vec c = rot(p[(m + 2) % 3] - p[(m + 1) % 3]) * (scale / 2);
      system(row, 2 * s) = c.x();
      system(row, 2 * s + 1) = c.y();
    }
    ++row;
  }

  const Eigen::FullPivLU<Eigen::Matrix<Extended, 8, 8>> lu(system);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularSystem, "local basis constraint system is singular");
  }
  return lu.solve(rhs);
}

}  // namespace

std::array<LocalTable, 3> vertex_functions(const std::array<Point2, kLocalPoints>& points, int j) {
  const ExtendedSolution x = solve_vertex_functions(points, j);
  const auto free = free_points(j);
  std::array<LocalTable, 3> out{};
  for (int i = 0; i < 3; ++i) {
    for (auto& v : out[i]) v = {0.0, 0.0};
    for (int s = 0; s < 4; ++s) {
      out[i][free[s]] = {static_cast<double>(x(2 * s, i)), static_cast<double>(x(2 * s + 1, i))};
    }
  }
  return out;
}

std::array<LocalBasisFunction, 3> local_basis(const PSMesh& ps, int z) {
  const VertexStar star = vertex_star(ps.macro(), z);
  std::array<LocalBasisFunction, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i].center = z;
    out[i].kind = i;
    out[i].triangles = star.triangles;
  }
  for (int k : star.triangles) {
    const auto& t = ps.macro().triangles()[k];
    const int j = static_cast<int>(std::find(t.begin(), t.end(), z) - t.begin());
    const auto tables = vertex_functions(ps.local_coordinates(k), j);
    for (int i = 0; i < 3; ++i) out[i].tables.push_back(tables[i]);
  }
  return out;
}

std::array<LocalTable, 3> reference_basis(const ReferenceGeometry& geom, int j) {
  return vertex_functions(geom.local_coordinates(), j);
}

LocalTable piola_push(const ReferenceGeometry& geom, const LocalTable& reference_values) {
  LocalTable out;
  const double inv_det = 1.0 / std::abs(geom.det);
  for (int p = 0; p < kLocalPoints; ++p) out[p] = (geom.jacobian * reference_values[p]) * inv_det;
  return out;
}

std::array<LocalTable, 3> combine_reference(const ReferenceGeometry& geom, int j, std::array<Vec2, 2> center_values) {
  const auto ref = reference_basis(geom, j);
  const LocalTable pushed1 = piola_push(geom, ref[0]);
  const LocalTable pushed2 = piola_push(geom, ref[1]);
  const Mat2 inv = geom.jacobian.inverse();
  std::array<LocalTable, 3> out;
  for (int i = 0; i < 2; ++i) {
    const Vec2 ab = (inv * center_values[i]) * std::abs(geom.det);
    for (int p = 0; p < kLocalPoints; ++p) out[i][p] = ab.x * pushed1[p] + ab.y * pushed2[p];
  }
  out[2] = piola_push(geom, ref[2]);
  return out;
}

int default_z0(const MacroMesh& mesh) {
  int fallback = -1;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_exterior(v)) continue;
    if (fallback < 0) fallback = v;
    if (mesh.num_interior_vertices() == 0) return v;
    for (int k : mesh.vertex_triangles(v)) {
      for (int w : mesh.triangles()[k]) {
        if (!mesh.vertex_exterior(w)) return v;
      }
    }
  }
  return fallback;
}

VelocityBasis::VelocityBasis(const PSMesh& ps, int z0, BasisOptions options) : z0_(z0) {
  const MacroMesh& mesh = ps.macro();
  if (z0 < 0 || z0 >= mesh.num_vertices() || !mesh.vertex_exterior(z0)) {
    throw Error(ErrorCode::kInvalidArgument, "z0 must be an exterior macro vertex");
  }
  const int nv = mesh.num_vertices();
  dof_.assign(static_cast<std::size_t>(3 * nv), -1);
  interior_dof_.assign(static_cast<std::size_t>(3 * nv), -1);
  for (int v = 0; v < nv; ++v) {
    for (int kind = 0; kind < 3; ++kind) {
      if (v == z0 && kind == 2 && !options.keep_excluded) continue;
      dof_[3 * v + kind] = size();
      functions_.push_back({v, kind});
      if (!mesh.vertex_exterior(v)) {
        interior_dof_[3 * v + kind] = interior_size();
        interior_functions_.push_back({v, kind});
      }
    }
  }
  tables_.resize(static_cast<std::size_t>(mesh.num_triangles()));
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto points = ps.local_coordinates(k);
    for (int j = 0; j < 3; ++j) tables_[k][j] = vertex_functions(points, j);
  }
}

VelocityBasis global_basis(const PSMesh& ps, int z0, BasisOptions options) { return VelocityBasis(ps, z0, options); }

std::vector<LocalTable> expand_local(const PSMesh& ps, const VelocityBasis& /*basis*/,
                                     std::span<const BasisFunctionId> ids, std::span<const double> coefficients) {
  const MacroMesh& mesh = ps.macro();
  std::vector<double> by_id(static_cast<std::size_t>(3 * mesh.num_vertices()), 0.0);
  for (std::size_t f = 0; f < ids.size(); ++f) by_id[3 * ids[f].vertex + ids[f].kind] += coefficients[f];

  // Flux functions scale like 1/h and cancel in sums, so accumulate in extended
  // precision and round each nodal value once.
  std::vector<LocalTable> out(static_cast<std::size_t>(mesh.num_triangles()));
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    std::array<std::array<Extended, 2>, kLocalPoints> acc{};
    const auto& t = mesh.triangles()[k];
    const auto points = ps.local_coordinates(k);
    for (int j = 0; j < 3; ++j) {
      const std::array<Extended, 3> c = {by_id[3 * t[j]], by_id[3 * t[j] + 1], by_id[3 * t[j] + 2]};
      if (c[0] == 0 && c[1] == 0 && c[2] == 0) continue;
      const ExtendedSolution x = solve_vertex_functions(points, j);
      const auto free = free_points(j);
      for (int s = 0; s < 4; ++s) {
        for (int d = 0; d < 2; ++d) acc[free[s]][d] += c[0] * x(2 * s + d, 0) + c[1] * x(2 * s + d, 1) + c[2] * x(2 * s + d, 2);
      }
    }
    for (int p = 0; p < kLocalPoints; ++p) out[k][p] = {static_cast<double>(acc[p][0]), static_cast<double>(acc[p][1])};
  }
  return out;
}

NodalField gather_nodal(const PSMesh& ps, const std::vector<LocalTable>& tables) {
  NodalField field(static_cast<std::size_t>(ps.num_vertices()), Vec2{0.0, 0.0});
  for (int k = ps.macro().num_triangles() - 1; k >= 0; --k) {
    const auto& lp = ps.local_points(k);
    for (int p = 0; p < kLocalPoints; ++p) field[lp[p]] = tables[k][p];
  }
  return field;
}

std::vector<LocalTable> scatter_local(const PSMesh& ps, const NodalField& field) {
  std::vector<LocalTable> out(static_cast<std::size_t>(ps.macro().num_triangles()));
  for (int k = 0; k < ps.macro().num_triangles(); ++k) {
    const auto& lp = ps.local_points(k);
    for (int p = 0; p < kLocalPoints; ++p) out[k][p] = field[lp[p]];
  }
  return out;
}

NodalField expand(const PSMesh& ps, const VelocityBasis& basis, std::span<const BasisFunctionId> ids,
                  std::span<const double> coefficients) {
  return gather_nodal(ps, expand_local(ps, basis, ids, coefficients));
}

std::vector<int> ordered_subtriangles(const PSMesh& ps, int z) {
  std::vector<int> subs = ps.vertex_subtriangles(z);
  const Point2 c = ps.vertex(z);
  auto angle = [&](int s) {
    const auto p = ps.subtriangle_points(s);
    const Point2 centroid = (p[0] + p[1] + p[2]) / 3.0;
    return std::atan2(centroid.y - c.y, centroid.x - c.x);
  };
  std::sort(subs.begin(), subs.end(), [&](int l, int r) { return angle(l) < angle(r); });
  return subs;
}

double theta(const PSMesh& ps, const PressureField& q, int z) {
  const auto subs = ordered_subtriangles(ps, z);
  double sum = 0.0;
  double sign = 1.0;
  for (int s : subs) {
    sum += sign * q[s];
    sign = -sign;
  }
  return sum;
}

PressureField divergence(const PSMesh& ps, const NodalField& v) {
  PressureField out(static_cast<std::size_t>(ps.num_subtriangles()));
  for (int s = 0; s < ps.num_subtriangles(); ++s) {
    const auto& idx = ps.subtriangles()[s].vertices;
    const auto p = ps.subtriangle_points(s);
    out[s] = div_integral(p, {v[idx[0]], v[idx[1]], v[idx[2]]}) / ps.subtriangle_area(s);
  }
  return out;
}

PressureField divergence(const PSMesh& ps, const std::vector<LocalTable>& tables) {
  PressureField out(static_cast<std::size_t>(ps.num_subtriangles()));
  for (int k = 0; k < ps.macro().num_triangles(); ++k) {
    const auto pts = ps.local_coordinates(k);
    for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
      const auto l = local_subtriangle(i);
      const std::array<Point2, 3> p = {pts[l[0]], pts[l[1]], pts[l[2]]};
      const int s = ps.subtriangle_index(k, i);
      out[s] = div_integral(p, {tables[k][l[0]], tables[k][l[1]], tables[k][l[2]]}) / ps.subtriangle_area(s);
    }
  }
  return out;
}

Vec2 outward_normal(const MacroMesh& mesh, int edge) {
  const MacroEdge& e = mesh.edges()[edge];
  const int k = e.triangles[0];
  const auto& t = mesh.triangles()[k];
  const auto& te = mesh.triangle_edges(k);
  const int i = static_cast<int>(std::find(te.begin(), te.end(), edge) - te.begin());
  const Vec2 d = mesh.vertex(t[(i + 1) % 3]) - mesh.vertex(t[i]);
  return rot90(d) * (-1.0 / norm(d));
}

double boundary_edge_flux(const PSMesh& ps, int edge, const VectorFunction& g) {
  const MacroEdge& e = ps.macro().edges()[edge];
  const Vec2 n = outward_normal(ps.macro(), edge);
  const Point2 a = ps.vertex(e.vertices[0]);
  const Point2 s = ps.vertex(ps.singular_vertex(edge));
  const Point2 b = ps.vertex(e.vertices[1]);
  const auto& rule = gauss_legendre(6);
  auto flux = [&](Point2 x) { return dot(g(x), n); };
  return integrate_segment(rule, a, s, flux) + integrate_segment(rule, s, b, flux);
}

std::vector<BasisFunctionId> BoundaryInterpolant::ids() const {
  std::vector<BasisFunctionId> out;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    for (int kind = 0; kind < 3; ++kind) {
      if (k == 0 && kind == 2) continue;
      out.push_back({vertices[k], kind});
    }
  }
  return out;
}

std::vector<double> BoundaryInterpolant::values() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    for (int kind = 0; kind < 3; ++kind) {
      if (k == 0 && kind == 2) continue;
      out.push_back(coefficients[k][kind]);
    }
  }
  return out;
}

BoundaryInterpolant interpolate_boundary(const PSMesh& ps, const VelocityBasis& basis, const VectorFunction& g,
                                         InterpolantOptions options) {
  const MacroMesh& mesh = ps.macro();
  BoundaryInterpolant gh;
  gh.vertices = mesh.boundary_vertices();
  gh.edges = mesh.boundary_edges();
  const auto start = std::find(gh.vertices.begin(), gh.vertices.end(), basis.z0());
  if (start == gh.vertices.end()) throw Error(ErrorCode::kInvalidArgument, "z0 is not on the boundary");
  const auto shift = start - gh.vertices.begin();
  std::rotate(gh.vertices.begin(), start, gh.vertices.end());
  std::rotate(gh.edges.begin(), gh.edges.begin() + shift, gh.edges.end());

  const std::size_t m = gh.vertices.size();
  double perimeter = 0.0;
  double gmax = 0.0;
  gh.moments.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const int e = gh.edges[k];
    gh.moments[k] = boundary_edge_flux(ps, e, g);
    gh.compatibility += gh.moments[k];
    perimeter += distance(mesh.vertex(gh.vertices[k]), mesh.vertex(gh.vertices[(k + 1) % m]));
    gmax = std::max({gmax, norm(g(mesh.vertex(gh.vertices[k]))), norm(g(ps.vertex(ps.singular_vertex(e))))});
  }
  if (std::abs(gh.compatibility) > 1e-8 * perimeter * std::max(gmax, 1e-300)) {
    throw Error(ErrorCode::kIncompatibleData,
                "boundary data has nonzero net flux " + std::to_string(gh.compatibility));
  }

  gh.coefficients.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 value = g(mesh.vertex(gh.vertices[k]));
    gh.coefficients[k] = {value.x, value.y, 0.0};
  }
  // Forward substitution: the flux functions of the two endpoints carry the edge moment.
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const int e = gh.edges[k];
    const Vec2 n = outward_normal(mesh, e);
    const Point2 p = mesh.vertex(gh.vertices[k]);
    const Point2 q = mesh.vertex(gh.vertices[k + 1]);
    const double s_from = dot(rot90(q - p) / distance(p, q), n);
    const double s_to = dot(rot90(p - q) / distance(p, q), n);
    const double moment = static_cast<int>(k) == options.flipped_edge ? -gh.moments[k] : gh.moments[k];
    gh.coefficients[k + 1][2] = (moment - s_from * gh.coefficients[k][2]) / s_to;
  }
  return gh;
}

NodalField expand(const PSMesh& ps, const VelocityBasis& basis, const BoundaryInterpolant& gh) {
  const auto ids = gh.ids();
  const auto values = gh.values();
  return expand(ps, basis, ids, values);
}

std::vector<LocalTable> expand_local(const PSMesh& ps, const VelocityBasis& basis, const BoundaryInterpolant& gh) {
  const auto ids = gh.ids();
  const auto values = gh.values();
  return expand_local(ps, basis, ids, values);
}

}  // namespace psflow
