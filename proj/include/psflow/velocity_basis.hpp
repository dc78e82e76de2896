#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "psflow/geometry.hpp"
#include "psflow/ps_split.hpp"

namespace psflow {

/// Values of a continuous piecewise-linear vector field at the seven local points
/// of one macro-triangle (LocalPoint order).
using LocalTable = std::array<Vec2, kLocalPoints>;

/// Values of a piecewise-linear vector field at every split vertex.
using NodalField = std::vector<Vec2>;

/// Piecewise-constant scalar, one value per subtriangle.
using PressureField = std::vector<double>;

using VectorFunction = std::function<Vec2(Point2)>;
using ScalarFunction = std::function<double(Point2)>;

/// Integral of the divergence of the linear interpolant of (values) over the
/// counter-clockwise triangle (points): -1/2 sum |e_i| v(z_i) . n_i, with e_i
/// opposite z_i and n_i its outward normal.
double div_integral(const std::array<Point2, 3>& points, const std::array<Vec2, 3>& values);

/// Integral of v . n over the segment p -> q, v linear on p -> s and s -> q.
double segment_flux(Point2 p, Point2 s, Point2 q, Vec2 vp, Vec2 vs, Vec2 vq, Vec2 normal);

/// The three vertex functions of one macro-triangle, centered at local vertex j.
///
/// Function i has value e_i at vertex j (i = 0, 1) or zero (i = 2), and normal
/// moment 0 (i = 0, 1) or 1 (i = 2) on each edge incident to vertex j, with the
/// normal pointing in the counter-clockwise direction around vertex j. It vanishes
/// on the opposite edge and is divergence free on all six subtriangles. Works in
/// any coordinates: physical points or reference preimages.
std::array<LocalTable, 3> vertex_functions(const std::array<Point2, kLocalPoints>& points, int j);

/// Restriction of one of the three functions of V_z to its support.
struct LocalBasisFunction {
  int center = 0;
  int kind = 0;  // 0, 1, 2 for (1,0,0), (0,1,0), (0,0,1)
  std::vector<int> triangles;       // star triangles, counter-clockwise
  std::vector<LocalTable> tables;   // one per star triangle
};

std::array<LocalBasisFunction, 3> local_basis(const PSMesh& ps, int z);

/// Reference functions for reference vertex j (0-based), i.e. the hat functions
/// attached to (0,0), (1,0) or (0,1), in reference coordinates.
std::array<LocalTable, 3> reference_basis(const ReferenceGeometry& geom, int j);

/// v = J v_hat / |det J| applied pointwise.
LocalTable piola_push(const ReferenceGeometry& geom, const LocalTable& reference_values);

/// Physical vertex functions on one macro-triangle built from the reference
/// functions. center_values are the prescribed values of the first two functions
/// at the vertex.
std::array<LocalTable, 3> combine_reference(const ReferenceGeometry& geom, int j,
                                            std::array<Vec2, 2> center_values = {Vec2{1.0, 0.0},
                                                                                 Vec2{0.0, 1.0}});

struct BasisFunctionId {
  int vertex = 0;
  int kind = 0;

  friend bool operator==(BasisFunctionId, BasisFunctionId) = default;
};

struct BasisOptions {
  /// Keep the flux function of z0 instead of excluding it (fault injection).
  bool keep_excluded = false;
};

/// Global solenoidal basis: all vertex functions except the flux function of z0.
class VelocityBasis {
 public:
  VelocityBasis(const PSMesh& ps, int z0, BasisOptions options = {});

  int z0() const { return z0_; }

  /// Functions of B and of its interior subset, in DOF order.
  const std::vector<BasisFunctionId>& functions() const { return functions_; }
  const std::vector<BasisFunctionId>& interior_functions() const { return interior_functions_; }
  int size() const { return static_cast<int>(functions_.size()); }
  int interior_size() const { return static_cast<int>(interior_functions_.size()); }

  /// DOF index in B (or in B0), -1 if excluded.
  int dof(int vertex, int kind) const { return dof_[3 * vertex + kind]; }
  int interior_dof(int vertex, int kind) const { return interior_dof_[3 * vertex + kind]; }

  /// Table of the function centered at local vertex j of macro-triangle k.
  const LocalTable& table(int k, int j, int kind) const { return tables_[k][j][kind]; }

 private:
  int z0_;
  std::vector<BasisFunctionId> functions_;
  std::vector<BasisFunctionId> interior_functions_;
  std::vector<int> dof_;
  std::vector<int> interior_dof_;
  std::vector<std::array<std::array<LocalTable, 3>, 3>> tables_;
};

/// Exterior vertex used to anchor the basis and the pressure spanning tree: the
/// smallest-index exterior vertex adjacent to an interior vertex, or the
/// smallest exterior index when there are no interior vertices.
int default_z0(const MacroMesh& mesh);

VelocityBasis global_basis(const PSMesh& ps, int z0, BasisOptions options = {});

/// Nodal values of sum_f coefficients[f] * function(f), f over ids.
NodalField expand(const PSMesh& ps, const VelocityBasis& basis, std::span<const BasisFunctionId> ids,
                  std::span<const double> coefficients);

/// Per-macro-triangle tables of the same expansion (no averaging at shared points).
std::vector<LocalTable> expand_local(const PSMesh& ps, const VelocityBasis& basis,
                                     std::span<const BasisFunctionId> ids, std::span<const double> coefficients);

/// One value per split vertex from per-triangle tables; a shared point takes the
/// value of the lowest-index macro-triangle containing it.
NodalField gather_nodal(const PSMesh& ps, const std::vector<LocalTable>& tables);

/// Per-triangle tables of a nodal field.
std::vector<LocalTable> scatter_local(const PSMesh& ps, const NodalField& field);

/// Incident subtriangles of a singular vertex in counter-clockwise order.
std::vector<int> ordered_subtriangles(const PSMesh& ps, int z);

/// Alternating sum of q over the subtriangles meeting at singular vertex z.
double theta(const PSMesh& ps, const PressureField& q, int z);

/// Constant divergence of a nodal field on every subtriangle.
PressureField divergence(const PSMesh& ps, const NodalField& v);

/// Same, from per-macro-triangle tables.
PressureField divergence(const PSMesh& ps, const std::vector<LocalTable>& tables);

/// Boundary data interpolant G_h expanded in the exterior vertex functions.
struct BoundaryInterpolant {
  /// Exterior vertices, counter-clockwise, starting at z0; edge k joins vertex k and k+1.
  std::vector<int> vertices;
  std::vector<int> edges;
  /// (c1, c2, c3) per entry of vertices; c3 of z0 is zero.
  std::vector<std::array<double, 3>> coefficients;
  /// Normal moments of g on each boundary edge (outward normal).
  std::vector<double> moments;
  double compatibility = 0.0;

  /// Coefficients as (function id, value) pairs usable with expand().
  std::vector<BasisFunctionId> ids() const;
  std::vector<double> values() const;
};

struct InterpolantOptions {
  /// Flip the sign of this boundary edge's moment equation (fault injection).
  int flipped_edge = -1;
};

/// Integral of g . n over the boundary edge (outward normal), by Gauss-Legendre
/// quadrature on each of its two split sub-edges.
double boundary_edge_flux(const PSMesh& ps, int edge, const VectorFunction& g);

BoundaryInterpolant interpolate_boundary(const PSMesh& ps, const VelocityBasis& basis, const VectorFunction& g,
                                         InterpolantOptions options = {});

NodalField expand(const PSMesh& ps, const VelocityBasis& basis, const BoundaryInterpolant& gh);
std::vector<LocalTable> expand_local(const PSMesh& ps, const VelocityBasis& basis, const BoundaryInterpolant& gh);

/// Outward unit normal of an exterior macro edge.
Vec2 outward_normal(const MacroMesh& mesh, int edge);

}  // namespace psflow
