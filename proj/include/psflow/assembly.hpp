#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "psflow/geometry.hpp"
#include "psflow/pressure_basis.hpp"
#include "psflow/ps_split.hpp"
#include "psflow/velocity_basis.hpp"

namespace psflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Velocity gradient: a = du/dx, b = du/dy, c = dv/dx, d = dv/dy.
using TensorFunction = std::function<Mat2(Point2)>;

inline double frobenius(const Mat2& x, const Mat2& y) { return x.a * y.a + x.b * y.b + x.c * y.c + x.d * y.d; }

/// Gradient of the linear interpolant of (values) on triangle (points).
Mat2 linear_gradient(const std::array<Point2, 3>& points, const std::array<Vec2, 3>& values);

enum class MatrixClass { kPositiveDefinite, kIndefinite };

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  MatrixClass matrix_class = MatrixClass::kPositiveDefinite;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// Solenoidal velocity system over the interior basis B0:
/// A_ij = nu (grad Phi_j, grad Phi_i), b_i = (f, Phi_i) - nu (grad G_h, grad Phi_i).
LinearSystem assemble_velocity(const PSMesh& ps, const VelocityBasis& basis, const NodalField& boundary,
                               const VectorFunction& f, double nu);

/// Per-triangle tables of u_h = G_h + sum_i w_i Phi_i over B0, expanded in one pass.
std::vector<LocalTable> velocity_from_coefficients(const PSMesh& ps, const VelocityBasis& basis,
                                                   const BoundaryInterpolant& gh, const Eigen::VectorXd& w);

/// Pressure system: M_ij = (div s_j, div s_i), r_i = nu (grad u_h, grad s_i) - (f, s_i).
LinearSystem assemble_pressure(const PSMesh& ps, const PressureBasis& basis, const NodalField& velocity,
                               const VectorFunction& f, double nu);

/// Two unknowns per interior split vertex; -1 for boundary vertices.
struct NodalDofMap {
  std::vector<int> index;
  int count = 0;

  int velocity_dofs() const { return 2 * count; }
};

NodalDofMap interior_nodal_dofs(const PSMesh& ps);

/// Classical mixed system [A  -B^T; -B  0] over continuous piecewise-linear
/// velocities vanishing on the boundary and the pressure space div(S).
LinearSystem assemble_saddle_point(const PSMesh& ps, const NodalDofMap& dofs, const PressureBasis& pressure,
                                   const NodalField& boundary, const VectorFunction& f, double nu);

/// G_h plus the nodal velocity part of a saddle-point solution.
NodalField nodal_velocity(const PSMesh& ps, const NodalDofMap& dofs, const NodalField& boundary,
                          const Eigen::VectorXd& x);

enum class SolverKind { kAuto, kCholesky, kConjugateGradient, kSparseLU };

struct SolveOptions {
  SolverKind solver = SolverKind::kAuto;
  /// kAuto switches from sparse Cholesky to conjugate gradients above this size.
  int direct_limit = 50000;
  double cg_tolerance = 1e-14;
  int cg_max_iterations = 100000;
};

struct SolveReport {
  Eigen::VectorXd x;
  std::string solver;
  int iterations = 0;
  double relative_residual = 0.0;
};

SolveReport solve(const LinearSystem& system, const SolveOptions& options = {});

/// True when sparse LL^T completes without a non-positive pivot.
bool cholesky_succeeds(const SparseMatrix& matrix);

/// max |A - A^T| / max |A|.
double symmetry_defect(const SparseMatrix& matrix);

Eigen::VectorXd dense_eigenvalues(const SparseMatrix& matrix);

/// Number of eigenvalues of a symmetric matrix above rel_tol * largest magnitude.
int numerical_rank(const Eigen::MatrixXd& symmetric, double rel_tol = 1e-10);

/// Ratio of largest to smallest eigenvalue magnitude.
double condition_number_dense(const SparseMatrix& matrix);
/// Power iteration for the largest magnitude and inverse iteration for the smallest.
double condition_number_iterative(const LinearSystem& system, int max_iterations = 5000, double tol = 1e-10);
/// Dense when the dimension is at most dense_limit, iterative otherwise.
double condition_estimate(const LinearSystem& system, int dense_limit = 3000);

struct ErrorNorms {
  double l2_u = 0.0;
  double h1_u = 0.0;  // full H1 norm
  double l2_p = 0.0;
};

/// Errors of a discrete velocity (and pressure, when non-empty) against exact fields.
ErrorNorms error_norms(const PSMesh& ps, const NodalField& velocity, const PressureField& pressure,
                       const VectorFunction& u, const TensorFunction& grad_u, const ScalarFunction& p);

double max_abs_divergence(const PSMesh& ps, const NodalField& velocity);
double max_abs_divergence(const PSMesh& ps, const std::vector<LocalTable>& velocity);
/// Largest gradient entry magnitude over all subtriangles.
double max_abs_gradient(const PSMesh& ps, const NodalField& velocity);
double max_abs_gradient(const PSMesh& ps, const std::vector<LocalTable>& velocity);

struct DivergenceAudit {
  double max_divergence = 0.0;
  double max_gradient = 0.0;

  double relative() const { return max_gradient > 0.0 ? max_divergence / max_gradient : max_divergence; }
};

/// Divergence of a velocity held as per-macro-triangle tables.
DivergenceAudit divergence_audit(const PSMesh& ps, const std::vector<LocalTable>& velocity);
/// Same for a global nodal field.
DivergenceAudit divergence_audit(const PSMesh& ps, const NodalField& velocity);

/// Integral of q over the domain.
double integrate_pressure(const PSMesh& ps, const PressureField& q);

}  // namespace psflow
