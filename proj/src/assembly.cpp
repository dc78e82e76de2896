#include "psflow/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "psflow/error.hpp"
#include "psflow/quadrature.hpp"

namespace psflow {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Mat2 outer(Vec2 v, Vec2 g) { return {v.x * g.x, v.x * g.y, v.y * g.x, v.y * g.y}; }

Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }

Mat2 gradient_from(const std::array<Vec2, 3>& grads, const std::array<Vec2, 3>& values) {
  return outer(values[0], grads[0]) + outer(values[1], grads[1]) + outer(values[2], grads[2]);
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// f at the degree-4 points of every subtriangle.
std::vector<std::array<Vec2, 6>> sample_forcing(const PSMesh& ps, const VectorFunction& f) {
  const QuadratureRule& rule = triangle_rule_degree4();
  std::vector<std::array<Vec2, 6>> out(static_cast<std::size_t>(ps.num_subtriangles()));
  for (int s = 0; s < ps.num_subtriangles(); ++s) {
    const auto p = ps.subtriangle_points(s);
    for (std::size_t q = 0; q < rule.size(); ++q) out[s][q] = f(barycentric_point(rule.points[q], p[0], p[1], p[2]));
  }
  return out;
}

// (f, v) over subtriangle s for the linear field with the given vertex values.
double load(const PSMesh& ps, int s, const std::array<Vec2, 6>& fq, const std::array<Vec2, 3>& values) {
  const QuadratureRule& rule = triangle_rule_degree4();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    sum += rule.weights[q] * dot(fq[q], l[0] * values[0] + l[1] * values[1] + l[2] * values[2]);
  }
  return sum * ps.subtriangle_area(s);
}

}  // namespace

Mat2 linear_gradient(const std::array<Point2, 3>& points, const std::array<Vec2, 3>& values) {
  return gradient_from(barycentric_gradients(points[0], points[1], points[2]), values);
}

LinearSystem assemble_velocity(const PSMesh& ps, const VelocityBasis& basis, const NodalField& boundary,
                               const VectorFunction& f, double nu) {
  const MacroMesh& mesh = ps.macro();
  const int n = basis.interior_size();
  const auto forcing = sample_forcing(ps, f);
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  Triplets triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 81);

  struct Local {
    int dof;
    const LocalTable* table;
  };
  std::vector<Local> local;
  std::vector<Mat2> grad;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangles()[k];
    local.clear();
    for (int j = 0; j < 3; ++j) {
      for (int kind = 0; kind < 3; ++kind) {
        const int dof = basis.interior_dof(t[j], kind);
        if (dof >= 0) local.push_back({dof, &basis.table(k, j, kind)});
      }
    }
    const auto pts = ps.local_coordinates(k);
    const auto& lp = ps.local_points(k);
    for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
      const auto l = local_subtriangle(i);
      const int s = ps.subtriangle_index(k, i);
      const double area = ps.subtriangle_area(s);
      const auto g = barycentric_gradients(pts[l[0]], pts[l[1]], pts[l[2]]);
      const Mat2 grad_g = gradient_from(g, {boundary[lp[l[0]]], boundary[lp[l[1]]], boundary[lp[l[2]]]});
      grad.resize(local.size());
      for (std::size_t a = 0; a < local.size(); ++a) {
        const LocalTable& phi = *local[a].table;
        const std::array<Vec2, 3> values = {phi[l[0]], phi[l[1]], phi[l[2]]};
        grad[a] = gradient_from(g, values);
        sys.rhs[local[a].dof] += load(ps, s, forcing[s], values) - nu * area * frobenius(grad_g, grad[a]);
      }
      for (std::size_t a = 0; a < local.size(); ++a) {
        for (std::size_t b = 0; b < local.size(); ++b) {
          triplets.emplace_back(local[a].dof, local[b].dof, nu * area * frobenius(grad[a], grad[b]));
        }
      }
    }
  }
  sys.matrix = from_triplets(n, n, triplets);
  sys.matrix_class = MatrixClass::kPositiveDefinite;
  return sys;
}

std::vector<LocalTable> velocity_from_coefficients(const PSMesh& ps, const VelocityBasis& basis,
                                                   const BoundaryInterpolant& gh, const Eigen::VectorXd& w) {
  std::vector<BasisFunctionId> ids = basis.interior_functions();
  std::vector<double> values(w.data(), w.data() + w.size());
  const auto boundary_ids = gh.ids();
  const auto boundary_values = gh.values();
  ids.insert(ids.end(), boundary_ids.begin(), boundary_ids.end());
  values.insert(values.end(), boundary_values.begin(), boundary_values.end());
  return expand_local(ps, basis, ids, values);
}

LinearSystem assemble_pressure(const PSMesh& ps, const PressureBasis& basis, const NodalField& velocity,
                               const VectorFunction& f, double nu) {
  const int n = basis.size();
  const auto forcing = sample_forcing(ps, f);
  const QuadratureRule& rule = triangle_rule_degree4();
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);

  std::vector<std::vector<std::pair<int, double>>> by_subtriangle(static_cast<std::size_t>(ps.num_subtriangles()));
  for (int i = 0; i < n; ++i) {
    const PressureFunction& fn = basis.functions[i];
    for (int s : ps.vertex_subtriangles(fn.split_vertex)) {
      const auto& idx = ps.subtriangles()[s].vertices;
      const auto p = ps.subtriangle_points(s);
      const auto g = barycentric_gradients(p[0], p[1], p[2]);
      const int m = static_cast<int>(std::find(idx.begin(), idx.end(), fn.split_vertex) - idx.begin());
      const double area = ps.subtriangle_area(s);
      by_subtriangle[s].push_back({i, dot(g[m], fn.direction)});

      const Mat2 grad_u = gradient_from(g, {velocity[idx[0]], velocity[idx[1]], velocity[idx[2]]});
      double fs = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        fs += rule.weights[q] * rule.points[q][m] * dot(forcing[s][q], fn.direction);
      }
      sys.rhs[i] += nu * area * frobenius(grad_u, outer(fn.direction, g[m])) - area * fs;
    }
  }
  Triplets triplets;
  for (int s = 0; s < ps.num_subtriangles(); ++s) {
    const double area = ps.subtriangle_area(s);
    for (auto [i, di] : by_subtriangle[s]) {
      for (auto [j, dj] : by_subtriangle[s]) triplets.emplace_back(i, j, area * di * dj);
    }
  }
  sys.matrix = from_triplets(n, n, triplets);
  sys.matrix_class = MatrixClass::kPositiveDefinite;
  return sys;
}

NodalDofMap interior_nodal_dofs(const PSMesh& ps) {
  NodalDofMap map;
  map.index.assign(static_cast<std::size_t>(ps.num_vertices()), -1);
  for (int v = 0; v < ps.num_vertices(); ++v) {
    if (!ps.vertex_exterior(v)) map.index[v] = map.count++;
  }
  return map;
}

LinearSystem assemble_saddle_point(const PSMesh& ps, const NodalDofMap& dofs, const PressureBasis& pressure,
                                   const NodalField& boundary, const VectorFunction& f, double nu) {
  const int nu_dofs = dofs.velocity_dofs();
  const int n = nu_dofs + pressure.size();
  const auto forcing = sample_forcing(ps, f);
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  Triplets triplets;

  std::vector<std::vector<std::pair<int, double>>> by_subtriangle(static_cast<std::size_t>(ps.num_subtriangles()));
  for (int q = 0; q < pressure.size(); ++q) {
    for (auto [s, value] : divergence_entries(ps, pressure.functions[q])) by_subtriangle[s].push_back({q, value});
  }

  constexpr std::array<Vec2, 2> unit = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  for (int s = 0; s < ps.num_subtriangles(); ++s) {
    const auto& idx = ps.subtriangles()[s].vertices;
    const auto p = ps.subtriangle_points(s);
    const auto g = barycentric_gradients(p[0], p[1], p[2]);
    const double area = ps.subtriangle_area(s);
    const Mat2 grad_g = gradient_from(g, {boundary[idx[0]], boundary[idx[1]], boundary[idx[2]]});
    for (int m = 0; m < 3; ++m) {
      const int im = dofs.index[idx[m]];
      if (im < 0) continue;
      for (int c = 0; c < 2; ++c) {
        const int row = 2 * im + c;
        std::array<Vec2, 3> values{};
        values[m] = unit[c];
        sys.rhs[row] += load(ps, s, forcing[s], values) - nu * area * frobenius(grad_g, outer(unit[c], g[m]));
        for (int k = 0; k < 3; ++k) {
          const int ik = dofs.index[idx[k]];
          if (ik >= 0) triplets.emplace_back(row, 2 * ik + c, nu * area * dot(g[m], g[k]));
        }
        const double div_v = c == 0 ? g[m].x : g[m].y;
        for (auto [q, dq] : by_subtriangle[s]) {
          const double b = -area * dq * div_v;
          triplets.emplace_back(row, nu_dofs + q, b);
          triplets.emplace_back(nu_dofs + q, row, b);
        }
      }
    }
  }
  sys.matrix = from_triplets(n, n, triplets);
  sys.matrix_class = MatrixClass::kIndefinite;
  return sys;
}

NodalField nodal_velocity(const PSMesh& ps, const NodalDofMap& dofs, const NodalField& boundary,
                          const Eigen::VectorXd& x) {
  NodalField u = boundary;
  for (int v = 0; v < ps.num_vertices(); ++v) {
    const int i = dofs.index[v];
    if (i >= 0) u[v] += Vec2{x[2 * i], x[2 * i + 1]};
  }
  return u;
}

SolveReport solve(const LinearSystem& system, const SolveOptions& options) {
  SolveReport report;
  const int n = system.dimension();
  if (n == 0) {
    report.x = Eigen::VectorXd::Zero(0);
    report.solver = "empty";
    return report;
  }
  SolverKind kind = options.solver;
  if (kind == SolverKind::kAuto) {
    if (system.matrix_class == MatrixClass::kIndefinite) kind = SolverKind::kSparseLU;
    else kind = n <= options.direct_limit ? SolverKind::kCholesky : SolverKind::kConjugateGradient;
  }
  switch (kind) {
    case SolverKind::kCholesky: {
      Eigen::SimplicialLLT<SparseMatrix> llt(system.matrix);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::kSolverFailure, "sparse Cholesky factorization failed: matrix is not positive definite");
      }
      report.x = llt.solve(system.rhs);
      report.solver = "cholesky";
      break;
    }
    case SolverKind::kConjugateGradient: {
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
      cg.setTolerance(options.cg_tolerance);
      cg.setMaxIterations(options.cg_max_iterations);
      cg.compute(system.matrix);
      report.x = cg.solve(system.rhs);
      report.iterations = static_cast<int>(cg.iterations());
      report.solver = "cg";
      if (cg.info() != Eigen::Success) {
        throw Error(ErrorCode::kSolverFailure, "conjugate gradients did not converge after " +
                                                   std::to_string(report.iterations) + " iterations");
      }
      break;
    }
    case SolverKind::kSparseLU:
    case SolverKind::kAuto: {
      Eigen::SparseLU<SparseMatrix> lu;
      lu.analyzePattern(system.matrix);
      lu.factorize(system.matrix);
      if (lu.info() != Eigen::Success) {
        throw Error(ErrorCode::kSolverFailure, "sparse LU factorization failed: " + lu.lastErrorMessage());
      }
      report.x = lu.solve(system.rhs);
      report.solver = "sparse-lu";
      break;
    }
  }
  const double bnorm = system.rhs.norm();
  const double rnorm = (system.matrix * report.x - system.rhs).norm();
  report.relative_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  if (!report.x.allFinite()) throw Error(ErrorCode::kSolverFailure, "solution contains non-finite values");
  return report;
}

bool cholesky_succeeds(const SparseMatrix& matrix) {
  Eigen::SimplicialLLT<SparseMatrix> llt(matrix);
  return llt.info() == Eigen::Success;
}

double symmetry_defect(const SparseMatrix& matrix) {
  if (matrix.nonZeros() == 0) return 0.0;
  const SparseMatrix t = matrix.transpose();
  const double scale = matrix.coeffs().cwiseAbs().maxCoeff();
  const SparseMatrix diff = matrix - t;
  if (diff.nonZeros() == 0 || scale == 0.0) return 0.0;
  return diff.coeffs().cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd dense_eigenvalues(const SparseMatrix& matrix) {
  if (matrix.rows() == 0) return Eigen::VectorXd(0);
  const Eigen::MatrixXd dense(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kSolverFailure, "dense eigensolve failed");
  return eig.eigenvalues();
}

int numerical_rank(const Eigen::MatrixXd& symmetric, double rel_tol) {
  if (symmetric.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = eig.eigenvalues().cwiseAbs();
  if (ev.size() == 0) return 0;
  const double cutoff = rel_tol * ev.maxCoeff();
  return static_cast<int>((ev.array() > cutoff).count());
}

double condition_number_dense(const SparseMatrix& matrix) {
  const Eigen::VectorXd ev = dense_eigenvalues(matrix).cwiseAbs();
  if (ev.size() == 0) return 1.0;
  const double lo = ev.minCoeff();
  return lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

namespace {

template <typename Apply>
double dominant_magnitude(int n, Apply apply, int max_iterations, double tol) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd y = apply(x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    if (it > 0 && std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace

double condition_number_iterative(const LinearSystem& system, int max_iterations, double tol) {
  const SparseMatrix& a = system.matrix;
  const int n = system.dimension();
  if (n == 0) return 1.0;
  const double largest = dominant_magnitude(
      n, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; }, max_iterations, tol);
  double inverse_largest = 0.0;
  if (system.matrix_class == MatrixClass::kPositiveDefinite) {
    Eigen::SimplicialLLT<SparseMatrix> llt(a);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    inverse_largest = dominant_magnitude(
        n, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return llt.solve(x); }, max_iterations, tol);
  } else {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    inverse_largest = dominant_magnitude(
        n, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return lu.solve(x); }, max_iterations, tol);
  }
  return largest * inverse_largest;
}

double condition_estimate(const LinearSystem& system, int dense_limit) {
  if (system.dimension() <= dense_limit) return condition_number_dense(system.matrix);
  return condition_number_iterative(system);
}

ErrorNorms error_norms(const PSMesh& ps, const NodalField& velocity, const PressureField& pressure,
                       const VectorFunction& u, const TensorFunction& grad_u, const ScalarFunction& p) {
  const QuadratureRule& rule = triangle_rule_degree4();
  double l2u = 0.0, h1semi = 0.0, l2p = 0.0;
  for (int s = 0; s < ps.num_subtriangles(); ++s) {
    const auto& idx = ps.subtriangles()[s].vertices;
    const auto pt = ps.subtriangle_points(s);
    const std::array<Vec2, 3> values = {velocity[idx[0]], velocity[idx[1]], velocity[idx[2]]};
    const Mat2 grad_h = linear_gradient(pt, values);
    const double area = ps.subtriangle_area(s);
    double eu = 0.0, eg = 0.0, ep = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point2 x = barycentric_point(l, pt[0], pt[1], pt[2]);
      const Vec2 du = u(x) - (l[0] * values[0] + l[1] * values[1] + l[2] * values[2]);
      const Mat2 g = grad_u(x);
      const Mat2 dg{g.a - grad_h.a, g.b - grad_h.b, g.c - grad_h.c, g.d - grad_h.d};
      eu += rule.weights[q] * dot(du, du);
      eg += rule.weights[q] * frobenius(dg, dg);
      if (!pressure.empty()) {
        const double dp = p(x) - pressure[s];
        ep += rule.weights[q] * dp * dp;
      }
    }
    l2u += area * eu;
    h1semi += area * eg;
    l2p += area * ep;
  }
  ErrorNorms e;
  e.l2_u = std::sqrt(l2u);
  e.h1_u = std::sqrt(l2u + h1semi);
  e.l2_p = pressure.empty() ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(l2p);
  return e;
}

double max_abs_divergence(const PSMesh& ps, const NodalField& velocity) {
  return max_abs_divergence(ps, scatter_local(ps, velocity));
}

double max_abs_divergence(const PSMesh& ps, const std::vector<LocalTable>& velocity) {
  double out = 0.0;
  for (double d : divergence(ps, velocity)) out = std::max(out, std::abs(d));
  return out;
}

double max_abs_gradient(const PSMesh& ps, const NodalField& velocity) {
  return max_abs_gradient(ps, scatter_local(ps, velocity));
}

double max_abs_gradient(const PSMesh& ps, const std::vector<LocalTable>& velocity) {
  double out = 0.0;
  for (int k = 0; k < ps.macro().num_triangles(); ++k) {
    const auto pts = ps.local_coordinates(k);
    for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
      const auto l = local_subtriangle(i);
      const Mat2 g = linear_gradient({pts[l[0]], pts[l[1]], pts[l[2]]},
                                     {velocity[k][l[0]], velocity[k][l[1]], velocity[k][l[2]]});
      out = std::max({out, std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
    }
  }
  return out;
}

DivergenceAudit divergence_audit(const PSMesh& ps, const std::vector<LocalTable>& velocity) {
  return {max_abs_divergence(ps, velocity), max_abs_gradient(ps, velocity)};
}

DivergenceAudit divergence_audit(const PSMesh& ps, const NodalField& velocity) {
  return divergence_audit(ps, scatter_local(ps, velocity));
}

double integrate_pressure(const PSMesh& ps, const PressureField& q) {
  double sum = 0.0;
  for (int s = 0; s < ps.num_subtriangles(); ++s) sum += ps.subtriangle_area(s) * q[s];
  return sum;
}

}  // namespace psflow
