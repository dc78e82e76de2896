#include "psflow/stokes.hpp"

#include <chrono>
#include <cmath>

namespace psflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int anchor(const PSMesh& ps, const RunOptions& options) {
  return options.z0 >= 0 ? options.z0 : default_z0(ps.macro());
}

}  // namespace

ManufacturedSolution manufactured_solution(double nu) {
  ManufacturedSolution m;
  m.nu = nu;
  m.u = [](Point2 x) { return Vec2{std::sin(x.x) * std::cos(x.y), -std::cos(x.x) * std::sin(x.y)}; };
  m.grad_u = [](Point2 x) {
    const double sx = std::sin(x.x), cx = std::cos(x.x), sy = std::sin(x.y), cy = std::cos(x.y);
    return Mat2{cx * cy, -sx * sy, sx * sy, -cx * cy};
  };
  m.p = [](Point2 x) { return x.x * x.y - 0.25; };
  m.f = [nu](Point2 x) {
    const double sx = std::sin(x.x), cx = std::cos(x.x), sy = std::sin(x.y), cy = std::cos(x.y);
    return Vec2{2.0 * nu * sx * cy + x.y, -2.0 * nu * cx * sy + x.x};
  };
  return m;
}

SolVelocityResult solve_sol_velocity(const PSMesh& ps, const StokesData& data, const RunOptions& options) {
  const auto start = Clock::now();
  VelocityBasis basis(ps, anchor(ps, options), options.basis);
  BoundaryInterpolant gh = interpolate_boundary(ps, basis, data.g, options.interpolant);
  NodalField boundary = expand(ps, basis, gh);
  LinearSystem system = assemble_velocity(ps, basis, boundary, data.f, data.nu);
  const double t_assemble = seconds_since(start);

  const auto solve_start = Clock::now();
  SolveReport report = solve(system, options.solve);
  const double t_solve = seconds_since(solve_start);

  std::vector<LocalTable> velocity_local = velocity_from_coefficients(ps, basis, gh, report.x);
  NodalField velocity = gather_nodal(ps, velocity_local);
  return {std::move(basis),  std::move(gh),           std::move(boundary), std::move(system),
          std::move(report), std::move(velocity_local), std::move(velocity), t_assemble, t_solve};
}

SolPressureResult solve_sol_pressure(const PSMesh& ps, const StokesData& data, const NodalField& velocity,
                                     const RunOptions& options) {
  const auto start = Clock::now();
  SpanningTree tree = kruskal_tree(ps.macro(), anchor(ps, options));
  PressureBasis basis = build_pressure_basis(ps, tree);
  LinearSystem system = assemble_pressure(ps, basis, velocity, data.f, data.nu);
  const double t_assemble = seconds_since(start);

  const auto solve_start = Clock::now();
  SolveReport report = solve(system, options.solve);
  const double t_solve = seconds_since(solve_start);

  PressureField pressure =
      pressure_from_coefficients(ps, basis, std::span<const double>(report.x.data(), report.x.size()));
  return {std::move(tree), std::move(basis), std::move(system), std::move(report), std::move(pressure), t_assemble,
          t_solve};
}

SaddlePointResult solve_saddle_point(const PSMesh& ps, const StokesData& data, const RunOptions& options) {
  const auto start = Clock::now();
  const int z0 = anchor(ps, options);
  const VelocityBasis basis(ps, z0, options.basis);
  const NodalField boundary = expand(ps, basis, interpolate_boundary(ps, basis, data.g, options.interpolant));
  PressureBasis pressure_basis = build_pressure_basis(ps, kruskal_tree(ps.macro(), z0));
  NodalDofMap dofs = interior_nodal_dofs(ps);
  LinearSystem system = assemble_saddle_point(ps, dofs, pressure_basis, boundary, data.f, data.nu);
  const double t_assemble = seconds_since(start);

  SolveOptions solve_options = options.solve;
  if (solve_options.solver == SolverKind::kCholesky || solve_options.solver == SolverKind::kConjugateGradient) {
    solve_options.solver = SolverKind::kSparseLU;
  }
  const auto solve_start = Clock::now();
  SolveReport report = solve(system, solve_options);
  const double t_solve = seconds_since(solve_start);

  NodalField velocity = nodal_velocity(ps, dofs, boundary, report.x);
  const int nv = dofs.velocity_dofs();
  PressureField pressure = pressure_from_coefficients(
      ps, pressure_basis, std::span<const double>(report.x.data() + nv, report.x.size() - nv));
  return {std::move(pressure_basis), std::move(dofs),     std::move(system), std::move(report),
          std::move(velocity),       std::move(pressure), t_assemble,        t_solve};
}

}  // namespace psflow
