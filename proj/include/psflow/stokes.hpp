#pragma once

#include "psflow/assembly.hpp"
#include "psflow/pressure_basis.hpp"
#include "psflow/velocity_basis.hpp"

namespace psflow {

struct StokesData {
  double nu = 1.0;
  VectorFunction f;
  VectorFunction g;
};

/// u = (sin x cos y, -cos x sin y), p = xy - 1/4 on the unit square.
struct ManufacturedSolution {
  double nu = 1.0;
  VectorFunction u;
  TensorFunction grad_u;
  ScalarFunction p;
  VectorFunction f;

  StokesData data() const { return {nu, f, u}; }
};

ManufacturedSolution manufactured_solution(double nu = 1.0);

struct RunOptions {
  SolveOptions solve;
  BasisOptions basis;
  InterpolantOptions interpolant;
  /// Exterior anchor vertex; -1 picks default_z0.
  int z0 = -1;
};

/// Times are in seconds. Assembly time includes building the bases it needs.
struct SolVelocityResult {
  VelocityBasis basis;
  BoundaryInterpolant interpolant;
  NodalField boundary;
  LinearSystem system;
  SolveReport report;
  /// u_h per macro-triangle, as held by the basis, and gathered to split vertices.
  std::vector<LocalTable> velocity_local;
  NodalField velocity;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

struct SolPressureResult {
  SpanningTree tree;
  PressureBasis basis;
  LinearSystem system;
  SolveReport report;
  PressureField pressure;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

struct SaddlePointResult {
  PressureBasis pressure_basis;
  NodalDofMap dofs;
  LinearSystem system;
  SolveReport report;
  NodalField velocity;
  PressureField pressure;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

SolVelocityResult solve_sol_velocity(const PSMesh& ps, const StokesData& data, const RunOptions& options = {});

SolPressureResult solve_sol_pressure(const PSMesh& ps, const StokesData& data, const NodalField& velocity,
                                     const RunOptions& options = {});

SaddlePointResult solve_saddle_point(const PSMesh& ps, const StokesData& data, const RunOptions& options = {});

}  // namespace psflow
