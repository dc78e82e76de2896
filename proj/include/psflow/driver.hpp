#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psflow/macro_mesh.hpp"
#include "psflow/stokes.hpp"

namespace psflow {

enum class Formulation { kSolenoidal, kSaddlePoint };

struct ConvergenceConfig {
  std::vector<int> sizes;                           // structured unit-square meshes
  std::vector<std::filesystem::path> mesh_files;    // used when sizes is empty
  double nu = 1.0;
  bool with_pressure = false;
  bool with_condition = false;
  SolveOptions solve;
};

struct ConvergenceRow {
  std::string mesh;
  int mesh_n = 0;  // 0 for meshes read from files
  double h_macro = 0.0;
  double h_split = 0.0;
  int dof_v = 0;
  int dof_p = 0;  // 0 when the pressure was not computed
  ErrorNorms errors;
  std::optional<double> rate_u_h1;
  std::optional<double> rate_p_l2;
  double div_audit = 0.0;  // max |div u_h| over subtriangles
  double grad_max = 0.0;   // max |grad u_h| entry
  double t_assemble = 0.0;
  double t_solve = 0.0;
  std::optional<double> condition;
  bool has_pressure = false;
};

/// Solves the manufactured problem on every configured mesh and attaches rates.
std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config,
                                            Formulation formulation = Formulation::kSolenoidal);

/// Rates log2(e_coarse / e_fine) between consecutive rows whose h_macro halves.
void attach_rates(std::vector<ConvergenceRow>& rows);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows);

/// "rates.csv" -> "rates_sp.csv".
std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix);

enum class Fault { kNone, kSkipExclusion, kFlipMomentSign };

struct CheckFamily {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst = 0.0;  // largest defect seen
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

struct CheckReport {
  std::string mesh;
  std::vector<CheckFamily> families;

  bool passed() const;
  const CheckFamily* find(const std::string& name) const;
};

/// Runs every invariant family on one mesh. Gram-rank and eigenvalue families
/// use dense oracles and are skipped above dense_limit unknowns.
CheckReport run_check(const MacroMesh& mesh, Fault fault = Fault::kNone, int dense_limit = 1500);

struct TimingStats {
  double mean = 0.0;
  double stddev = 0.0;
};

TimingStats timing_stats(const std::vector<double>& samples);

struct BenchConfig {
  std::vector<int> sizes;
  int repeats = 20;
  double nu = 1.0;
  SolveOptions solve;
};

struct PhaseTimes {
  TimingStats assemble, solve, total;
};

struct BenchRow {
  int mesh_n = 0;
  int split_vertices = 0;
  int dof_sol_v = 0;
  int dof_sol_p = 0;
  int dof_sp = 0;
  PhaseTimes sol_velocity;
  PhaseTimes sol_pressure;
  PhaseTimes saddle_point;
};

std::vector<BenchRow> run_bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

/// Nodal tables of every function of B: dof, vertex, kind, macro_triangle, point, split_vertex, x, y, vx, vy.
void write_basis_csv(std::ostream& out, const PSMesh& ps, const VelocityBasis& basis);

/// Spanning tree edges in rooted order: order, edge, parent, child, depth.
void write_tree_csv(std::ostream& out, const MacroMesh& mesh, const SpanningTree& tree);

/// Parses "4,8,16" or "1..4" (inclusive) into a strictly increasing list.
std::vector<int> parse_size_list(const std::string& text);

}  // namespace psflow
