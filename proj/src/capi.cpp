#include "psflow/psflow.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "psflow/driver.hpp"
#include "psflow/error.hpp"

using namespace psflow;

struct psf_mesh {
  MacroMesh mesh;
  PSMesh ps;
};

struct psf_result {
  int dof_v = 0;
  int dof_p = 0;
  ErrorNorms errors;
  DivergenceAudit audit;
  double t_assemble = 0.0;
  double t_solve = 0.0;
  NodalField velocity;
  PressureField pressure;
  int subtriangles = 0;
};

struct psf_convergence {
  std::vector<ConvergenceRow> rows;
};

struct psf_check_report {
  CheckReport report;
};

struct psf_bench {
  std::vector<BenchRow> rows;
};

namespace {

thread_local std::string last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

psf_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return PSF_INVALID_ARGUMENT;
    case ErrorCode::kIo: return PSF_IO;
    case ErrorCode::kParse: return PSF_PARSE;
    case ErrorCode::kNonConforming: return PSF_NON_CONFORMING;
    case ErrorCode::kDegenerate: return PSF_DEGENERATE;
    case ErrorCode::kGeometry: return PSF_GEOMETRY;
    case ErrorCode::kSingularSystem: return PSF_SINGULAR_SYSTEM;
    case ErrorCode::kSolverFailure: return PSF_SOLVER_FAILURE;
    case ErrorCode::kIncompatibleData: return PSF_INCOMPATIBLE_DATA;
    case ErrorCode::kDisconnectedGraph: return PSF_DISCONNECTED_GRAPH;
  }
  return PSF_INTERNAL;
}

psf_status fail(psf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
psf_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return PSF_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PSF_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PSF_INTERNAL, e.what());
  } catch (...) {
    return fail(PSF_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, message);
}

std::ofstream open_output(const char* path) {
  require(path != nullptr, "null output path");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, std::string("cannot open ") + path + " for writing");
  return out;
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

psf_timing timing(const TimingStats& s) { return {s.mean, s.stddev}; }

psf_phase_times phase(const PhaseTimes& p) { return {timing(p.assemble), timing(p.solve), timing(p.total)}; }

}  // namespace

extern "C" {

const char* psf_version(void) { return "0.1.0"; }

const char* psf_status_string(psf_status status) {
  switch (status) {
    case PSF_OK: return "ok";
    case PSF_INVALID_ARGUMENT: return "invalid argument";
    case PSF_IO: return "i/o error";
    case PSF_PARSE: return "parse error";
    case PSF_NON_CONFORMING: return "non-conforming mesh";
    case PSF_DEGENERATE: return "degenerate triangle";
    case PSF_GEOMETRY: return "geometry inconsistency";
    case PSF_SINGULAR_SYSTEM: return "singular system";
    case PSF_SOLVER_FAILURE: return "solver failure";
    case PSF_INCOMPATIBLE_DATA: return "incompatible boundary data";
    case PSF_DISCONNECTED_GRAPH: return "disconnected graph";
    case PSF_BUFFER_TOO_SMALL: return "buffer too small";
    case PSF_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* psf_last_error(void) { return last_error.c_str(); }

psf_status psf_mesh_structured(int n, psf_mesh** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    MacroMesh mesh = generate_structured(n);
    PSMesh ps = split(mesh);
    *out = new psf_mesh{std::move(mesh), std::move(ps)};
  });
}

psf_status psf_mesh_load(const char* path, psf_mesh** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "null argument");
    MacroMesh mesh = load_mesh(path);
    PSMesh ps = split(mesh);
    *out = new psf_mesh{std::move(mesh), std::move(ps)};
  });
}

psf_status psf_mesh_from_arrays(const double* xy, int num_vertices, const int* triangles, int num_triangles,
                                psf_mesh** out) {
  return guarded([&] {
    require(out != nullptr && xy != nullptr && triangles != nullptr, "null argument");
    require(num_vertices >= 3 && num_triangles >= 1, "mesh needs at least one triangle");
    std::vector<Point2> v(static_cast<std::size_t>(num_vertices));
    for (int i = 0; i < num_vertices; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
    std::vector<std::array<int, 3>> t(static_cast<std::size_t>(num_triangles));
    for (int k = 0; k < num_triangles; ++k) t[k] = {triangles[3 * k], triangles[3 * k + 1], triangles[3 * k + 2]};
    MacroMesh mesh(std::move(v), std::move(t));
    PSMesh ps = split(mesh);
    *out = new psf_mesh{std::move(mesh), std::move(ps)};
  });
}

psf_status psf_mesh_info_get(const psf_mesh* mesh, psf_mesh_info* out) {
  return guarded([&] {
    require(mesh != nullptr && out != nullptr, "null argument");
    const MacroMesh& m = mesh->mesh;
    const int z0 = default_z0(m);
    const VelocityBasis basis(mesh->ps, z0);
    const PressureBasis pressure = build_pressure_basis(mesh->ps, kruskal_tree(m, z0));
    *out = psf_mesh_info{m.num_vertices(),
                         m.num_interior_vertices(),
                         m.num_edges(),
                         m.num_interior_edges(),
                         m.num_triangles(),
                         mesh->ps.num_vertices(),
                         mesh->ps.num_subtriangles(),
                         basis.size(),
                         basis.interior_size(),
                         pressure.size(),
                         z0,
                         m.max_diameter(),
                         mesh->ps.max_subtriangle_diameter()};
  });
}

psf_status psf_mesh_save(const psf_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh != nullptr, "null mesh");
    auto out = open_output(path);
    write_mesh(mesh->mesh, out);
  });
}

void psf_mesh_free(psf_mesh* mesh) { delete mesh; }

psf_status psf_solve(const psf_mesh* mesh, psf_formulation formulation, double nu, int with_pressure,
                     psf_result** out) {
  return guarded([&] {
    require(mesh != nullptr && out != nullptr, "null argument");
    require(nu > 0.0, "viscosity must be positive");
    const PSMesh& ps = mesh->ps;
    const ManufacturedSolution m = manufactured_solution(nu);
    auto r = std::make_unique<psf_result>();
    r->subtriangles = ps.num_subtriangles();
    if (formulation == PSF_SADDLE_POINT) {
      SaddlePointResult sp = solve_saddle_point(ps, m.data());
      r->dof_v = sp.dofs.velocity_dofs();
      r->dof_p = sp.pressure_basis.size();
      r->t_assemble = sp.t_assemble;
      r->t_solve = sp.t_solve;
      r->audit = divergence_audit(ps, sp.velocity);
      r->velocity = std::move(sp.velocity);
      r->pressure = std::move(sp.pressure);
    } else {
      require(formulation == PSF_SOLENOIDAL, "unknown formulation");
      SolVelocityResult v = solve_sol_velocity(ps, m.data());
      r->dof_v = v.system.dimension();
      r->t_assemble = v.t_assemble;
      r->t_solve = v.t_solve;
      r->audit = divergence_audit(ps, v.velocity_local);
      if (with_pressure) {
        SolPressureResult p = solve_sol_pressure(ps, m.data(), v.velocity);
        r->dof_p = p.system.dimension();
        r->t_assemble += p.t_assemble;
        r->t_solve += p.t_solve;
        r->pressure = std::move(p.pressure);
      }
      r->velocity = std::move(v.velocity);
    }
    r->errors = error_norms(ps, r->velocity, r->pressure, m.u, m.grad_u, m.p);
    *out = r.release();
  });
}

psf_status psf_result_info_get(const psf_result* result, psf_result_info* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    *out = psf_result_info{result->dof_v,
                           result->dof_p,
                           result->errors.l2_u,
                           result->errors.h1_u,
                           result->pressure.empty() ? kNaN : result->errors.l2_p,
                           result->audit.max_divergence,
                           result->audit.max_gradient,
                           result->t_assemble,
                           result->t_solve,
                           static_cast<int>(result->velocity.size()),
                           result->subtriangles};
  });
}

psf_status psf_result_velocity(const psf_result* result, double* out, int capacity) {
  psf_status s = guarded([&] { require(result != nullptr && out != nullptr, "null argument"); });
  if (s != PSF_OK) return s;
  const std::size_t needed = 2 * result->velocity.size();
  if (capacity < 0 || static_cast<std::size_t>(capacity) < needed) {
    return fail(PSF_BUFFER_TOO_SMALL, "velocity needs " + std::to_string(needed) + " doubles");
  }
  for (std::size_t i = 0; i < result->velocity.size(); ++i) {
    out[2 * i] = result->velocity[i].x;
    out[2 * i + 1] = result->velocity[i].y;
  }
  return PSF_OK;
}

psf_status psf_result_pressure(const psf_result* result, double* out, int capacity) {
  psf_status s = guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    require(!result->pressure.empty(), "no pressure was computed");
  });
  if (s != PSF_OK) return s;
  if (capacity < 0 || static_cast<std::size_t>(capacity) < result->pressure.size()) {
    return fail(PSF_BUFFER_TOO_SMALL, "pressure needs " + std::to_string(result->pressure.size()) + " doubles");
  }
  std::copy(result->pressure.begin(), result->pressure.end(), out);
  return PSF_OK;
}

void psf_result_free(psf_result* result) { delete result; }

psf_status psf_convergence_run(const psf_convergence_config* config, psf_convergence** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    require(config->num_sizes >= 0 && config->num_mesh_files >= 0, "negative count");
    require(config->num_sizes == 0 || config->sizes != nullptr, "null size list");
    require(config->num_mesh_files == 0 || config->mesh_files != nullptr, "null mesh file list");
    ConvergenceConfig c;
    c.sizes.assign(config->sizes, config->sizes + config->num_sizes);
    for (int i = 0; i < config->num_mesh_files; ++i) {
      require(config->mesh_files[i] != nullptr, "null mesh file name");
      c.mesh_files.emplace_back(config->mesh_files[i]);
    }
    c.nu = config->nu;
    c.with_pressure = config->with_pressure != 0;
    c.with_condition = config->with_condition != 0;
    require(config->formulation == PSF_SOLENOIDAL || config->formulation == PSF_SADDLE_POINT,
            "unknown formulation");
    const Formulation f =
        config->formulation == PSF_SADDLE_POINT ? Formulation::kSaddlePoint : Formulation::kSolenoidal;
    *out = new psf_convergence{run_convergence(c, f)};
  });
}

int psf_convergence_size(const psf_convergence* study) {
  return study ? static_cast<int>(study->rows.size()) : 0;
}

psf_status psf_convergence_row_get(const psf_convergence* study, int i, psf_convergence_row* out) {
  return guarded([&] {
    require(study != nullptr && out != nullptr, "null argument");
    require(i >= 0 && i < static_cast<int>(study->rows.size()), "row index out of range");
    const ConvergenceRow& r = study->rows[i];
    *out = psf_convergence_row{r.mesh_n,
                               r.h_macro,
                               r.h_split,
                               r.dof_v,
                               r.dof_p,
                               r.errors.l2_u,
                               r.errors.h1_u,
                               value_or_nan(r.rate_u_h1),
                               r.has_pressure ? r.errors.l2_p : kNaN,
                               value_or_nan(r.rate_p_l2),
                               r.div_audit,
                               r.grad_max,
                               r.t_assemble,
                               r.t_solve,
                               value_or_nan(r.condition)};
  });
}

psf_status psf_convergence_write_csv(const psf_convergence* study, const char* path) {
  return guarded([&] {
    require(study != nullptr, "null study");
    auto out = open_output(path);
    write_convergence_csv(out, study->rows);
  });
}

void psf_convergence_free(psf_convergence* study) { delete study; }

psf_status psf_check_run(const psf_mesh* mesh, psf_fault fault, psf_check_report** out) {
  return guarded([&] {
    require(mesh != nullptr && out != nullptr, "null argument");
    Fault f = Fault::kNone;
    switch (fault) {
      case PSF_FAULT_NONE: break;
      case PSF_FAULT_SKIP_EXCLUSION: f = Fault::kSkipExclusion; break;
      case PSF_FAULT_FLIP_MOMENT_SIGN: f = Fault::kFlipMomentSign; break;
      default: require(false, "unknown fault");
    }
    *out = new psf_check_report{run_check(mesh->mesh, f)};
  });
}

int psf_check_passed(const psf_check_report* report) { return report && report->report.passed() ? 1 : 0; }

int psf_check_size(const psf_check_report* report) {
  return report ? static_cast<int>(report->report.families.size()) : 0;
}

psf_status psf_check_family_get(const psf_check_report* report, int i, psf_check_family* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    require(i >= 0 && i < psf_check_size(report), "family index out of range");
    const CheckFamily& f = report->report.families[i];
    *out = psf_check_family{f.name.c_str(), f.checks, f.failures, f.worst, f.first_failure.c_str()};
  });
}

void psf_check_free(psf_check_report* report) { delete report; }

psf_status psf_bench_run(const int* sizes, int num_sizes, int repeats, double nu, psf_bench** out) {
  return guarded([&] {
    require(out != nullptr && sizes != nullptr && num_sizes > 0, "empty size list");
    BenchConfig c;
    c.sizes.assign(sizes, sizes + num_sizes);
    c.repeats = repeats;
    c.nu = nu;
    *out = new psf_bench{run_bench(c)};
  });
}

int psf_bench_size(const psf_bench* bench) { return bench ? static_cast<int>(bench->rows.size()) : 0; }

psf_status psf_bench_row_get(const psf_bench* bench, int i, psf_bench_row* out) {
  return guarded([&] {
    require(bench != nullptr && out != nullptr, "null argument");
    require(i >= 0 && i < psf_bench_size(bench), "row index out of range");
    const BenchRow& r = bench->rows[i];
    *out = psf_bench_row{r.mesh_n,          r.split_vertices,        r.dof_sol_v,
                         r.dof_sol_p,       r.dof_sp,                phase(r.sol_velocity),
                         phase(r.sol_pressure), phase(r.saddle_point)};
  });
}

psf_status psf_bench_write_csv(const psf_bench* bench, const char* path) {
  return guarded([&] {
    require(bench != nullptr, "null bench");
    auto out = open_output(path);
    write_bench_csv(out, bench->rows);
  });
}

void psf_bench_free(psf_bench* bench) { delete bench; }

psf_status psf_dump_basis(const psf_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh != nullptr, "null mesh");
    const VelocityBasis basis(mesh->ps, default_z0(mesh->mesh));
    auto out = open_output(path);
    write_basis_csv(out, mesh->ps, basis);
  });
}

psf_status psf_dump_tree(const psf_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh != nullptr, "null mesh");
    const SpanningTree tree = kruskal_tree(mesh->mesh, default_z0(mesh->mesh));
    auto out = open_output(path);
    write_tree_csv(out, mesh->mesh, tree);
  });
}

psf_status psf_parse_sizes(const char* text, int* out, int capacity, int* count) {
  std::vector<int> sizes;
  psf_status s = guarded([&] {
    require(text != nullptr && count != nullptr, "null argument");
    sizes = parse_size_list(text);
  });
  if (s != PSF_OK) return s;
  *count = static_cast<int>(sizes.size());
  if (capacity < *count || (out == nullptr && *count > 0)) {
    return fail(PSF_BUFFER_TOO_SMALL, "size list has " + std::to_string(*count) + " entries");
  }
  std::copy(sizes.begin(), sizes.end(), out);
  return PSF_OK;
}

}  // extern "C"
