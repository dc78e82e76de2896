// psflow command-line driver. Talks to the solver only through the C interface.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psflow/psflow.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

int exit_code(psf_status status) {
  switch (status) {
    case PSF_OK: return kExitOk;
    case PSF_INVALID_ARGUMENT:
    case PSF_IO:
    case PSF_PARSE:
    case PSF_NON_CONFORMING:
    case PSF_DEGENERATE:
    case PSF_INCOMPATIBLE_DATA: return kExitInput;
    default: return kExitFailure;
  }
}

int report(psf_status status) {
  std::fprintf(stderr, "psflow: %s: %s\n", psf_status_string(status), psf_last_error());
  return exit_code(status);
}

struct MeshHandle {
  psf_mesh* mesh = nullptr;
  std::string label;
  MeshHandle() = default;
  MeshHandle(const MeshHandle&) = delete;
  MeshHandle(MeshHandle&& o) noexcept : mesh(o.mesh), label(std::move(o.label)) { o.mesh = nullptr; }
  ~MeshHandle() { psf_mesh_free(mesh); }
};

psf_status parse_sizes(const std::string& text, std::vector<int>& out) {
  int count = 0;
  psf_status s = psf_parse_sizes(text.c_str(), nullptr, 0, &count);
  if (s != PSF_BUFFER_TOO_SMALL && s != PSF_OK) return s;
  out.resize(static_cast<std::size_t>(count));
  return psf_parse_sizes(text.c_str(), out.data(), count, &count);
}

psf_status open_meshes(const std::string& sizes, const std::vector<std::string>& files, std::vector<MeshHandle>& out) {
  if (!files.empty()) {
    for (const auto& f : files) {
      MeshHandle h;
      h.label = f;
      if (psf_status s = psf_mesh_load(f.c_str(), &h.mesh); s != PSF_OK) return s;
      out.push_back(std::move(h));
    }
    return PSF_OK;
  }
  std::vector<int> ns;
  if (psf_status s = parse_sizes(sizes, ns); s != PSF_OK) return s;
  for (int n : ns) {
    MeshHandle h;
    h.label = "n=" + std::to_string(n);
    if (psf_status s = psf_mesh_structured(n, &h.mesh); s != PSF_OK) return s;
    out.push_back(std::move(h));
  }
  return PSF_OK;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string rate_text(double r) {
  if (std::isnan(r)) return "    -";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%5.3f", r);
  return buf;
}

void print_study(const psf_convergence* study, const char* title) {
  std::printf("%s\n", title);
  std::printf("%6s %10s %8s %8s %12s %6s %12s %6s %10s %10s %10s\n", "n", "h_split", "dof_v", "dof_p", "err_u_h1",
              "rate", "err_p_l2", "rate", "div_audit", "t_asm", "t_solve");
  for (int i = 0; i < psf_convergence_size(study); ++i) {
    psf_convergence_row r{};
    psf_convergence_row_get(study, i, &r);
    std::printf("%6d %10.4e %8d %8d %12.5e %6s %12.5e %6s %10.2e %10.3e %10.3e\n", r.mesh_n, r.h_split, r.dof_v,
                r.dof_p, r.err_u_h1, rate_text(r.rate_u_h1).c_str(), r.err_p_l2, rate_text(r.rate_p_l2).c_str(),
                r.div_audit, r.t_assemble, r.t_solve);
  }
}

struct ConvergenceArgs {
  std::string sizes = "4,8,16,32";
  std::vector<std::string> meshes;
  double nu = 1.0;
  std::string out = "rates.csv";
  bool with_sp = false;
  bool with_pressure = false;
  bool condition = false;
};

int run_convergence(const ConvergenceArgs& a) {
  std::vector<int> sizes;
  if (a.meshes.empty()) {
    if (psf_status s = parse_sizes(a.sizes, sizes); s != PSF_OK) return report(s);
  }
  std::vector<const char*> files;
  for (const auto& m : a.meshes) files.push_back(m.c_str());

  auto one = [&](psf_formulation f, const std::string& path, const char* title) {
    psf_convergence_config c{sizes.data(), static_cast<int>(sizes.size()), files.data(),
                             static_cast<int>(files.size()), a.nu, a.with_pressure ? 1 : 0, a.condition ? 1 : 0, f};
    psf_convergence* study = nullptr;
    if (psf_status s = psf_convergence_run(&c, &study); s != PSF_OK) return report(s);
    print_study(study, title);
    if (a.condition) {
      for (int i = 0; i < psf_convergence_size(study); ++i) {
        psf_convergence_row r{};
        psf_convergence_row_get(study, i, &r);
        std::printf("  condition estimate n=%d: %.4e\n", r.mesh_n, r.condition);
      }
    }
    psf_status s = psf_convergence_write_csv(study, path.c_str());
    psf_convergence_free(study);
    if (s != PSF_OK) return report(s);
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
  };

  if (int rc = one(PSF_SOLENOIDAL, a.out, "solenoidal formulation"); rc != kExitOk) return rc;
  if (a.with_sp) return one(PSF_SADDLE_POINT, sibling(a.out, "_sp"), "saddle-point formulation");
  return kExitOk;
}

struct CheckArgs {
  std::string sizes = "1..4";
  std::vector<std::string> meshes;
  std::string fault = "none";
};

int run_check(const CheckArgs& a) {
  psf_fault fault = PSF_FAULT_NONE;
  if (a.fault == "skip-exclusion") fault = PSF_FAULT_SKIP_EXCLUSION;
  else if (a.fault == "flip-moment-sign") fault = PSF_FAULT_FLIP_MOMENT_SIGN;
  std::vector<MeshHandle> meshes;
  if (psf_status s = open_meshes(a.sizes, a.meshes, meshes); s != PSF_OK) return report(s);
  bool all = true;
  for (const MeshHandle& m : meshes) {
    psf_check_report* rep = nullptr;
    if (psf_status s = psf_check_run(m.mesh, fault, &rep); s != PSF_OK) return report(s);
    std::printf("mesh %s\n", m.label.c_str());
    for (int i = 0; i < psf_check_size(rep); ++i) {
      psf_check_family f{};
      psf_check_family_get(rep, i, &f);
      std::printf("  %-4s %-22s %6d checks  worst %.2e", f.failures == 0 ? "PASS" : "FAIL", f.name, f.checks, f.worst);
      if (f.failures > 0) std::printf("  %d failed, first: %s", f.failures, f.first_failure);
      std::printf("\n");
    }
    all = all && psf_check_passed(rep);
    psf_check_free(rep);
  }
  std::printf("%s\n", all ? "all invariant families passed" : "invariant check FAILED");
  return all ? kExitOk : kExitFailure;
}

struct BenchArgs {
  std::string sizes = "8,16,32,64";
  int repeats = 20;
  double nu = 1.0;
  std::string out = "times.csv";
};

int run_bench(const BenchArgs& a) {
  std::vector<int> sizes;
  if (psf_status s = parse_sizes(a.sizes, sizes); s != PSF_OK) return report(s);
  psf_bench* bench = nullptr;
  if (psf_status s = psf_bench_run(sizes.data(), static_cast<int>(sizes.size()), a.repeats, a.nu, &bench); s != PSF_OK) {
    return report(s);
  }
  std::printf("%6s %8s %12s %12s %12s %12s\n", "n", "|V|", "sol_v_solve", "sol_p_solve", "sp_solve", "sp/sol");
  for (int i = 0; i < psf_bench_size(bench); ++i) {
    psf_bench_row r{};
    psf_bench_row_get(bench, i, &r);
    const double sol = r.sol_velocity.solve.mean + r.sol_pressure.solve.mean;
    std::printf("%6d %8d %12.4e %12.4e %12.4e %12.2f\n", r.mesh_n, r.split_vertices, r.sol_velocity.solve.mean,
                r.sol_pressure.solve.mean, r.saddle_point.solve.mean, sol > 0 ? r.saddle_point.solve.mean / sol : 0.0);
  }
  psf_status s = psf_bench_write_csv(bench, a.out.c_str());
  psf_bench_free(bench);
  if (s != PSF_OK) return report(s);
  std::printf("wrote %s\n", a.out.c_str());
  return kExitOk;
}

struct DumpArgs {
  int n = 2;
  std::string mesh;
  std::string basis;
  std::string tree;
  std::string mesh_out;
};

int run_dump(const DumpArgs& a) {
  MeshHandle h;
  psf_status s = a.mesh.empty() ? psf_mesh_structured(a.n, &h.mesh) : psf_mesh_load(a.mesh.c_str(), &h.mesh);
  if (s != PSF_OK) return report(s);
  psf_mesh_info info{};
  if ((s = psf_mesh_info_get(h.mesh, &info)) != PSF_OK) return report(s);
  std::printf("macro: %d vertices (%d interior), %d edges (%d interior), %d triangles\n", info.vertices,
              info.interior_vertices, info.edges, info.interior_edges, info.triangles);
  std::printf("split: %d vertices, %d subtriangles, h_macro %.4e, h_split %.4e\n", info.split_vertices,
              info.subtriangles, info.h_macro, info.h_split);
  std::printf("bases: |B| %d, |B0| %d, |S| %d, z0 %d\n", info.velocity_dofs, info.interior_velocity_dofs,
              info.pressure_dofs, info.z0);
  if (!a.basis.empty() && (s = psf_dump_basis(h.mesh, a.basis.c_str())) != PSF_OK) return report(s);
  if (!a.tree.empty() && (s = psf_dump_tree(h.mesh, a.tree.c_str())) != PSF_OK) return report(s);
  if (!a.mesh_out.empty() && (s = psf_mesh_save(h.mesh, a.mesh_out.c_str())) != PSF_OK) return report(s);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free Powell-Sabin Stokes solver"};
  app.set_version_flag("--version", psf_version());
  app.require_subcommand(1);

  ConvergenceArgs conv;
  auto* c = app.add_subcommand("convergence", "Convergence study on the manufactured solution");
  c->add_option("--n", conv.sizes, "Structured mesh sizes, e.g. 4,8,16,32 or 1..4")->capture_default_str();
  c->add_option("--mesh", conv.meshes, "Mesh files (used instead of --n)")->check(CLI::ExistingFile);
  c->add_option("--nu", conv.nu, "Viscosity")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--out", conv.out, "Output CSV")->capture_default_str();
  c->add_flag("--with-sp", conv.with_sp, "Also solve the saddle-point system; writes <out>_sp.csv");
  c->add_flag("--with-pressure", conv.with_pressure, "Also recover the pressure");
  c->add_flag("--condition", conv.condition, "Report condition number estimates");

  CheckArgs chk;
  auto* k = app.add_subcommand("check", "Run every invariant family");
  k->add_option("--n", chk.sizes, "Structured mesh sizes")->capture_default_str();
  k->add_option("--mesh", chk.meshes, "Mesh files (used instead of --n)")->check(CLI::ExistingFile);
  k->add_option("--inject-fault", chk.fault, "Deliberate defect")
      ->check(CLI::IsMember({"none", "skip-exclusion", "flip-moment-sign"}))
      ->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time SOL velocity, SOL pressure and SP");
  b->add_option("--n", bench.sizes, "Structured mesh sizes")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Repeats per mesh")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--nu", bench.nu, "Viscosity")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--out", bench.out, "Output CSV")->capture_default_str();

  DumpArgs dump;
  auto* d = app.add_subcommand("dump", "Mesh statistics and basis/tree tables");
  d->add_option("--n", dump.n, "Structured mesh size")->capture_default_str();
  d->add_option("--mesh", dump.mesh, "Mesh file")->check(CLI::ExistingFile);
  d->add_option("--basis", dump.basis, "Write velocity basis tables to this CSV");
  d->add_option("--tree", dump.tree, "Write the pressure spanning tree to this CSV");
  d->add_option("--mesh-out", dump.mesh_out, "Write the macro mesh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (c->parsed()) return run_convergence(conv);
  if (k->parsed()) return run_check(chk);
  if (b->parsed()) return run_bench(bench);
  return run_dump(dump);
}
