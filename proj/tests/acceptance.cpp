// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "closed_form_tables.hpp"
#include "mesh_fixtures.hpp"
#include "psflow/driver.hpp"

using namespace psflow;

namespace {

struct Outcome {
  bool passed = false;
  std::string measured;
};

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double max_abs(const NodalField& v) {
  double out = 0.0;
  for (Vec2 x : v) out = std::max({out, std::abs(x.x), std::abs(x.y)});
  return out;
}

double max_abs(const PressureField& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome convergence() {
  const auto start = std::chrono::steady_clock::now();
  ConvergenceConfig config;
  config.sizes = {4, 8, 16, 32};
  config.with_pressure = true;
  const auto rows = run_convergence(config);
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 120.0;
  std::string u, p;
  for (std::size_t i = rows.size() - 2; i < rows.size(); ++i) {
    const double ru = rows[i].rate_u_h1.value_or(NAN), rp = rows[i].rate_p_l2.value_or(NAN);
    ok = ok && std::abs(ru - 1.0) <= 0.15 && std::abs(rp - 1.0) <= 0.15;
    u += format(" %.3f", ru);
    p += format(" %.3f", rp);
  }
  return {ok, "H1 velocity rates" + u + "; L2 pressure rates" + p + format("; %.1f s", elapsed)};
}

Outcome solenoidality() {
  std::vector<std::pair<MacroMesh, double>> cases;
  for (int n : {1, 2, 4, 8, 16, 32}) cases.push_back({generate_structured(n), 1.0});
  cases.push_back({fixtures::jittered_mesh(6), 1.0});
  cases.push_back({fixtures::l_shaped_mesh(4), 1.0});
  cases.push_back({generate_structured(8), 0.01});
  double worst = 0.0;
  for (const auto& [mesh, nu] : cases) {
    const PSMesh ps = split(mesh);
    const auto sol = solve_sol_velocity(ps, manufactured_solution(nu).data());
    worst = std::max(worst, divergence_audit(ps, sol.velocity_local).relative());
  }
  return {worst <= 1e-12, format("worst max|div u_h| / max|grad u_h| = %.2e over %zu solves", worst, cases.size())};
}

Outcome equivalence() {
  double worst_u = 0.0, worst_p = 0.0;
  for (int n : {4, 8}) {
    const PSMesh ps = split(generate_structured(n));
    const StokesData data = manufactured_solution().data();
    const auto vel = solve_sol_velocity(ps, data);
    const auto pre = solve_sol_pressure(ps, data, vel.velocity);
    const auto sp = solve_saddle_point(ps, data);
    double du = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < vel.velocity.size(); ++i) {
      du = std::max({du, std::abs(vel.velocity[i].x - sp.velocity[i].x), std::abs(vel.velocity[i].y - sp.velocity[i].y)});
    }
    for (std::size_t i = 0; i < pre.pressure.size(); ++i) dp = std::max(dp, std::abs(pre.pressure[i] - sp.pressure[i]));
    worst_u = std::max(worst_u, du / max_abs(vel.velocity));
    worst_p = std::max(worst_p, dp / max_abs(pre.pressure));
  }
  return {worst_u <= 1e-8 && worst_p <= 1e-8,
          format("relative velocity difference %.2e, pressure difference %.2e", worst_u, worst_p)};
}

Outcome dimensions() {
  int failures = 0;
  std::string last;
  for (int n = 1; n <= 8; ++n) {
    const MacroMesh m = generate_structured(n);
    const PSMesh ps = split(m);
    const int z0 = default_z0(m);
    const VelocityBasis b(ps, z0);
    const PressureBasis s = build_pressure_basis(ps, kruskal_tree(m, z0));
    const int nv = m.num_vertices(), nvi = m.num_interior_vertices(), nt = m.num_triangles();
    const int nei = m.num_interior_edges(), nee = m.num_exterior_edges();
    const bool ok = b.size() == 3 * nv - 1 && b.interior_size() == 3 * nvi && s.size() == 2 * nt + 2 * nei - nvi &&
                    s.size() == 3 * nei + nee - 1;
    if (!ok) ++failures;
    last = format("n=8: |B|=%d |B0|=%d |S|=%d", b.size(), b.interior_size(), s.size());
  }
  return {failures == 0, format("%d of 8 meshes violate an identity; ", failures) + last};
}

Outcome run_families(const std::vector<std::string>& names, int max_n, std::string* detail = nullptr) {
  int checks = 0, failures = 0;
  double worst = 0.0;
  std::string first;
  for (int n = 1; n <= max_n; ++n) {
    const CheckReport r = run_check(generate_structured(n));
    for (const std::string& name : names) {
      const CheckFamily* f = r.find(name);
      if (!f) {
        ++failures;
        continue;
      }
      checks += f->checks;
      failures += f->failures;
      worst = std::max(worst, f->worst);
      if (first.empty() && !f->passed()) first = format("n=%d %s: ", n, name.c_str()) + f->first_failure;
    }
  }
  if (detail) *detail = first;
  return {failures == 0, format("%d checks, %d failures, worst defect %.2e", checks, failures, worst)};
}

Outcome basis_certification() {
  std::string detail;
  Outcome o = run_families({"basis-divergence", "basis-dofs", "basis-continuity"}, 8, &detail);
  std::vector<ReferenceGeometry> geometries;
  for (const MacroMesh& m : {generate_structured(1), generate_structured(8), fixtures::jittered_mesh(4)}) {
    const PSMesh ps = split(m);
    for (int k = 0; k < m.num_triangles(); ++k) geometries.push_back(reference_geometry(ps, k));
  }
  std::array<double, 3> worst{};
  for (const ReferenceGeometry& g : geometries) {
    for (int j = 0; j < 3; ++j) {
      const auto closed = fixtures::closed_form_reference(g, j);
      const auto solved = reference_basis(g, j);
      for (int i = 0; i < 3; ++i) {
        for (int p = 0; p < kLocalPoints; ++p) worst[j] = std::max(worst[j], norm(closed[i][p] - solved[i][p]));
      }
    }
  }
  o.passed = o.passed && worst[0] <= 1e-10;
  o.measured += format("; first-vertex closed form vs solve %.2e; other vertices %.2e, %.2e (logged)", worst[0],
                       worst[1], worst[2]);
  if (!detail.empty()) o.measured += "; " + detail;
  return o;
}

Outcome pressure_membership() {
  std::string detail;
  Outcome o = run_families({"pressure-membership"}, 8, &detail);
  std::string ranks;
  for (int n = 1; n <= 3; ++n) {
    const MacroMesh m = generate_structured(n);
    const PSMesh ps = split(m);
    const PressureBasis b = build_pressure_basis(ps, kruskal_tree(m, default_z0(m)));
    Eigen::MatrixXd d(ps.num_subtriangles(), b.size());
    for (int i = 0; i < b.size(); ++i) {
      const PressureField q = divergence_field(ps, b.functions[i]);
      for (int s = 0; s < ps.num_subtriangles(); ++s) d(s, i) = q[s] * std::sqrt(ps.subtriangle_area(s));
    }
    const int rank = numerical_rank(d.transpose() * d);
    o.passed = o.passed && rank == b.size();
    ranks += format(" %d/%d", rank, b.size());
  }
  o.measured += "; Gram rank n=1..3:" + ranks;
  if (!detail.empty()) o.measured += "; " + detail;
  return o;
}

Outcome spd() {
  int factorizations = 0, breakdowns = 0;
  double smallest = INFINITY;
  for (int n = 1; n <= 16; ++n) {
    const PSMesh ps = split(generate_structured(n));
    const StokesData data = manufactured_solution().data();
    const auto vel = solve_sol_velocity(ps, data);
    const auto pre = solve_sol_pressure(ps, data, vel.velocity);
    for (const LinearSystem* sys : {&vel.system, &pre.system}) {
      if (sys->dimension() == 0) continue;
      ++factorizations;
      if (!cholesky_succeeds(sys->matrix) || symmetry_defect(sys->matrix) > 1e-14) ++breakdowns;
      if (n <= 3) smallest = std::min(smallest, dense_eigenvalues(sys->matrix).minCoeff());
    }
  }
  return {breakdowns == 0 && smallest > 0.0,
          format("%d factorizations, %d breakdowns; smallest eigenvalue on n<=3 %.3e", factorizations, breakdowns,
                 smallest)};
}

Outcome boundary_interpolant() {
  std::string detail;
  Outcome o = run_families({"boundary-interpolant"}, 8, &detail);
  double worst = 0.0;
  const ManufacturedSolution ms = manufactured_solution();
  for (int n : {1, 4, 8, 16, 32}) {
    const PSMesh ps = split(generate_structured(n));
    const VelocityBasis b(ps, default_z0(ps.macro()));
    worst = std::max(worst, std::abs(interpolate_boundary(ps, b, ms.u).compatibility));
  }
  o.passed = o.passed && worst < 1e-10;
  o.measured += format("; compatibility %.2e", worst);
  if (!detail.empty()) o.measured += "; " + detail;
  return o;
}

Outcome condition_ordering() {
  bool ok = true;
  std::string text;
  for (int n : {4, 8}) {
    const PSMesh ps = split(generate_structured(n));
    const StokesData data = manufactured_solution().data();
    const double sol = condition_estimate(solve_sol_velocity(ps, data).system);
    const double sp = condition_estimate(solve_saddle_point(ps, data).system);
    ok = ok && sol < sp;
    text += format("%sn=%d SOL %.3e SP %.3e ratio %.3f", text.empty() ? "" : "; ", n, sol, sp, sol / sp);
  }
  return {ok, text};
}

Outcome timing_structure() {
  BenchConfig config;
  config.sizes = {8, 16, 32};
  config.repeats = 20;
  const auto rows = run_bench(config);
  const BenchRow& r = rows.back();
  const double sol = r.sol_velocity.solve.mean + r.sol_pressure.solve.mean;
  const double sp = r.saddle_point.solve.mean;
  return {sol <= sp, format("n=%d mean solve over %d repeats: SOL %.3e s (velocity %.3e + pressure %.3e), SP %.3e s",
                            r.mesh_n, config.repeats, sol, r.sol_velocity.solve.mean, r.sol_pressure.solve.mean, sp)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psflow acceptance suite"};
  std::vector<int> only;
  app.add_option("--criterion", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"convergence rates", convergence},
      {"solenoidal velocity", solenoidality},
      {"solenoidal and saddle-point solutions agree", equivalence},
      {"dimension identities", dimensions},
      {"basis certification", basis_certification},
      {"pressure-space membership", pressure_membership},
      {"symmetric positive-definite systems", spd},
      {"boundary interpolant", boundary_interpolant},
      {"condition ordering", condition_ordering},
      {"timing structure", timing_structure},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("[%s] criterion %d: %s: %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].name, o.measured.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
