#include "psflow/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "psflow/error.hpp"
#include "psflow/quadrature.hpp"

namespace psflow {

namespace {

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string exact(double value) { return format("%.17g", value); }
std::string seconds(double value) { return format("%.6e", value); }
std::string optional_exact(const std::optional<double>& value) { return value ? format("%.6f", *value) : ""; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

struct MeshCase {
  std::string label;
  int n = 0;
  MacroMesh mesh;
};

std::vector<MeshCase> mesh_cases(const ConvergenceConfig& config) {
  std::vector<MeshCase> out;
  for (int n : config.sizes) out.push_back({"n=" + std::to_string(n), n, generate_structured(n)});
  if (config.sizes.empty()) {
    for (const auto& path : config.mesh_files) out.push_back({path.string(), 0, load_mesh(path)});
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "no meshes configured");
  return out;
}

ConvergenceRow solve_case(const MeshCase& c, const ConvergenceConfig& config, Formulation formulation) {
  const PSMesh ps = split(c.mesh);
  const ManufacturedSolution m = manufactured_solution(config.nu);
  RunOptions options;
  options.solve = config.solve;

  ConvergenceRow row;
  row.mesh = c.label;
  row.mesh_n = c.n;
  row.h_macro = c.mesh.max_diameter();
  row.h_split = ps.max_subtriangle_diameter();

  PressureField pressure;
  DivergenceAudit audit;
  if (formulation == Formulation::kSolenoidal) {
    SolVelocityResult v = solve_sol_velocity(ps, m.data(), options);
    row.dof_v = v.system.dimension();
    row.t_assemble = v.t_assemble;
    row.t_solve = v.t_solve;
    audit = divergence_audit(ps, v.velocity_local);
    if (config.with_condition) row.condition = condition_estimate(v.system);
    if (config.with_pressure) {
      SolPressureResult p = solve_sol_pressure(ps, m.data(), v.velocity, options);
      row.dof_p = p.system.dimension();
      row.t_assemble += p.t_assemble;
      row.t_solve += p.t_solve;
      pressure = std::move(p.pressure);
      row.has_pressure = true;
    }
    row.errors = error_norms(ps, v.velocity, pressure, m.u, m.grad_u, m.p);
  } else {
    SaddlePointResult sp = solve_saddle_point(ps, m.data(), options);
    row.dof_v = sp.dofs.velocity_dofs();
    row.dof_p = sp.pressure_basis.size();
    row.t_assemble = sp.t_assemble;
    row.t_solve = sp.t_solve;
    audit = divergence_audit(ps, sp.velocity);
    if (config.with_condition) row.condition = condition_estimate(sp.system);
    row.has_pressure = true;
    row.errors = error_norms(ps, sp.velocity, sp.pressure, m.u, m.grad_u, m.p);
  }
  row.div_audit = audit.max_divergence;
  row.grad_max = audit.max_gradient;
  return row;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config, Formulation formulation) {
  if (!(config.nu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "viscosity must be positive");
  std::vector<ConvergenceRow> rows;
  for (const MeshCase& c : mesh_cases(config)) {
    try {
      rows.push_back(solve_case(c, config, formulation));
    } catch (const Error& e) {
      throw Error(e.code(), "mesh " + c.label + ": " + e.what());
    }
  }
  attach_rates(rows);
  return rows;
}

void attach_rates(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const ConvergenceRow& coarse = rows[i - 1];
    ConvergenceRow& fine = rows[i];
    const double ratio = coarse.h_macro / fine.h_macro;
    if (std::abs(ratio - 2.0) > 1e-9) continue;
    fine.rate_u_h1 = std::log2(coarse.errors.h1_u / fine.errors.h1_u);
    if (coarse.has_pressure && fine.has_pressure) fine.rate_p_l2 = std::log2(coarse.errors.l2_p / fine.errors.l2_p);
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "# times in seconds; t_assemble includes basis construction; div_audit = max |div u_h| over subtriangles\n";
  out << "mesh_n,h_macro,h_split,dof_v,dof_p,err_u_l2,err_u_h1,rate_u_h1,err_p_l2,rate_p_l2,div_audit,t_assemble,"
         "t_solve\n";
  for (const ConvergenceRow& r : rows) {
    out << r.mesh_n << ',' << exact(r.h_macro) << ',' << exact(r.h_split) << ',' << r.dof_v << ','
        << (r.has_pressure ? std::to_string(r.dof_p) : "") << ',' << exact(r.errors.l2_u) << ','
        << exact(r.errors.h1_u) << ',' << optional_exact(r.rate_u_h1) << ','
        << (r.has_pressure ? exact(r.errors.l2_p) : "") << ',' << optional_exact(r.rate_p_l2) << ','
        << format("%.6e", r.div_audit) << ',' << seconds(r.t_assemble) << ',' << seconds(r.t_solve) << '\n';
  }
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows) {
  auto out = open_output(path);
  write_convergence_csv(out, rows);
}

std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

// ---------------------------------------------------------------------------
// Invariant checks

bool CheckReport::passed() const {
  return std::all_of(families.begin(), families.end(), [](const CheckFamily& f) { return f.passed(); });
}

const CheckFamily* CheckReport::find(const std::string& name) const {
  for (const auto& f : families) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

class FamilyRecorder {
 public:
  explicit FamilyRecorder(std::string name) { family_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++family_.checks;
    if (ok) return;
    if (family_.failures++ == 0) family_.first_failure = what;
  }

  // Pass when defect <= tol.
  void bound(double defect, double tol, const std::string& what) {
    family_.worst = std::max(family_.worst, std::isfinite(defect) ? defect : INFINITY);
    expect(defect <= tol, what + " (defect " + format("%.3e", defect) + ")");
  }

  CheckFamily take() { return std::move(family_); }

 private:
  CheckFamily family_;
};

int local_index(const std::array<int, 3>& t, int v) {
  return static_cast<int>(std::find(t.begin(), t.end(), v) - t.begin());
}

double table_max(const LocalTable& t) {
  double m = 0.0;
  for (const Vec2& v : t) m = std::max(m, norm(v));
  return m;
}

CheckFamily check_mesh(const MacroMesh& mesh) {
  FamilyRecorder r("mesh");
  r.expect(mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles() == 1, "Euler identity V - E + T = 1");
  r.expect(static_cast<int>(mesh.boundary_vertices().size()) == mesh.num_exterior_vertices(),
           "boundary cycle visits every exterior vertex");
  r.expect(mesh.num_exterior_edges() == mesh.num_exterior_vertices(), "one boundary cycle");
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto p = mesh.triangle_points(k);
    r.expect(signed_area2(p[0], p[1], p[2]) > 0.0, "triangle " + std::to_string(k) + " counter-clockwise");
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const VertexStar star = vertex_star(mesh, v);
    const bool ok = star.cyclic ? star.triangles.size() == star.edges.size()
                                : star.edges.size() == star.triangles.size() + 1;
    r.expect(ok && star.cyclic == !mesh.vertex_exterior(v), "star of vertex " + std::to_string(v));
  }
  return r.take();
}

CheckFamily check_split(const PSMesh& ps) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("split");
  r.expect(ps.num_vertices() == mesh.num_vertices() + mesh.num_edges() + mesh.num_triangles(), "split vertex count");
  r.expect(ps.num_subtriangles() == kSubtrianglesPerMacro * mesh.num_triangles(), "subtriangle count");
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    double sum = 0.0;
    for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
      const int s = ps.subtriangle_index(k, i);
      const auto p = ps.subtriangle_points(s);
      r.expect(signed_area2(p[0], p[1], p[2]) > 0.0, "subtriangle " + std::to_string(s) + " counter-clockwise");
      sum += ps.subtriangle_area(s);
    }
    r.bound(std::abs(sum - mesh.triangle_area(k)) / mesh.triangle_area(k), 1e-12,
            "subtriangle areas of macro-triangle " + std::to_string(k));
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    r.expect(verify_singular(ps, ps.singular_vertex(e)), "singular vertex of edge " + std::to_string(e));
  }
  return r.take();
}

CheckFamily check_dimensions(const PSMesh& ps, const VelocityBasis& basis, const PressureBasis& pressure,
                             const SpanningTree& tree) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("dimensions");
  const int nv = mesh.num_vertices(), nvi = mesh.num_interior_vertices();
  const int nt = mesh.num_triangles(), nei = mesh.num_interior_edges(), nee = mesh.num_exterior_edges();
  r.expect(basis.size() == 3 * nv - 1,
           "|B| = " + std::to_string(basis.size()) + ", expected 3|V| - 1 = " + std::to_string(3 * nv - 1));
  r.expect(basis.interior_size() == 3 * nvi, "|B0| = " + std::to_string(basis.interior_size()) +
                                                 ", expected 3|V_int| = " + std::to_string(3 * nvi));
  r.expect(pressure.size() == 2 * nt + 2 * nei - nvi, "|S| = 2|T| + 2|E_int| - |V_int|");
  r.expect(pressure.size() == 3 * nei + nee - 1, "|S| = 3|E_int| + |E_ext| - 1");
  r.expect(static_cast<int>(tree.edges.size()) == nvi, "tree has |V_int| edges");
  return r.take();
}

CheckFamily check_basis_divergence(const PSMesh& ps, const VelocityBasis& basis) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("basis-divergence");
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto pts = ps.local_coordinates(k);
    const auto& t = mesh.triangles()[k];
    for (int j = 0; j < 3; ++j) {
      for (int kind = 0; kind < 3; ++kind) {
        if (basis.dof(t[j], kind) < 0) continue;
        const LocalTable& phi = basis.table(k, j, kind);
        double div = 0.0, grad = 0.0;
        for (int i = 0; i < kSubtrianglesPerMacro; ++i) {
          const auto l = local_subtriangle(i);
          const std::array<Point2, 3> p = {pts[l[0]], pts[l[1]], pts[l[2]]};
          const std::array<Vec2, 3> v = {phi[l[0]], phi[l[1]], phi[l[2]]};
          div = std::max(div, std::abs(div_integral(p, v)) / triangle_area(p[0], p[1], p[2]));
          const Mat2 g = linear_gradient(p, v);
          grad = std::max({grad, std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
        }
        r.bound(div / grad, 1e-10,
                "divergence of (" + std::to_string(t[j]) + "," + std::to_string(kind) + ") on " + std::to_string(k));
      }
    }
  }
  return r.take();
}

CheckFamily check_basis_dofs(const PSMesh& ps, const VelocityBasis& basis) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("basis-dofs");
  constexpr std::array<Vec2, 3> kCenterValue = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{0.0, 0.0}};
  constexpr std::array<double, 3> kMoment = {0.0, 0.0, 1.0};
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto pts = ps.local_coordinates(k);
    const auto& t = mesh.triangles()[k];
    for (int j = 0; j < 3; ++j) {
      const int a = (j + 1) % 3, b = (j + 2) % 3;
      for (int kind = 0; kind < 3; ++kind) {
        if (basis.dof(t[j], kind) < 0) continue;
        const LocalTable& phi = basis.table(k, j, kind);
        const double scale = std::max(1.0, table_max(phi) * distance(pts[a], pts[b]));
        const std::string id = "(" + std::to_string(t[j]) + "," + std::to_string(kind) + ") on " + std::to_string(k);
        double defect = norm(phi[j] - kCenterValue[kind]);
        defect = std::max({defect, norm(phi[a]), norm(phi[b]), norm(phi[edge_point(a)])});
        r.bound(defect / scale, 1e-10, "nodal values of " + id);
        for (int w : {a, b}) {
          const Vec2 n = rot90(pts[w] - pts[j]) / distance(pts[j], pts[w]);
          const int s = w == a ? edge_point(j) : edge_point(b);
          const double m = segment_flux(pts[j], pts[s], pts[w], phi[j], phi[s], phi[w], n);
          r.bound(std::abs(m - kMoment[kind]) / scale, 1e-10, "edge moment of " + id);
        }
      }
    }
  }
  return r.take();
}

CheckFamily check_basis_continuity(const PSMesh& ps, const VelocityBasis& basis) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("basis-continuity");
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_exterior(e)) continue;
    const MacroEdge& edge = mesh.edges()[e];
    const int ka = edge.triangles[0], kb = edge.triangles[1];
    const std::array<int, 3> shared = {edge.vertices[0], edge.vertices[1], ps.singular_vertex(e)};
    for (int v : edge.vertices) {
      const int ja = local_index(mesh.triangles()[ka], v), jb = local_index(mesh.triangles()[kb], v);
      for (int kind = 0; kind < 3; ++kind) {
        if (basis.dof(v, kind) < 0) continue;
        const LocalTable& ta = basis.table(ka, ja, kind);
        const LocalTable& tb = basis.table(kb, jb, kind);
        const double scale = std::max(table_max(ta), table_max(tb));
        double defect = 0.0;
        for (int sv : shared) {
          const auto& la = ps.local_points(ka);
          const auto& lb = ps.local_points(kb);
          const int pa = static_cast<int>(std::find(la.begin(), la.end(), sv) - la.begin());
          const int pb = static_cast<int>(std::find(lb.begin(), lb.end(), sv) - lb.begin());
          defect = std::max(defect, norm(ta[pa] - tb[pb]));
        }
        r.bound(defect / scale, 1e-10,
                "continuity of (" + std::to_string(v) + "," + std::to_string(kind) + ") across edge " +
                    std::to_string(e));
      }
    }
  }
  return r.take();
}

double max_abs(const PressureField& q) {
  double m = 0.0;
  for (double x : q) m = std::max(m, std::abs(x));
  return m;
}

CheckFamily check_pressure_membership(const PSMesh& ps, const PressureBasis& pressure, int random_fields) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("pressure-membership");
  auto check_field = [&](const PressureField& q, const std::string& what) {
    const double scale = std::max(max_abs(q), 1e-300);
    double worst = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) worst = std::max(worst, std::abs(theta(ps, q, ps.singular_vertex(e))));
    r.bound(worst / scale, 1e-12, "theta of " + what);
  };
  for (int i = 0; i < pressure.size(); ++i) {
    check_field(divergence_field(ps, pressure.functions[i]), "pressure function " + std::to_string(i));
  }
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < random_fields; ++trial) {
    NodalField v(static_cast<std::size_t>(ps.num_vertices()), Vec2{0.0, 0.0});
    for (int p = 0; p < ps.num_vertices(); ++p) {
      if (!ps.vertex_exterior(p)) v[p] = {unit(rng), unit(rng)};
    }
    check_field(divergence(ps, v), "random interior field " + std::to_string(trial));
  }
  return r.take();
}

CheckFamily check_tree(const MacroMesh& mesh, const SpanningTree& tree) {
  FamilyRecorder r("spanning-tree");
  r.expect(mesh.vertex_exterior(tree.root), "root is exterior");
  DisjointSet components(mesh.num_vertices());
  int previous_depth = 0;
  for (int e : tree.edges) {
    const auto& ev = mesh.edges()[e].vertices;
    r.expect(!mesh.edge_exterior(e), "tree edge " + std::to_string(e) + " is interior");
    r.expect(components.unite(ev[0], ev[1]), "tree edge " + std::to_string(e) + " closes no cycle");
    const int child = tree.parent_edge[ev[0]] == e ? ev[0] : ev[1];
    r.expect(tree.depth[child] >= previous_depth, "tree edges ordered by depth");
    previous_depth = tree.depth[child];
  }
  for (int v : tree.nodes) {
    r.expect(tree.depth[v] >= 0 && components.find(v) == components.find(tree.root),
             "vertex " + std::to_string(v) + " reached from the root");
  }
  return r.take();
}

CheckFamily check_boundary(const PSMesh& ps, const VelocityBasis& basis, const VectorFunction& g, Fault fault) {
  const MacroMesh& mesh = ps.macro();
  FamilyRecorder r("boundary-interpolant");
  InterpolantOptions options;
  if (fault == Fault::kFlipMomentSign) {
    // Flip the first edge whose moment is not zero, otherwise the fault is invisible.
    const BoundaryInterpolant clean = interpolate_boundary(ps, basis, g);
    for (std::size_t k = 0; k + 1 < clean.moments.size(); ++k) {
      if (std::abs(clean.moments[k]) > 1e-6) {
        options.flipped_edge = static_cast<int>(k);
        break;
      }
    }
  }
  const BoundaryInterpolant gh = interpolate_boundary(ps, basis, g, options);
  const NodalField field = expand(ps, basis, gh);

  double gmax = 0.0;
  for (int v : gh.vertices) gmax = std::max(gmax, norm(g(mesh.vertex(v))));
  const double scale = std::max(gmax, 1.0);
  for (int v : gh.vertices) {
    r.bound(norm(field[v] - g(mesh.vertex(v))) / scale, 1e-10, "value at boundary vertex " + std::to_string(v));
  }
  // Independent quadrature: 8-point Gauss-Legendre per sub-edge.
  const auto& rule = gauss_legendre(8);
  double compatibility = 0.0;
  for (std::size_t k = 0; k < gh.edges.size(); ++k) {
    const int e = gh.edges[k];
    const Vec2 n = outward_normal(mesh, e);
    const Point2 p = mesh.vertex(gh.vertices[k]);
    const Point2 q = mesh.vertex(gh.vertices[(k + 1) % gh.vertices.size()]);
    const int sv = ps.singular_vertex(e);
    const Point2 s = ps.vertex(sv);
    auto flux = [&](Point2 x) { return dot(g(x), n); };
    const double exact = integrate_segment(rule, p, s, flux) + integrate_segment(rule, s, q, flux);
    compatibility += exact;
    const double discrete = segment_flux(p, s, q, field[gh.vertices[k]], field[sv],
                                         field[gh.vertices[(k + 1) % gh.vertices.size()]], n);
    r.bound(std::abs(discrete - exact) / (scale * distance(p, q)), 1e-10, "moment on boundary edge " + std::to_string(e));
  }
  r.bound(std::abs(compatibility), 1e-10, "net boundary flux");
  r.bound(max_abs_divergence(ps, field) / std::max(max_abs_gradient(ps, field), 1e-300), 1e-10,
          "divergence of the interpolant");
  return r.take();
}

CheckFamily check_matrices(const PSMesh& ps, const VelocityBasis& basis, const PressureBasis& pressure,
                           const ManufacturedSolution& m, int dense_limit) {
  FamilyRecorder r("spd");
  const NodalField boundary = expand(ps, basis, interpolate_boundary(ps, basis, m.u));
  const LinearSystem a = assemble_velocity(ps, basis, boundary, m.f, m.nu);
  const LinearSystem p = assemble_pressure(ps, pressure, boundary, m.f, m.nu);
  const LinearSystem sp = assemble_saddle_point(ps, interior_nodal_dofs(ps), pressure, boundary, m.f, m.nu);
  r.bound(symmetry_defect(a.matrix), 1e-12, "velocity matrix symmetry");
  r.bound(symmetry_defect(p.matrix), 1e-12, "pressure matrix symmetry");
  r.bound(symmetry_defect(sp.matrix), 1e-12, "saddle-point matrix symmetry");
  r.expect(a.dimension() == 0 || cholesky_succeeds(a.matrix), "velocity matrix Cholesky");
  r.expect(cholesky_succeeds(p.matrix), "pressure matrix Cholesky");
  for (const LinearSystem* s : {&a, &p}) {
    if (s->dimension() == 0 || s->dimension() > dense_limit) continue;
    const Eigen::VectorXd ev = dense_eigenvalues(s->matrix);
    r.expect(ev.minCoeff() > 0.0, "smallest eigenvalue " + format("%.3e", ev.minCoeff()) + " positive");
  }
  if (p.dimension() <= dense_limit) {
    const int rank = numerical_rank(Eigen::MatrixXd(p.matrix));
    r.expect(rank == p.dimension(), "Gram rank " + std::to_string(rank) + " of " + std::to_string(p.dimension()));
  }
  return r.take();
}

}  // namespace

CheckReport run_check(const MacroMesh& mesh, Fault fault, int dense_limit) {
  CheckReport report;
  const PSMesh ps = split(mesh);
  const int z0 = default_z0(mesh);
  BasisOptions options;
  options.keep_excluded = fault == Fault::kSkipExclusion;
  const VelocityBasis basis(ps, z0, options);
  const SpanningTree tree = kruskal_tree(mesh, z0);
  const PressureBasis pressure = build_pressure_basis(ps, tree);
  const ManufacturedSolution m = manufactured_solution(1.0);

  report.families.push_back(check_mesh(mesh));
  report.families.push_back(check_split(ps));
  report.families.push_back(check_dimensions(ps, basis, pressure, tree));
  report.families.push_back(check_basis_divergence(ps, basis));
  report.families.push_back(check_basis_dofs(ps, basis));
  report.families.push_back(check_basis_continuity(ps, basis));
  report.families.push_back(check_pressure_membership(ps, pressure, 100));
  report.families.push_back(check_tree(mesh, tree));
  report.families.push_back(check_boundary(ps, basis, m.u, fault));
  report.families.push_back(check_matrices(ps, basis, pressure, m, dense_limit));
  return report;
}

// ---------------------------------------------------------------------------
// Timing

TimingStats timing_stats(const std::vector<double>& samples) {
  TimingStats s;
  if (samples.empty()) return s;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return s;
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeat count must be at least 1");
  if (!(config.nu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "viscosity must be positive");
  const ManufacturedSolution m = manufactured_solution(config.nu);
  RunOptions options;
  options.solve = config.solve;
  std::vector<BenchRow> rows;
  for (int n : config.sizes) {
    const PSMesh ps = split(generate_structured(n));
    BenchRow row;
    row.mesh_n = n;
    row.split_vertices = ps.num_vertices();
    std::array<std::vector<double>, 9> samples;
    // One untimed pass warms caches and allocators.
    for (int rep = -1; rep < config.repeats; ++rep) {
      const SolVelocityResult v = solve_sol_velocity(ps, m.data(), options);
      const SolPressureResult p = solve_sol_pressure(ps, m.data(), v.velocity, options);
      const SaddlePointResult sp = solve_saddle_point(ps, m.data(), options);
      row.dof_sol_v = v.system.dimension();
      row.dof_sol_p = p.system.dimension();
      row.dof_sp = sp.system.dimension();
      if (rep < 0) continue;
      const std::array<double, 9> t = {v.t_assemble,  v.t_solve,  v.t_assemble + v.t_solve,
                                       p.t_assemble,  p.t_solve,  p.t_assemble + p.t_solve,
                                       sp.t_assemble, sp.t_solve, sp.t_assemble + sp.t_solve};
      for (int i = 0; i < 9; ++i) samples[i].push_back(t[i]);
    }
    row.sol_velocity = {timing_stats(samples[0]), timing_stats(samples[1]), timing_stats(samples[2])};
    row.sol_pressure = {timing_stats(samples[3]), timing_stats(samples[4]), timing_stats(samples[5])};
    row.saddle_point = {timing_stats(samples[6]), timing_stats(samples[7]), timing_stats(samples[8])};
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "# times in seconds, mean and sample standard deviation over repeats; assemble includes basis construction\n";
  out << "mesh_n,split_vertices,dof_sol_v,dof_sol_p,dof_sp";
  for (const char* phase : {"sol_v", "sol_p", "sp"}) {
    for (const char* part : {"assemble", "solve", "total"}) out << ',' << phase << '_' << part << "_mean," << phase << '_' << part << "_std";
  }
  out << '\n';
  for (const BenchRow& r : rows) {
    out << r.mesh_n << ',' << r.split_vertices << ',' << r.dof_sol_v << ',' << r.dof_sol_p << ',' << r.dof_sp;
    for (const PhaseTimes* phase : {&r.sol_velocity, &r.sol_pressure, &r.saddle_point}) {
      for (const TimingStats* s : {&phase->assemble, &phase->solve, &phase->total}) {
        out << ',' << seconds(s->mean) << ',' << seconds(s->stddev);
      }
    }
    out << '\n';
  }
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  auto out = open_output(path);
  write_bench_csv(out, rows);
}

void write_basis_csv(std::ostream& out, const PSMesh& ps, const VelocityBasis& basis) {
  const MacroMesh& mesh = ps.macro();
  out << "dof,vertex,kind,macro_triangle,point,split_vertex,x,y,vx,vy\n";
  for (int dof = 0; dof < basis.size(); ++dof) {
    const BasisFunctionId id = basis.functions()[dof];
    for (int k : mesh.vertex_triangles(id.vertex)) {
      const int j = local_index(mesh.triangles()[k], id.vertex);
      const LocalTable& table = basis.table(k, j, id.kind);
      const auto& lp = ps.local_points(k);
      for (int p = 0; p < kLocalPoints; ++p) {
        const Point2 x = ps.vertex(lp[p]);
        out << dof << ',' << id.vertex << ',' << id.kind << ',' << k << ',' << p << ',' << lp[p] << ',' << exact(x.x)
            << ',' << exact(x.y) << ',' << exact(table[p].x) << ',' << exact(table[p].y) << '\n';
      }
    }
  }
}

void write_tree_csv(std::ostream& out, const MacroMesh& mesh, const SpanningTree& tree) {
  out << "order,edge,parent,child,depth\n";
  for (std::size_t i = 0; i < tree.edges.size(); ++i) {
    const int e = tree.edges[i];
    const auto& ev = mesh.edges()[e].vertices;
    const int child = tree.parent_edge[ev[0]] == e ? ev[0] : ev[1];
    out << i << ',' << e << ',' << tree.parent[child] << ',' << child << ',' << tree.depth[child] << '\n';
  }
}

std::vector<int> parse_size_list(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw Error(ErrorCode::kInvalidArgument, "bad mesh size '" + s + "' in '" + text + "'");
    return value;
  };
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "empty range '" + text + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty mesh size list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw Error(ErrorCode::kInvalidArgument, "mesh sizes must be positive");
    if (i > 0 && out[i] <= out[i - 1]) throw Error(ErrorCode::kInvalidArgument, "mesh sizes must be strictly increasing");
  }
  return out;
}

}  // namespace psflow
