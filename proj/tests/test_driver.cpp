#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mesh_fixtures.hpp"
#include "psflow/driver.hpp"
#include "psflow/error.hpp"

using namespace psflow;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

ConvergenceRow row(double h, double e_u, double e_p) {
  ConvergenceRow r;
  r.h_macro = h;
  r.errors.h1_u = e_u;
  r.errors.l2_p = e_p;
  r.has_pressure = true;
  return r;
}

}  // namespace

TEST(SizeList, CommaAndRange) {
  EXPECT_EQ(parse_size_list("4,8,16"), (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(parse_size_list("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_size_list("7"), std::vector<int>{7});
}

TEST(SizeList, RejectsBadInput) {
  for (const char* bad : {"", "0", "-1", "4,4", "8,4", "a", "3..1", "1..", "2,,3", "1.5"}) {
    try {
      parse_size_list(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument) << bad;
    }
  }
}

TEST(Rates, OnlyBetweenHalvingPairs) {
  std::vector<ConvergenceRow> rows = {row(0.25, 0.4, 0.8), row(0.125, 0.2, 0.2), row(0.1, 0.1, 0.1),
                                      row(0.05, 0.05, 0.05)};
  rows[3].has_pressure = false;
  attach_rates(rows);
  EXPECT_FALSE(rows[0].rate_u_h1);
  ASSERT_TRUE(rows[1].rate_u_h1 && rows[1].rate_p_l2);
  EXPECT_DOUBLE_EQ(*rows[1].rate_u_h1, 1.0);
  EXPECT_DOUBLE_EQ(*rows[1].rate_p_l2, 2.0);
  EXPECT_FALSE(rows[2].rate_u_h1);
  ASSERT_TRUE(rows[3].rate_u_h1);
  EXPECT_DOUBLE_EQ(*rows[3].rate_u_h1, 1.0);
  EXPECT_FALSE(rows[3].rate_p_l2);
}

TEST(Convergence, CsvSchemaAndDeterminism) {
  ConvergenceConfig config;
  config.sizes = {2, 4};
  config.with_pressure = true;
  std::ostringstream a, b;
  write_convergence_csv(a, run_convergence(config));
  write_convergence_csv(b, run_convergence(config));
  const auto la = lines(a.str()), lb = lines(b.str());
  ASSERT_EQ(la.size(), 4u);
  EXPECT_EQ(la[0][0], '#');
  EXPECT_EQ(la[1],
            "mesh_n,h_macro,h_split,dof_v,dof_p,err_u_l2,err_u_h1,rate_u_h1,err_p_l2,rate_p_l2,div_audit,t_assemble,"
            "t_solve");
  for (std::size_t i = 2; i < la.size(); ++i) {
    const auto fa = fields(la[i]), fb = fields(lb[i]);
    ASSERT_EQ(fa.size(), 13u);
    // Everything but the timings is bit-identical across runs.
    for (int c = 0; c < 11; ++c) EXPECT_EQ(fa[c], fb[c]) << "column " << c;
  }
  EXPECT_EQ(fields(la[2])[7], "");
  EXPECT_NE(fields(la[3])[7], "");
  EXPECT_NE(fields(la[3])[9], "");
}

TEST(Convergence, PressureColumnsEmptyWithoutPressure) {
  ConvergenceConfig config;
  config.sizes = {2};
  std::ostringstream out;
  write_convergence_csv(out, run_convergence(config));
  const auto f = fields(lines(out.str())[2]);
  ASSERT_EQ(f.size(), 13u);
  EXPECT_EQ(f[4], "");
  EXPECT_EQ(f[8], "");
  EXPECT_EQ(f[9], "");
}

TEST(Convergence, SaddlePointMatchesSolenoidalErrors) {
  ConvergenceConfig config;
  config.sizes = {4};
  config.with_pressure = true;
  const auto sol = run_convergence(config);
  const auto sp = run_convergence(config, Formulation::kSaddlePoint);
  EXPECT_NEAR(sol[0].errors.h1_u, sp[0].errors.h1_u, 1e-10);
  EXPECT_NEAR(sol[0].errors.l2_p, sp[0].errors.l2_p, 1e-10);
  EXPECT_GT(sp[0].dof_v, sol[0].dof_v);
}

TEST(Convergence, MeshFilesAreLabeled) {
  ConvergenceConfig config;
  config.mesh_files = {"/nonexistent/mesh.txt"};
  try {
    run_convergence(config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("mesh"), std::string::npos);
  }
}

TEST(SiblingPath, InsertsSuffixBeforeExtension) {
  EXPECT_EQ(sibling_path("rates.csv", "_sp"), std::filesystem::path("rates_sp.csv"));
  EXPECT_EQ(sibling_path("out/rates.csv", "_sp"), std::filesystem::path("out/rates_sp.csv"));
  EXPECT_EQ(sibling_path("rates", "_sp"), std::filesystem::path("rates_sp"));
}

TEST(Check, PassesOnSmallMeshes) {
  for (const MacroMesh& m : {generate_structured(1), generate_structured(2), generate_structured(3),
                             fixtures::jittered_mesh(3), fixtures::l_shaped_mesh(1)}) {
    const CheckReport r = run_check(m);
    EXPECT_EQ(r.families.size(), 10u);
    for (const CheckFamily& f : r.families) {
      EXPECT_TRUE(f.passed()) << f.name << ": " << f.first_failure;
      EXPECT_GT(f.checks, 0) << f.name;
    }
    EXPECT_TRUE(r.passed());
  }
}

TEST(Check, SkippedExclusionIsDetected) {
  const CheckReport r = run_check(generate_structured(3), Fault::kSkipExclusion);
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.find("dimensions"), nullptr);
  EXPECT_FALSE(r.find("dimensions")->passed());
  EXPECT_TRUE(r.find("basis-divergence")->passed());
}

TEST(Check, FlippedMomentIsDetected) {
  const CheckReport r = run_check(generate_structured(3), Fault::kFlipMomentSign);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.find("boundary-interpolant")->passed());
  EXPECT_TRUE(r.find("dimensions")->passed());
  EXPECT_EQ(r.find("no-such-family"), nullptr);
}

TEST(Timing, MeanAndSampleDeviation) {
  const TimingStats s = timing_stats({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(timing_stats({2.0}).stddev, 0.0);
  EXPECT_EQ(timing_stats({}).mean, 0.0);
}

TEST(Bench, CsvColumns) {
  BenchConfig config;
  config.sizes = {2};
  config.repeats = 2;
  const auto rows = run_bench(config);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].dof_sp, rows[0].dof_sol_v);
  std::ostringstream out;
  write_bench_csv(out, rows);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(fields(l[1]).size(), 5u + 18u);
  EXPECT_EQ(fields(l[2]).size(), 5u + 18u);
  EXPECT_EQ(fields(l[1])[5], "sol_v_assemble_mean");
}

TEST(Dump, TreeCsvRows) {
  const MacroMesh m = generate_structured(3);
  std::ostringstream out;
  write_tree_csv(out, m, kruskal_tree(m, default_z0(m)));
  const auto l = lines(out.str());
  EXPECT_EQ(l.front(), "order,edge,parent,child,depth");
  EXPECT_EQ(static_cast<int>(l.size()), 1 + m.num_interior_vertices());
}

TEST(Dump, BasisCsvRows) {
  const PSMesh ps = split(generate_structured(2));
  const VelocityBasis basis(ps, 0);
  std::ostringstream out;
  write_basis_csv(out, ps, basis);
  const auto l = lines(out.str());
  EXPECT_EQ(fields(l.front()).size(), 10u);
  // Seven local points per macro-triangle each function touches.
  EXPECT_GT(l.size(), static_cast<std::size_t>(basis.size()));
}
