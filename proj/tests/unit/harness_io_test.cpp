#include "nashnewton/harness/csv.hpp"
#include "nashnewton/harness/oracles.hpp"
#include "nashnewton/harness/problem_io.hpp"
#include "nashnewton/josephy_newton.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace nashnewton::harness {
namespace {

const std::filesystem::path kProblems = std::filesystem::path(NASHNEWTON_TOOLS_DIR) / "problems";

std::vector<std::vector<std::string>> read_rows(const std::string& text) {
  std::stringstream in(text);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(split_csv_line(line));
  return rows;
}

TEST(HarnessIo, ExplicitQuadraticGameLoads) {
  const auto g = load_game(kProblems / "quadratic_box.json");
  EXPECT_TRUE(g.affine());
  EXPECT_EQ(g.game.dimension(), 3);
  EXPECT_TRUE(g.game.region().is_box());
  EXPECT_EQ(g.game.region().lower()(2), -std::numeric_limits<double>::infinity());
  EXPECT_FALSE(g.canonical.empty());
}

TEST(HarnessIo, BuiltinAndSharedGamesLoad) {
  const auto q = load_game(kProblems / "quartic.json");
  EXPECT_FALSE(q.affine());
  EXPECT_EQ(q.game.dimension(), 4);
  const auto a = load_game(kProblems / "analytic_gne.json");
  ASSERT_TRUE(a.solution.has_value());
  EXPECT_EQ(a.solution->size(), 4);
  const auto s = load_game(kProblems / "shared_constraint.json");
  EXPECT_EQ(s.game.num_multipliers(), 2);
}

TEST(HarnessIo, QuadraticGameJsonRoundTrips) {
  std::mt19937_64 rng(9);
  const auto g = testing::random_box_game({2, 1}, rng);
  const auto back = parse_game(quadratic_game_to_json(g.data, g.region));
  ASSERT_TRUE(back.affine());
  EXPECT_EQ(back.quadratic->hessian(), g.data.hessian());
  EXPECT_EQ(back.game.region().lower(), g.region.lower());
  EXPECT_EQ(back.canonical, parse_game(quadratic_game_to_json(g.data, g.region)).canonical);
}

TEST(HarnessIo, MalformedGameNamesTheField) {
  const auto doc = Json::parse(R"({"dims": [1], "Q": [[[[1.0]]]], "c": [[1.0, 2.0]]})");
  try {
    parse_game(doc);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
  }
}

TEST(HarnessIo, ScenarioOverridesApplyOnTopOfTheBuiltin) {
  const auto s = parse_scenario(Json::parse(R"({"builtin": "pursuit", "horizon": 3, "K": [1, 4]})"));
  EXPECT_EQ(s.horizon, 3);
  EXPECT_EQ(s.budgets, (std::vector<int>{1, 4}));
  EXPECT_EQ(s.num_agents(), 2);
}

TEST(HarnessIo, GneSolutionCsvMarksBranches) {
  const auto game = analytic_shared_constraint_gne();
  std::stringstream out;
  write_gne_solution_csv(game, Vector::Constant(4, 0.5), TieRule::PreferG, out);
  const auto rows = read_rows(out.str());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"field", "index", "value", "branch"}));
  EXPECT_EQ(rows[3][0], "lambda");
  EXPECT_EQ(rows[3][3], "C");
  EXPECT_EQ(rows[5][0], "phi_norm");
  EXPECT_EQ(parse_double(rows[5][2]), 0.0);
}

TEST(HarnessIo, ContractionSummaryCsvRoundTrips) {
  ContractionTable table;
  table.fits.push_back({1, 0.5, 0.2, 39, 2, 1.1, 1.3, 0.25});
  table.fits.push_back({2, 0.3, 0.1, 39, 0, 1.1, 0.9, 0.125});
  std::stringstream out;
  write_contraction_summary_csv(table, out);
  const auto rows = read_rows(out.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "K");
  EXPECT_EQ(rows[1][1], format_double(0.25));
  EXPECT_EQ(parse_double(rows[2][2]), 0.3);
  EXPECT_EQ(rows[1][4], "2");
}

TEST(HarnessIo, ClosedLoopCsvHasOneRowPerStep) {
  const auto s = [] {
    auto sc = builtin_pursuit_scenario();
    sc.t_end = 5;
    return sc;
  }();
  const auto log = run_closed_loop(s, MpcSolver::DistributedJN, 2, 0);
  std::stringstream out;
  write_closed_loop_csv(log, out);
  const auto rows = read_rows(out.str());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x_0", "x_1", "u_0", "u_1", "e", "dx",
                                               "residual"}));
}

TEST(HarnessIo, TraceFileRoundTrips) {
  const auto tr = josephy_newton(builtin_quartic_game(), Vector::Zero(4), {});
  const auto path = std::filesystem::path(::testing::TempDir()) / "trace_roundtrip.csv";
  write_trace_file(tr, path);
  std::ifstream in(path);
  const auto rows = read_trace_csv(in);
  ASSERT_EQ(rows.size(), tr.iterates.size());
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(rows[k].residual, tr.residuals[k]);
}

TEST(HarnessIo, JsonSyntaxErrorReportsPosition) {
  const auto path = std::filesystem::path(::testing::TempDir()) / "broken.json";
  std::ofstream(path) << "{\n  \"dims\": [1,\n}";
  try {
    read_json_file(path);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json:3:"), std::string::npos) << e.what();
  }
}

TEST(OracleRegistry, CatalogHasSelfTestedOracles) {
  const auto& reg = oracle_registry();
  const auto cat = reg.catalog();
  EXPECT_GE(cat.size(), 4u);
  for (const auto& t : reg.self_test_all()) EXPECT_TRUE(t.passed) << t.name << ": " << t.detail;
}

TEST(OracleRegistry, EnumerationResultsAreCached) {
  const auto& reg = oracle_registry();
  std::mt19937_64 rng(77);
  const auto g = testing::random_box_game({2, 2}, rng);
  const auto hits = reg.cache_hits();
  const auto first = reg.active_set_solution(g.vi);
  const auto size = reg.cache_size();
  const auto second = reg.active_set_solution(g.vi);
  EXPECT_EQ(reg.cache_size(), size);
  EXPECT_EQ(reg.cache_hits(), hits + 1);
  EXPECT_TRUE(first.a == second.a);
}

TEST(OracleRegistry, HashSeparatesDifferentProblems) {
  std::mt19937_64 rng(78);
  auto g = testing::random_box_game({2, 1}, rng);
  const auto h = problem_hash(g.vi);
  EXPECT_EQ(problem_hash(g.vi), h);
  g.vi.q(0) += 1e-12;
  EXPECT_NE(problem_hash(g.vi), h);
}

TEST(OracleRegistry, GridCheckRejectsNonSolutions) {
  std::mt19937_64 rng(79);
  const auto g = testing::random_box_game({1, 2}, rng);
  const auto& reg = oracle_registry();
  const Vector sol = reg.active_set_solution(g.vi).a;
  EXPECT_TRUE(reg.grid_vi_check(g.vi, sol).holds());
  Vector off = sol;
  off(0) = g.region.lower()(0) == sol(0) ? g.region.upper()(0) : g.region.lower()(0);
  EXPECT_FALSE(reg.grid_vi_check(g.vi, off).holds());
}

TEST(OracleRegistry, AnalyticSolutionIsKnown) {
  const auto z = oracle_registry().analytic_solution("analytic_gne");
  ASSERT_TRUE(z.has_value());
  EXPECT_EQ(*z, Vector::Constant(4, 0.5));
  EXPECT_FALSE(oracle_registry().analytic_solution("other").has_value());
}

}  // namespace
}  // namespace nashnewton::harness
