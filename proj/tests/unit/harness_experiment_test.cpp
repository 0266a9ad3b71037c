#include "nashnewton/harness/experiment.hpp"

#include <gtest/gtest.h>

#include <fstream>

namespace nashnewton::harness {
namespace {

const std::filesystem::path kProblems = std::filesystem::path(NASHNEWTON_TOOLS_DIR) / "problems";

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / ("nashnewton_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentConfig quadratic_convergence(const std::string& out) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Convergence;
  cfg.name = "quadratic";
  cfg.problem = kProblems / "quadratic_box.json";
  cfg.solvers = {SolverKind::JosephyNewton};
  cfg.seeds = {1, 2};
  cfg.start_radius = 0.5;
  cfg.output = fresh_dir(out);
  return cfg;
}

TEST(HarnessExperiment, ConvergenceOnAnAffineGameChecksOneStep) {
  const auto cfg = quadratic_convergence("conv");
  const auto report = run_experiment(cfg);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(exit_code(report), 0);
  bool saw_one_step = false;
  for (const auto& v : report.verdicts) saw_one_step = saw_one_step || v.check == "one_step";
  EXPECT_TRUE(saw_one_step);
  EXPECT_TRUE(std::filesystem::exists(cfg.output / "report.json"));
  for (const auto& f : report.files) EXPECT_TRUE(std::filesystem::exists(cfg.output / f)) << f;
}

TEST(HarnessExperiment, ReportIsDeterministicApartFromTheTimestamp) {
  auto a = quadratic_convergence("det_a");
  auto b = quadratic_convergence("det_b");
  b.threads = 2;
  const auto ja = run_experiment(a).to_json(false);
  const auto jb = run_experiment(b).to_json(false);
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_FALSE(ja.contains("generated_at"));
  EXPECT_TRUE(run_experiment(a).to_json(true).contains("generated_at"));
}

TEST(HarnessExperiment, ZeroMagnitudeCampaignIsADegenerateFit) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::IssCampaign;
  cfg.problem = kProblems / "quartic.json";
  cfg.solvers = {SolverKind::JosephyNewton};
  cfg.perturbation.mode = PerturbationSpec::Mode::AdditiveGradient;
  cfg.magnitudes = {0.0};
  cfg.seeds = {0, 1, 2};
  cfg.newton.max_outer = 15;
  cfg.output = fresh_dir("iss_zero");
  const auto report = run_experiment(cfg);
  EXPECT_FALSE(report.passed());
  const auto& fits = report.tables.at("fits");
  ASSERT_FALSE(fits.empty());
  EXPECT_NE(fits.back().at("error").get<std::string>().find("DegenerateFit"), std::string::npos);
}

TEST(HarnessExperiment, MpcSweepWritesAMonotoneSummary) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MpcSweep;
  cfg.problem = kProblems / "pursuit.json";
  cfg.solvers = {SolverKind::Mechanism1};
  cfg.budgets = std::vector<int>{1, 2, 5};
  cfg.output = fresh_dir("mpc");
  const auto report = run_experiment(cfg);
  bool found = false;
  for (const auto& v : report.verdicts)
    if (v.check == "sup_e_nonincreasing") {
      found = true;
      EXPECT_TRUE(v.passed) << v.observed;
    }
  EXPECT_TRUE(found);
  std::ifstream in(cfg.output / "summary_m1.csv");
  ASSERT_TRUE(in.good());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "K,sup_e,alpha_hat,theta_hat,violations,required_slack");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(HarnessExperiment, DistributedComparisonMatchesCentralized) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::DistributedCompare;
  cfg.problem = kProblems / "quartic.json";
  cfg.solvers = {SolverKind::Mechanism1};
  cfg.seeds = {0};
  cfg.newton.tol_outer = 1e-12;
  cfg.newton.inner.tol_inner = 1e-14;
  cfg.newton.max_outer = 100;
  cfg.output = fresh_dir("dist");
  const auto report = run_experiment(cfg);
  EXPECT_TRUE(report.passed());
}

TEST(HarnessExperiment, MissingProblemFileThrows) {
  auto cfg = quadratic_convergence("missing");
  cfg.problem = kProblems / "does_not_exist.json";
  EXPECT_THROW(run_experiment(cfg), InputError);
}

TEST(HarnessExperiment, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](int k) { ++hits[k]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](int k) {
                 if (k == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace nashnewton::harness
