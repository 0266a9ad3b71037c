#include "nashnewton/mpc.hpp"

#include <gtest/gtest.h>

namespace nashnewton {
namespace {

MpcScenario short_pursuit() {
  auto s = builtin_pursuit_scenario();
  s.t_end = 12;
  return s;
}

TEST(Mpc, StaticPlantFromAnExactStartStaysExact) {
  auto s = builtin_pursuit_scenario();
  for (auto& a : s.agents) a.B = Matrix::Zero(1, 1);
  s.e0 = 0.0;
  s.t_end = 10;
  const auto log = run_closed_loop(s, MpcSolver::DistributedJN, 1, 0);
  ASSERT_EQ(log.steps.size(), 10u);
  for (const auto& st : log.steps) {
    EXPECT_EQ(st.dx, 0.0);
    EXPECT_LE(st.e, 1e-14);
  }
}

TEST(Mpc, FastPathGameHasInputDecisionsOnly) {
  const auto s = builtin_pursuit_scenario();
  const auto pg = build_parameterized_game(s, s.x0);
  EXPECT_EQ(pg.mode, ParameterizedGame::Mode::NashFastPath);
  EXPECT_EQ(pg.primal_dimension(), 2 * s.horizon);
  EXPECT_EQ(estimate_dimension(pg, MpcSolver::JN), 2 * s.horizon);
  const Vector v = Vector::LinSpaced(10, 0.0, 0.9);
  const Vector u = pg.select_inputs(v);
  ASSERT_EQ(u.size(), 2);
  EXPECT_DOUBLE_EQ(u(0), v(pg.input_offsets[0]));
}

TEST(Mpc, MultipleShootingGameCarriesStatesAndMultipliers) {
  auto s = builtin_pursuit_scenario();
  s.multiple_shooting = true;
  const auto pg = build_parameterized_game(s, s.x0);
  EXPECT_EQ(pg.mode, ParameterizedGame::Mode::MultipleShooting);
  EXPECT_EQ(pg.primal_dimension(), 4 * s.horizon);
  EXPECT_GT(estimate_dimension(pg, MpcSolver::SemismoothNewton), pg.primal_dimension());
  EXPECT_TRUE(uses_multipliers(MpcSolver::DistributedSSN));
  EXPECT_FALSE(uses_multipliers(MpcSolver::DistributedJN));
}

TEST(Mpc, FormulationsAgreeOnTheFirstInput) {
  auto s = builtin_pursuit_scenario();
  const auto fast = build_parameterized_game(s, s.x0);
  const auto ref_fast = reference_solution(fast, Vector::Zero(fast.primal_dimension()), MpcSolver::JN);
  s.multiple_shooting = true;
  const auto ms = build_parameterized_game(s, s.x0);
  const auto ref_ms = reference_solution(
      ms, Vector::Zero(estimate_dimension(ms, MpcSolver::SemismoothNewton)),
      MpcSolver::SemismoothNewton);
  EXPECT_LE((fast.select_inputs(ref_fast.v) - ms.select_inputs(ref_ms.v)).norm(), 1e-8);
}

TEST(Mpc, TdoStepRunsExactlyTheBudget) {
  const auto s = builtin_pursuit_scenario();
  const auto pg = build_parameterized_game(s, s.x0);
  const Vector v0 = Vector::Zero(pg.primal_dimension());
  const auto one = tdo_step(pg, v0, 1, MpcSolver::DistributedJN);
  const auto two = tdo_step(pg, v0, 2, MpcSolver::DistributedJN);
  const auto again = tdo_step(pg, one.v, 1, MpcSolver::DistributedJN);
  EXPECT_TRUE(two.v == again.v);
  EXPECT_LT(two.residual, one.residual);
  EXPECT_TRUE(tdo_step(pg, v0, 0, MpcSolver::DistributedJN).v == v0);
}

TEST(Mpc, LargeBudgetTracksTheReferenceLoop) {
  const auto log = run_closed_loop(short_pursuit(), MpcSolver::DistributedJN, 50, 0);
  EXPECT_LE(log.sup_e(), 1e-8);
}

TEST(Mpc, ErrorShrinksWithTheBudget) {
  const auto s = short_pursuit();
  const auto k1 = run_closed_loop(s, MpcSolver::DistributedJN, 1, 0);
  const auto k5 = run_closed_loop(s, MpcSolver::DistributedJN, 5, 0);
  EXPECT_LT(k5.sup_e(), k1.sup_e());
  EXPECT_EQ(k1.steps.front().t, 0);
  EXPECT_NEAR(k1.steps.front().e, s.e0, 0.6);
}

TEST(Mpc, ClosedLoopIsDeterministic) {
  const auto s = short_pursuit();
  const auto a = run_closed_loop(s, MpcSolver::DistributedJN, 2, 4);
  const auto b = run_closed_loop(s, MpcSolver::DistributedJN, 2, 4);
  EXPECT_TRUE(a.x_final == b.x_final);
}

TEST(Mpc, ContractionFitNeedsEnoughSteps) {
  const auto log = run_closed_loop(short_pursuit(), MpcSolver::DistributedJN, 2, 0);
  try {
    estimate_contraction(log);
    FAIL();
  } catch (const EstimationError& e) {
    EXPECT_EQ(e.kind(), EstimationError::Kind::TooFewPoints);
  }
}

TEST(Mpc, ContractionTableReportsMonotoneSupE) {
  const auto s = builtin_pursuit_scenario();
  std::vector<ClosedLoopLog> logs;
  for (int K : {1, 2, 3}) logs.push_back(run_closed_loop(s, MpcSolver::DistributedJN, K, 0));
  const auto table = estimate_contraction(logs);
  ASSERT_EQ(table.fits.size(), 3u);
  EXPECT_TRUE(table.sup_e_nonincreasing);
  for (const auto& f : table.fits) {
    EXPECT_GE(f.samples, 20);
    EXPECT_GE(f.alpha, 0.0);
    EXPECT_LT(f.alpha, 1.0);
  }
}

TEST(Mpc, LipschitzProbeIsQuietOnASmoothLoop) {
  const auto log = run_closed_loop(short_pursuit(), MpcSolver::DistributedJN, 3, 0);
  const auto probe = lipschitz_probe(log);
  EXPECT_FALSE(probe.ratios.empty());
  EXPECT_FALSE(probe.flagged);
  EXPECT_GE(probe.max_ratio, probe.median_ratio);
}

TEST(Mpc, InvalidScenarioIsRejected) {
  auto s = builtin_pursuit_scenario();
  s.horizon = 0;
  EXPECT_THROW(s.validate(), InputError);
  s = builtin_pursuit_scenario();
  s.x0 = Vector::Zero(3);
  EXPECT_THROW(build_parameterized_game(s, Vector::Zero(2)), InputError);
}

TEST(Mpc, NonlinearPlantHasNoGame) {
  auto s = builtin_pursuit_scenario();
  s.agents[0].nonlinear = [](const Vector& x, const Vector& u) { return Vector(x + u); };
  try {
    build_parameterized_game(s, s.x0);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::Unsupported);
  }
}

}  // namespace
}  // namespace nashnewton
