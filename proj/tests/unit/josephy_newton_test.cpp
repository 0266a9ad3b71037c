#include "nashnewton/josephy_newton.hpp"

#include "nashnewton/rates.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

namespace nashnewton {
namespace {

Vector quartic_solution() {
  NewtonConfig cfg;
  cfg.tol_outer = 1e-13;
  cfg.inner.tol_inner = 1e-14;
  return josephy_newton(builtin_quartic_game(), Vector::Zero(4), cfg).final_point();
}

Vector start_near(const Vector& ref, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector d = testing::random_vector(static_cast<int>(ref.size()), 1.0, rng);
  return ref + radius * d.normalized();
}

class OneStep : public ::testing::TestWithParam<int> {};

TEST_P(OneStep, AffineGameConvergesInOneOuterIteration) {
  std::mt19937_64 rng(500 + GetParam());
  std::uniform_int_distribution<int> agents(2, 3), dim(1, 2);
  std::vector<int> dims(agents(rng));
  for (int& n : dims) n = dim(rng);
  const auto g = testing::random_box_game(dims, rng);
  auto game = make_quadratic_game(g.data);
  game.with_region(g.region);
  const Vector a0 = g.region.project(testing::random_vector(g.vi.dimension(), 2.0, rng));
  const auto tr = josephy_newton(game, a0, {});
  ASSERT_TRUE(tr.converged());
  EXPECT_EQ(tr.iterations(), 1);
  EXPECT_LE((tr.final_point() - enumerate_active_set_solution(g.vi).a).norm(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, OneStep, ::testing::Range(0, 10));

TEST(JosephyNewton, QuarticGameConvergesQuadratically) {
  const Vector ref = quartic_solution();
  const auto tr = josephy_newton(builtin_quartic_game(), start_near(ref, 0.1, 3), {}, ref);
  ASSERT_TRUE(tr.converged());
  const auto rate = estimate_q_rate(tr);
  EXPECT_EQ(rate.classification, RateEstimate::Class::Quadratic);
  EXPECT_LE(rate.tail_max, 1e3);
}

TEST(JosephyNewton, InactivePerturbationIsBitwiseIdentical) {
  const auto game = builtin_quartic_game();
  const Vector a0 = start_near(quartic_solution(), 0.1, 4);
  PerturbationSpec none;
  PerturbationSpec zero;
  zero.mode = PerturbationSpec::Mode::AdditiveGradient;
  const auto plain = josephy_newton(game, a0, {});
  for (const auto& p : {none, zero}) {
    const auto pert = perturbed_josephy_newton(game, a0, {}, p);
    ASSERT_EQ(plain.iterates.size(), pert.iterates.size());
    for (std::size_t k = 0; k < plain.iterates.size(); ++k)
      EXPECT_TRUE(plain.iterates[k] == pert.iterates[k]);
  }
}

TEST(JosephyNewton, PerturbedRunFromTheSolutionKeepsIterating) {
  const Vector ref = quartic_solution();
  NewtonConfig cfg;
  cfg.stop_on_tolerance = false;
  cfg.max_outer = 20;
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::AdditiveGradient;
  p.magnitude = 1e-3;
  p.seed = 1;
  const auto tr = perturbed_josephy_newton(builtin_quartic_game(), ref, cfg, p, ref);
  EXPECT_EQ(tr.status, SolverStatus::BudgetExhausted);
  EXPECT_EQ(tr.iterations(), 20);
  for (int k = 0; k < 20; ++k) EXPECT_LE(tr.perturbation_norm(k), 1e-3);
  EXPECT_LE(tr.error_to_ref->back(), 1e-2);
}

TEST(JosephyNewton, OversizedPerturbationIsRejected) {
  NewtonConfig cfg;
  cfg.max_perturbation = 1e-2;
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::AdditiveGradient;
  p.magnitude = 1.0;
  EXPECT_THROW(perturbed_josephy_newton(builtin_quartic_game(), Vector::Zero(4), cfg, p),
               InputError);
}

TEST(JosephyNewton, Mechanism1ReachesTheCentralizedSolution) {
  const Vector ref = quartic_solution();
  NewtonConfig cfg;
  cfg.tol_outer = 1e-12;
  cfg.inner.tol_inner = 1e-14;
  cfg.max_outer = 100;
  const auto tr = distributed_jn_mechanism1(builtin_quartic_game(), start_near(ref, 0.1, 5), cfg);
  ASSERT_TRUE(tr.converged()) << to_string(tr.status);
  EXPECT_LE((tr.final_point() - ref).norm(), 1e-10);
}

TEST(JosephyNewton, Mechanism1ParallelMatchesSequential) {
  const Vector a0 = start_near(quartic_solution(), 0.1, 6);
  NewtonConfig seq, par;
  par.parallel_agents = true;
  const auto a = distributed_jn_mechanism1(builtin_quartic_game(), a0, seq);
  const auto b = distributed_jn_mechanism1(builtin_quartic_game(), a0, par);
  ASSERT_EQ(a.iterates.size(), b.iterates.size());
  EXPECT_TRUE(a.final_point() == b.final_point());
}

TEST(JosephyNewton, Mechanism2ReachesTheCentralizedSolution) {
  const Vector ref = quartic_solution();
  NewtonConfig cfg;
  cfg.tol_outer = 1e-12;
  cfg.inner.tol_inner = 1e-14;
  cfg.max_outer = 200;
  for (auto order : {BestResponseOrder::Jacobi, BestResponseOrder::GaussSeidel}) {
    BestResponseOptions br;
    br.order = order;
    br.tol_br = 1e-14;
    const auto tr =
        distributed_jn_mechanism2(builtin_quartic_game(), start_near(ref, 0.1, 7), cfg, br);
    ASSERT_TRUE(tr.converged()) << to_string(tr.status);
    EXPECT_LE((tr.final_point() - ref).norm(), 1e-10);
  }
}

TEST(JosephyNewton, Mechanism2RejectsSingularAgentBlock) {
  // J_2 = a_1 a_2 has a zero own Hessian.
  auto game = make_quadratic_game(semicopositive_game_data());
  game.with_region(FeasibleRegion({1, 1}, {Box::uniform(1, 0, 1), Box::uniform(1, 0, 1)}));
  try {
    distributed_jn_mechanism2(game, Vector::Constant(2, 0.5), {});
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::SingularAgentBlock);
  }
}

TEST(JosephyNewton, InfeasibleStartIsProjectedWithAWarning) {
  const auto tr = josephy_newton(builtin_quartic_game(), Vector::Constant(4, 5.0), {});
  EXPECT_FALSE(tr.warnings.empty());
  EXPECT_LE(tr.iterates.front().maxCoeff(), 2.0);
}

TEST(JosephyNewton, BudgetSemanticsRunExactlyMaxOuter) {
  NewtonConfig cfg;
  cfg.stop_on_tolerance = false;
  cfg.max_outer = 7;
  const auto tr = josephy_newton(builtin_quartic_game(), Vector::Zero(4), cfg);
  EXPECT_EQ(tr.status, SolverStatus::BudgetExhausted);
  EXPECT_EQ(tr.iterations(), 7);
}

TEST(JosephyNewton, InvalidConfigIsRejected) {
  NewtonConfig cfg;
  cfg.tol_outer = -1.0;
  EXPECT_THROW(josephy_newton(builtin_quartic_game(), Vector::Zero(4), cfg), InputError);
  cfg = {};
  cfg.damping = 0.0;
  EXPECT_THROW(cfg.validate(), InputError);
}

}  // namespace
}  // namespace nashnewton
