#include "nashnewton/vgne.hpp"

#include "nashnewton/builtin_games.hpp"
#include "nashnewton/josephy_newton.hpp"

#include <gtest/gtest.h>

#include <random>

namespace nashnewton {
namespace {

class SharedFamily : public ::testing::TestWithParam<int> {};

TEST_P(SharedFamily, LiftedVariationalSolutionSolvesTheKktSystem) {
  std::mt19937_64 rng(300 + GetParam());
  const std::vector<int> dims = GetParam() % 2 ? std::vector<int>{2, 1} : std::vector<int>{1, 2, 1};
  const auto game = random_shared_constraint_game(dims, 1 + GetParam() % 3, rng);
  const auto red = vgne_reduce(game, GetParam());
  EXPECT_LE(red.max_deviation, 1e-12);
  NewtonConfig cfg;
  cfg.tol_outer = 1e-12;
  cfg.inner.tol_inner = 1e-14;
  const auto tr = josephy_newton(red.ne_game, Vector::Zero(game.dimension()), cfg);
  ASSERT_TRUE(tr.converged()) << to_string(tr.status);
  const Vector lam = red.shared_multiplier(tr.final_point());
  EXPECT_GE(lam.minCoeff(), 0.0);
  const auto z = red.lift(tr.final_point(), lam);
  EXPECT_EQ(z.lambda.size(), game.num_multipliers());
  EXPECT_LE(assemble_phi(game, z).norm(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, SharedFamily, ::testing::Range(0, 8));

TEST(Vgne, AnalyticExampleLiftsToTheSymmetricSolution) {
  const auto red = vgne_reduce(analytic_shared_constraint_gne());
  NewtonConfig cfg;
  cfg.tol_outer = 1e-13;
  cfg.inner.tol_inner = 1e-14;
  const auto tr = josephy_newton(red.ne_game, Vector::Zero(2), cfg);
  ASSERT_TRUE(tr.converged());
  const auto z = red.lift(tr.final_point(), red.shared_multiplier(tr.final_point()));
  EXPECT_LE((z.stacked() - Vector::Constant(4, 0.5)).norm(), 1e-10);
}

TEST(Vgne, DifferentConstraintsAreRejected) {
  auto game = make_quadratic_game(semicopositive_game_data());
  Matrix C(1, 2);
  C << 1, 1;
  game.with_constraints({make_constraint_function({C, Vector::Ones(1)}, {}, 2),
                         make_constraint_function({C, Vector::Constant(1, 2.0)}, {}, 2)});
  try {
    vgne_reduce(game);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::ConstraintsNotCommon);
  }
}

TEST(Vgne, NonlinearSharedConstraintIsUnsupported) {
  auto game = make_quadratic_game(semicopositive_game_data());
  QuadraticConstraintRow disc{Matrix::Identity(2, 2) * 2.0, Vector::Zero(2), -1.0};
  const auto g = make_constraint_function({Matrix(0, 2), Vector(0)}, {disc}, 2);
  game.with_constraints({g, g});
  try {
    vgne_reduce(game);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::Unsupported);
  }
}

TEST(Vgne, GameWithoutConstraintsReducesToItself) {
  const auto game = builtin_quartic_game();
  const auto red = vgne_reduce(game);
  EXPECT_EQ(red.shared.count(), 0);
  EXPECT_EQ(red.ne_game.dimension(), 4);
}

}  // namespace
}  // namespace nashnewton
