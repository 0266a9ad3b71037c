#include "nashnewton/kkt.hpp"

#include "nashnewton/builtin_games.hpp"
#include "nashnewton/derivative_check.hpp"
#include "nashnewton/harness/oracles.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

namespace nashnewton {
namespace {

Vector analytic_z() { return Vector::Constant(4, 0.5); }

TEST(Kkt, PhiVanishesAtTheAnalyticSolution) {
  const auto game = analytic_shared_constraint_gne();
  EXPECT_LE(assemble_phi(game, analytic_z()).norm(), 1e-15);
  Vector off = analytic_z();
  off(2) = 0.6;
  EXPECT_GT(assemble_phi(game, off).norm(), 0.05);
}

TEST(Kkt, PhiLayoutIsLagrangianThenComplementarity) {
  const auto game = analytic_shared_constraint_gne();
  Vector z(4);
  z << 0.2, 0.3, 0.1, 0.7;
  const Vector phi = assemble_phi(game, z);
  ASSERT_EQ(phi.size(), 4);
  EXPECT_DOUBLE_EQ(phi(0), 0.2 - 1.0 + 0.1);
  EXPECT_DOUBLE_EQ(phi(1), 0.3 - 1.0 + 0.7);
  // -g = 1 - a1 - a2 = 0.5.
  EXPECT_DOUBLE_EQ(phi(2), 0.1);
  EXPECT_DOUBLE_EQ(phi(3), 0.5);
}

TEST(Kkt, LimitingJacobianMatchesDifferencesAwayFromKinks) {
  std::mt19937_64 rng(12);
  const auto game = random_shared_constraint_game({2, 1}, 2, rng);
  const int n = game.dimension(), m = game.num_multipliers();
  int checked = 0;
  for (int k = 0; k < 20; ++k) {
    Vector z(n + m);
    z.head(n) = testing::random_vector(n, 1.0, rng);
    z.tail(m) = testing::random_vector(m, 1.0, rng).cwiseAbs();
    if (const auto err = phi_jacobian_fd_error(game, z)) {
      EXPECT_LE(*err, harness::kPhiJacobianFdTol);
      ++checked;
    }
  }
  EXPECT_GE(checked, 15);
}

TEST(Kkt, TieRuleSelectsTheBranch) {
  const auto game = analytic_shared_constraint_gne();
  Vector z(4);
  z << 0.5, 0.5, 0.0, 0.0;  // -g = 0 = lambda on both rows
  const auto pz = PrimalDualPoint::split(z, 2);
  const auto g = limiting_jacobian(game, pz, TieRule::PreferG);
  const auto l = limiting_jacobian(game, pz, TieRule::PreferLambda);
  EXPECT_EQ(g.branches.tie_count(), 2);
  EXPECT_EQ(g.branches.side[0], Branch::Constraint);
  EXPECT_EQ(l.branches.side[0], Branch::Multiplier);
  // Constraint row: d(-g)/dz = (-1, -1, 0, 0). Multiplier row: unit vector.
  EXPECT_DOUBLE_EQ(g.matrix(2, 0), -1.0);
  EXPECT_DOUBLE_EQ(g.matrix(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(l.matrix(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(l.matrix(2, 0), 0.0);
}

TEST(Kkt, ExplicitBranchesReproduceTheLimitingElement) {
  const auto game = analytic_shared_constraint_gne();
  Vector z(4);
  z << 0.2, 0.4, 0.3, 0.0;
  const auto pz = PrimalDualPoint::split(z, 2);
  const auto el = limiting_jacobian(game, pz, TieRule::PreferG);
  EXPECT_EQ(jacobian_for_branches(game, pz, el.branches.side), el.matrix);
  EXPECT_EQ(branch_record(game, pz, TieRule::PreferG).side, el.branches.side);
}

TEST(Kkt, InitialMultipliersAreNonnegativeLeastSquares) {
  const auto game = analytic_shared_constraint_gne();
  Vector a(2);
  a << 0.5, 0.5;
  const Vector lam = initial_multipliers(game, a);
  EXPECT_NEAR(lam(0), 0.5, 1e-12);
  EXPECT_NEAR(lam(1), 0.5, 1e-12);
  a << 2.0, 2.0;  // gradient positive: least squares would give -1
  EXPECT_EQ(initial_multipliers(game, a).minCoeff(), 0.0);
}

TEST(Kkt, SplitAndStackAreInverse) {
  Vector z(5);
  z << 1, 2, 3, 4, 5;
  const auto p = PrimalDualPoint::split(z, 3);
  EXPECT_EQ(p.a.size(), 3);
  EXPECT_EQ(p.lambda.size(), 2);
  EXPECT_TRUE(p.stacked() == z);
}

}  // namespace
}  // namespace nashnewton
