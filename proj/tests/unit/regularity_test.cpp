#include "nashnewton/regularity.hpp"

#include "nashnewton/builtin_games.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace nashnewton {
namespace {

Matrix semicopositive_hessian() {
  Matrix H(2, 2);
  H << 1, -3, 1, 0;
  return H;
}

CriticalCone nonnegative_orthant(int n) {
  CriticalCone cone;
  for (int k = 0; k < n; ++k) cone.agents.push_back(AgentCone::from_signs({SignKind::NonNegative}));
  return cone;
}

TEST(Regularity, SemicopositiveGameIsIndefiniteButStrictlySemicopositive) {
  const Matrix H = semicopositive_hessian();
  EXPECT_EQ(check_monotonicity(H).classification, MonotonicityVerdict::Class::Indefinite);
  const auto v = check_strict_semicopositivity(H, nonnegative_orthant(2), 100000, 1);
  EXPECT_FALSE(v.violated());
  EXPECT_GT(v.smallest_value, 0.0);
  EXPECT_GE(v.orthant_representatives, 1);
  EXPECT_EQ(v.samples_checked, 100000);
}

TEST(Regularity, NegatedSemicopositiveGameHasAWitnessInTheCone) {
  const Matrix H = -semicopositive_hessian();
  const auto cone = nonnegative_orthant(2);
  const auto v = check_strict_semicopositivity(H, cone, 1000, 2);
  ASSERT_TRUE(v.violated());
  ASSERT_TRUE(v.witness.has_value());
  const Vector& c = *v.witness;
  EXPECT_NEAR(c.norm(), 1.0, 1e-12);
  EXPECT_TRUE(cone.contains(c));
  const Vector Hc = H * c;
  EXPECT_LE(std::max(c(0) * Hc(0), c(1) * Hc(1)), 0.0);
}

TEST(Regularity, MonotonicityClassesFollowTheSymmetricPart) {
  EXPECT_EQ(check_monotonicity(Matrix::Identity(3, 3)).classification,
            MonotonicityVerdict::Class::PositiveDefinite);
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  EXPECT_EQ(check_monotonicity(skew).classification,
            MonotonicityVerdict::Class::PositiveSemidefinite);
  const auto v = check_monotonicity(semicopositive_hessian());
  EXPECT_LT(v.min_eigenvalue, 0.0);
}

TEST(Regularity, VerdictIsDeterministicPerSeed) {
  Matrix H(3, 3);
  H << 2, -1, 0.5, -3, 1, 0, 0.2, 0.1, -0.1;
  CriticalCone cone;
  cone.agents.push_back(AgentCone::full_space(2));
  cone.agents.push_back(AgentCone::from_signs({SignKind::NonPositive}));
  const auto a = check_strict_semicopositivity(H, cone, 5000, 9);
  const auto b = check_strict_semicopositivity(H, cone, 5000, 9);
  EXPECT_EQ(a.outcome, b.outcome);
  EXPECT_EQ(a.smallest_value, b.smallest_value);
}

TEST(Regularity, CriticalConeOnABoxFixesStronglyActiveCoordinates) {
  // J_1 = 0.5 a^2 + a on [0, 1]: a* = 0 with gradient 1 > 0, so the
  // coordinate is strongly active and the cone is {0}.
  QuadraticGameData d;
  d.dims = {1, 1};
  d.Q = {{Matrix::Ones(1, 1), Matrix::Zero(1, 1)}, {Matrix::Zero(1, 1), Matrix::Ones(1, 1)}};
  d.c = {Vector::Ones(1), Vector::Constant(1, -0.5)};
  auto game = make_quadratic_game(d);
  game.with_region(FeasibleRegion({1, 1}, {Box::uniform(1, 0, 1), Box::uniform(1, 0, 1)}));
  Vector a(2);
  a << 0.0, 0.5;
  const auto cone = critical_cone(game, a);
  ASSERT_EQ(cone.agents.size(), 2u);
  ASSERT_TRUE(cone.agents[0].coordinate_signs.has_value());
  EXPECT_EQ((*cone.agents[0].coordinate_signs)[0], SignKind::Zero);
  EXPECT_EQ((*cone.agents[1].coordinate_signs)[0], SignKind::Free);
  Vector d1(2);
  d1 << 0.3, -1.0;
  EXPECT_FALSE(cone.contains(d1));
  d1(0) = 0.0;
  EXPECT_TRUE(cone.contains(d1));
}

TEST(Regularity, CriticalConeRejectsInfeasiblePoint) {
  auto game = make_quadratic_game(semicopositive_game_data());
  game.with_region(FeasibleRegion({1, 1}, {Box::uniform(1, 0, 1), Box::uniform(1, 0, 1)}));
  Vector a(2);
  a << 2.0, 0.5;
  EXPECT_THROW(critical_cone(game, a), InputError);
}

}  // namespace
}  // namespace nashnewton
