#include "nashnewton/semismooth_newton.hpp"

#include "nashnewton/builtin_games.hpp"
#include "nashnewton/linalg.hpp"
#include "nashnewton/rates.hpp"

#include <gtest/gtest.h>

namespace nashnewton {
namespace {

// J_1 = a1^2/2 - a1 with own constraint a1 <= 0.25, J_2 = a2^2/2 - a1 a2
// unconstrained. Solution a = (0.25, 0.25), lambda_1 = 0.75; strictly
// complementary, so every Jacobian element is nonsingular.
GameProblem regular_gne() {
  QuadraticGameData d;
  d.dims = {1, 1};
  d.Q = {{Matrix::Ones(1, 1), Matrix::Zero(1, 1)}, {-Matrix::Ones(1, 1), Matrix::Ones(1, 1)}};
  d.c = {-Vector::Ones(1), Vector::Zero(1)};
  auto game = make_quadratic_game(d);
  Matrix C(1, 2);
  C << 1, 0;
  game.with_constraints({make_constraint_function({C, Vector::Constant(1, 0.25)}, {}, 2),
                         ConstraintFunction::none(2)});
  return game;
}

Vector regular_solution() {
  Vector z(3);
  z << 0.25, 0.25, 0.75;
  return z;
}

TEST(SemismoothNewton, ConvergesQuadraticallyOnARegularGne) {
  const auto game = regular_gne();
  const Vector ref = regular_solution();
  ASSERT_LE(assemble_phi(game, ref).norm(), 1e-15);
  Vector z0 = ref;
  z0 << 0.3, 0.2, 0.7;
  NewtonConfig cfg;
  cfg.tol_outer = 1e-14;
  cfg.inner.tol_inner = 1e-14;
  const auto tr = semismooth_newton(game, z0, cfg, TieRule::PreferG, ref);
  ASSERT_TRUE(tr.converged());
  EXPECT_LE(tr.iterations(), 6);
  EXPECT_LE((tr.final_point() - ref).norm(), 1e-12);
  EXPECT_EQ(tr.branches.size(), tr.iterates.size());
}

TEST(SemismoothNewton, RegularSolutionIsQuasiRegular) {
  const auto v = check_quasi_regularity(regular_gne(), regular_solution());
  EXPECT_TRUE(v.regular());
  EXPECT_GT(v.min_singular_value, kSingularThreshold);
  EXPECT_EQ(v.elements_checked, 1);
  EXPECT_FALSE(v.partial);
}

TEST(SemismoothNewton, DuplicatedSharedRowIsNotQuasiRegular) {
  // Both agents register a1 + a2 <= 1, so the two constraint rows of every
  // element coincide.
  const auto v = check_quasi_regularity(analytic_shared_constraint_gne(), Vector::Constant(4, 0.5));
  EXPECT_FALSE(v.regular());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_LT(v.min_singular_value, kSingularThreshold);
}

TEST(SemismoothNewton, TiedRowsEnumerateEveryBranchCombination) {
  // lambda_1 = 0 with the constraint active: a weakly active row.
  QuadraticGameData d;
  d.dims = {1, 1};
  d.Q = {{Matrix::Ones(1, 1), Matrix::Zero(1, 1)}, {Matrix::Zero(1, 1), Matrix::Ones(1, 1)}};
  d.c = {-Vector::Constant(1, 0.25), Vector::Zero(1)};
  auto game = make_quadratic_game(d);
  Matrix C(1, 2);
  C << 1, 0;
  game.with_constraints({make_constraint_function({C, Vector::Constant(1, 0.25)}, {}, 2),
                         ConstraintFunction::none(2)});
  Vector z(3);
  z << 0.25, 0.0, 0.0;
  ASSERT_LE(assemble_phi(game, z).norm(), 1e-15);
  const auto v = check_quasi_regularity(game, z);
  EXPECT_EQ(v.ties, 1);
  EXPECT_EQ(v.elements_checked, 2);
  EXPECT_TRUE(v.regular());
}

TEST(SemismoothNewton, InactivePerturbationIsBitwiseIdentical) {
  const auto game = regular_gne();
  Vector z0(3);
  z0 << 0.3, 0.2, 0.7;
  const auto plain = semismooth_newton(game, z0, {});
  const auto pert = perturbed_semismooth_newton(game, z0, {}, PerturbationSpec{});
  ASSERT_EQ(plain.iterates.size(), pert.iterates.size());
  for (std::size_t k = 0; k < plain.iterates.size(); ++k)
    EXPECT_TRUE(plain.iterates[k] == pert.iterates[k]);
}

TEST(SemismoothNewton, OnlyResidualInjectionIsAccepted) {
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::AdditiveGradient;
  p.magnitude = 1e-3;
  EXPECT_THROW(perturbed_semismooth_newton(regular_gne(), regular_solution(), {}, p),
               InputError);
}

TEST(SemismoothNewton, PerturbedErrorStaysProportionalToTheDisturbance) {
  const Vector ref = regular_solution();
  NewtonConfig cfg;
  cfg.stop_on_tolerance = false;
  cfg.max_outer = 40;
  for (double delta : {1e-6, 1e-4}) {
    PerturbationSpec p;
    p.mode = PerturbationSpec::Mode::ResidualInjection;
    p.magnitude = delta;
    p.seed = 3;
    const auto tr = perturbed_semismooth_newton(regular_gne(), ref, cfg, p, TieRule::PreferG, ref);
    ASSERT_EQ(tr.status, SolverStatus::BudgetExhausted);
    double worst = 0.0;
    for (double e : *tr.error_to_ref) worst = std::max(worst, e);
    EXPECT_LE(worst, 10.0 * delta);
  }
}

TEST(SemismoothNewton, DistributedVariantReachesTheSameSolution) {
  const Vector ref = regular_solution();
  Vector z0(3);
  z0 << 0.3, 0.2, 0.7;
  NewtonConfig cfg;
  cfg.tol_outer = 1e-13;
  cfg.inner.tol_inner = 1e-14;
  cfg.max_outer = 200;
  const auto tr = distributed_semismooth_newton(regular_gne(), z0, cfg);
  ASSERT_TRUE(tr.converged()) << to_string(tr.status);
  EXPECT_LE((tr.final_point() - ref).norm(), 1e-10);
}

TEST(SemismoothNewton, AnalyticGneConvergesOntoTheSolutionSet) {
  // The duplicated row leaves a1 = 1 - lambda_1, a2 = 1 - lambda_2 with
  // lambda_1 + lambda_2 = 1: Phi reaches zero, the limit depends on z0.
  Vector z0(4);
  z0 << 0.55, 0.45, 0.5, 0.52;
  NewtonConfig cfg;
  cfg.tol_outer = 1e-10;
  const auto tr = semismooth_newton(analytic_shared_constraint_gne(), z0, cfg);
  ASSERT_TRUE(tr.converged()) << to_string(tr.status);
  const Vector& z = tr.final_point();
  EXPECT_NEAR(z(0) + z(1), 1.0, 1e-9);
  EXPECT_NEAR(z(2) + z(3), 1.0, 1e-9);
}

TEST(SemismoothNewton, SingularNewtonSystemTakesTheMinimumNormStep) {
  // Two identical rows: LU must not report a direct solve.
  Matrix J(4, 4);
  J << 1, 0, 1, 0, 0, 1, 0, 1, -1, -1, 0, 0, -1, -1, 0, 0;
  Vector rhs(4);
  rhs << 0.2, 0.2, -0.2, -0.2;
  Vector x;
  EXPECT_EQ(solve_newton_system(J, rhs, x), LinearSolveStatus::Regularized);
  EXPECT_LE((J * x - rhs).norm(), 1e-12);
  // Minimum norm: x is orthogonal to the null space of J.
  Vector null(4);
  null << 1, -1, -1, 1;
  EXPECT_NEAR(x.dot(null), 0.0, 1e-12);
}

TEST(SemismoothNewton, AnalyticGneFromSymmetricStartReachesTheSymmetricSolution) {
  const Vector z0 = Vector::Constant(4, 0.4);
  NewtonConfig cfg;
  cfg.tol_outer = 1e-10;
  const auto tr = semismooth_newton(analytic_shared_constraint_gne(), z0, cfg);
  ASSERT_TRUE(tr.converged()) << to_string(tr.status);
  EXPECT_LE(tr.iterations(), 6);
  EXPECT_LE((tr.final_point() - Vector::Constant(4, 0.5)).norm(), 1e-8);
}

}  // namespace
}  // namespace nashnewton
