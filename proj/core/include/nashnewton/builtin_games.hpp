#pragma once

#include "nashnewton/game.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace nashnewton {

/// J_i = 0.5 a_i' Q_ii a_i + sum_{j != i} a_i' Q_ij a_j + c_i' a_i.
/// Q_ii is symmetrized on construction.
struct QuadraticGameData {
  std::vector<int> dims;
  std::vector<std::vector<Matrix>> Q;  // Q[i][j] is n_i x n_j
  std::vector<Vector> c;

  /// Assembled game Hessian (constant for this family).
  Matrix hessian() const;
  void validate() const;
};

/// Optional nonquadratic terms added on top of a QuadraticGameData cost:
///   (beta_i / 4) sum_k a_ik^4 + gamma_i sum_{j != i} sum_k a_ik a_jk^2.
/// The cross term requires all agents to share one dimension.
struct QuarticTerms {
  std::vector<double> beta;
  std::vector<double> gamma;
};

GameProblem make_quadratic_game(const QuadraticGameData& data);
GameProblem make_quartic_game(const QuadraticGameData& data,
                              const QuarticTerms& quartic);

/// Constraint rows g(a) = 0.5 a' P a + r' a + s (P symmetrized).
struct QuadraticConstraintRow {
  Matrix P;
  Vector r;
  double s = 0.0;
};

/// Linear rows C a - d stacked above the quadratic rows.
ConstraintFunction make_constraint_function(
    const LinearRows& linear, const std::vector<QuadraticConstraintRow>& quad,
    int n);

/// Two scalar agents, J1 = a1^2/2 - 3 a1 a2, J2 = a1 a2 (non-monotone
/// pseudogradient, strictly semicopositive Hessian on the open orthant).
QuadraticGameData semicopositive_game_data();

/// Two scalar agents with J_i = a_i^2/2 - a_i and the shared constraint
/// a1 + a2 <= 1 registered separately by both agents.
GameProblem analytic_shared_constraint_gne();

/// Standard nonquadratic test game: two agents in R^2, box [-2, 2]^2 each,
/// quadratic part with equal singular values plus quartic self and cross
/// terms. Returns the game; its data is available through the out-params.
GameProblem builtin_quartic_game(QuadraticGameData* data = nullptr,
                                 QuarticTerms* quartic = nullptr);

/// Random strongly monotone quadratic game (symmetric part of H is
/// positive definite) with the given agent dimensions.
QuadraticGameData random_monotone_quadratic_game(const std::vector<int>& dims,
                                                 std::mt19937_64& rng);

/// Random monotone quadratic game in GNE form: every agent registers the
/// same `rows` linear constraints C a <= d. Every row cuts off the
/// unconstrained equilibrium, and the unit normals share a direction w with
/// c_r'w <= -0.3, which keeps the set nonempty and well conditioned.
GameProblem random_shared_constraint_game(const std::vector<int>& dims, int rows,
                                          std::mt19937_64& rng);

}  // namespace nashnewton
