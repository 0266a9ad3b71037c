#pragma once

#include "nashnewton/game.hpp"
#include "nashnewton/kkt.hpp"

#include <cstdint>

namespace nashnewton {

/// A GNE problem with one shared constraint g(a) <= 0, rewritten as the
/// VI(A, F) over A = { a : g(a) <= 0 }.
struct VgneReduction {
  /// Same costs as the original game; feasible region is the shared set.
  GameProblem ne_game;
  LinearRows shared;
  /// Largest |g_i(a) - g_1(a)| seen by the commonality check.
  double max_deviation = 0.0;

  /// Shared multiplier at a: nonnegative least-squares solution of
  /// F(a) + C_act' lambda_bar = 0 on the rows active within tol_act.
  Vector shared_multiplier(const Vector& a, double tol_act = 1e-8) const;

  /// Primal-dual point of the original GNE with lambda_i = lambda_bar for
  /// every agent.
  PrimalDualPoint lift(const Vector& a, const Vector& lambda_bar) const;
};

/// Checks that every agent registered the same constraint function (10
/// random evaluation points, deviation at most 1e-12; SolverError
/// ConstraintsNotCommon otherwise) and builds the reduction. Shared
/// constraints must be linear (SolverError Unsupported otherwise). A game
/// without constraints reduces to the plain NE problem.
VgneReduction vgne_reduce(const GameProblem& game, std::uint64_t seed = 0);

}  // namespace nashnewton
