#pragma once

#include "nashnewton/game.hpp"
#include "nashnewton/trace.hpp"

namespace nashnewton {

/// |-g - lambda| at or below this value is a kink of min(-g, lambda).
inline constexpr double kTieThreshold = 1e-12;

/// z = (a, lambda) with lambda stacked per agent.
struct PrimalDualPoint {
  Vector a;
  Vector lambda;

  Vector stacked() const;
  static PrimalDualPoint split(const Vector& z, int n);
};

enum class TieRule { PreferG, PreferLambda };

const char* to_string(TieRule rule);

/// Stacked d/da_i L_i = grad_i J_i + (d g_i / d a_i)' lambda_i.
Vector lagrangian_gradient(const GameProblem& game, const PrimalDualPoint& z);

/// Stacked g_i(a).
Vector stacked_constraints(const GameProblem& game, const Vector& a);

/// Phi(z) = [ lagrangian_gradient ; min(-g(a), lambda) ].
Vector assemble_phi(const GameProblem& game, const PrimalDualPoint& z);
Vector assemble_phi(const GameProblem& game, const Vector& z);

struct JacobianElement {
  Matrix matrix;
  BranchRecord branches;
};

/// Element of the limiting Jacobian of Phi at z. Complementarity rows with
/// -g < lambda take the constraint row, lambda < -g the unit multiplier
/// row, and ties are resolved by `rule`.
JacobianElement limiting_jacobian(const GameProblem& game, const PrimalDualPoint& z,
                                  TieRule rule);

/// Jacobian element for an explicit branch choice per complementarity row.
Matrix jacobian_for_branches(const GameProblem& game, const PrimalDualPoint& z,
                             const std::vector<Branch>& branches);

/// Branch record at z without assembling the matrix.
BranchRecord branch_record(const GameProblem& game, const PrimalDualPoint& z,
                           TieRule rule);

/// lambda0_i = max(0, least-squares solution of
/// (d g_i / d a_i)' lambda_i = -grad_i J_i(a)).
Vector initial_multipliers(const GameProblem& game, const Vector& a);

}  // namespace nashnewton
