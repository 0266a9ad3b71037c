#pragma once

#include "nashnewton/affine_vi.hpp"
#include "nashnewton/game.hpp"
#include "nashnewton/perturbation.hpp"
#include "nashnewton/trace.hpp"

#include <limits>
#include <optional>

namespace nashnewton {

struct NewtonConfig {
  /// Terminal residual: natural-map residual for VI solvers, |Phi| for the
  /// semismooth solvers.
  double tol_outer = 1e-10;
  int max_outer = 50;
  ViOptions inner;
  /// a^{k+1} = a^k + damping (subproblem solution - a^k).
  double damping = 1.0;
  /// Diverged once the residual exceeds this multiple of the initial one.
  double divergence_factor = 1e6;
  /// When false the solver runs exactly max_outer iterations and reports
  /// BudgetExhausted (fixed-budget semantics).
  bool stop_on_tolerance = true;
  /// Largest admissible perturbation magnitude.
  double max_perturbation = std::numeric_limits<double>::infinity();
  /// Run the per-agent subproblems of one Jacobi round on separate threads.
  bool parallel_agents = false;

  void validate() const;
};

/// Natural-map residual |a - proj_A(a - F(a))| of the game's VI.
double game_residual(const GameProblem& game, const Vector& a);

/// Josephy-Newton: each iteration solves the affine VI with M = H(a^k) and
/// q = F(a^k) - H(a^k) a^k over the game's feasible region.
IterateTrace josephy_newton(const GameProblem& game, const Vector& a0,
                            const NewtonConfig& cfg,
                            const std::optional<Vector>& ref = std::nullopt);

/// Josephy-Newton with a disturbance injected at every iteration. With an
/// inactive spec the iterates coincide bitwise with josephy_newton.
IterateTrace perturbed_josephy_newton(const GameProblem& game, const Vector& a0,
                                      const NewtonConfig& cfg,
                                      const PerturbationSpec& pert,
                                      const std::optional<Vector>& ref = std::nullopt);

/// Jacobi round in which agent i solves its own affine VI with
/// M_i = d2J_i/da_i^2 (a^k) and q_i = grad_i(a^k) - M_i a_i^k over A_i.
IterateTrace distributed_jn_mechanism1(const GameProblem& game, const Vector& a0,
                                       const NewtonConfig& cfg,
                                       const std::optional<Vector>& ref = std::nullopt);

enum class BestResponseOrder { Jacobi, GaussSeidel };

struct BestResponseOptions {
  BestResponseOrder order = BestResponseOrder::Jacobi;
  /// Block residual at which an agent's inner Josephy-Newton stops.
  double tol_br = 1e-12;
  int max_inner = 50;
};

/// Best-response dynamics in which every best response is computed by an
/// inner Josephy-Newton iteration on the agent's own problem. Throws
/// SolverError(SingularAgentBlock) if some d2J_i/da_i^2 is singular at a0.
IterateTrace distributed_jn_mechanism2(const GameProblem& game, const Vector& a0,
                                       const NewtonConfig& cfg,
                                       const BestResponseOptions& br = {},
                                       const std::optional<Vector>& ref = std::nullopt);

}  // namespace nashnewton
