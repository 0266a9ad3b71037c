#pragma once

#include "nashnewton/game.hpp"
#include "nashnewton/josephy_newton.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nashnewton {

/// One agent of a linear-quadratic MPC scenario: x+ = A x + B u, stage
/// cost 0.5 x'Qx + 0.5 u'Ru, terminal cost 0.5 x'Px.
struct MpcAgent {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix R;
  Matrix P;
  /// Input bounds, entries may be infinite. Empty means unbounded.
  Vector u_lower;
  Vector u_upper;
  /// Plant map for simulation only. Games cannot be built for agents that
  /// set it (no derivative oracles), so build_parameterized_game throws.
  std::function<Vector(const Vector&, const Vector&)> nonlinear;

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(B.cols()); }
};

struct MpcScenario {
  std::vector<MpcAgent> agents;
  /// pursuit(i, j) >= 0: agent i pays 0.5 pursuit(i, j) |x_i - x_j|^2 at
  /// every predicted state (agents i and j must share a state dimension).
  Matrix pursuit;
  /// Shared constraint E x(tau) <= f on the joint predicted state, imposed
  /// at tau = 1..T. Forces the multiple-shooting GNE formulation.
  std::optional<LinearRows> shared_state;
  /// Use the multiple-shooting GNE formulation even without shared rows.
  bool multiple_shooting = false;
  int horizon = 5;
  Vector x0;
  std::vector<int> budgets{1, 2, 3, 5, 8};
  int t_end = 40;
  /// Norm of the offset added to the exact initial solution estimate.
  double e0 = 0.0;
  std::uint64_t seed = 0;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int state_dimension() const;
  int state_offset(int i) const;
  void validate() const;
};

/// Two scalar agents x+ = x + u with asymmetric pursuit coupling, input
/// bounds [-0.6, 0.6], T = 5, t_end = 40, K in {1, 2, 3, 5, 8}.
MpcScenario builtin_pursuit_scenario();

/// Game solved at one sampling instant for the current state x.
///
/// NashFastPath: linear plants without shared constraints; the predicted
/// states are eliminated and agent i decides mu_i(0..T-1) over a box.
/// MultipleShooting: agent i decides (xi_i(1..T), mu_i(0..T-1)); dynamics
/// enter as paired inequality rows and shared state rows are registered by
/// every agent.
struct ParameterizedGame {
  enum class Mode { NashFastPath, MultipleShooting };

  Mode mode = Mode::NashFastPath;
  GameProblem game;
  Vector x;
  int horizon = 0;
  std::vector<int> input_dims;
  /// Index of mu_i(0) inside the primal decision vector.
  std::vector<int> input_offsets;

  int primal_dimension() const { return game.dimension(); }
  Vector primal(const Vector& v) const { return v.head(primal_dimension()); }
  /// Stacked first-step inputs mu_i(0) of every agent.
  Vector select_inputs(const Vector& v) const;
};

ParameterizedGame build_parameterized_game(const MpcScenario& s, const Vector& x);

enum class MpcSolver { JN, SemismoothNewton, DistributedJN, DistributedSSN };

const char* to_string(MpcSolver solver);
/// True for the solvers that iterate on primal-dual vectors.
bool uses_multipliers(MpcSolver solver);

/// Length of a solution estimate for the given solver.
int estimate_dimension(const ParameterizedGame& pg, MpcSolver solver);

struct TdoResult {
  Vector v;
  /// Residual of v: natural-map residual or |Phi|.
  double residual = 0.0;
};

/// Exactly K iterations of `solver` warm-started at v_prev, with no early
/// stop. Throws SolverError(NotConverged) if the solver fails within the
/// budget.
TdoResult tdo_step(const ParameterizedGame& pg, const Vector& v_prev, int K,
                   MpcSolver solver, const NewtonConfig& base = {});

class NonIsolatedError : public SolverError {
 public:
  NonIsolatedError(const std::string& what, std::vector<Vector> witnesses)
      : SolverError(Kind::NonIsolated, what), witnesses_(std::move(witnesses)) {}

  const std::vector<Vector>& witnesses() const noexcept { return witnesses_; }

 private:
  std::vector<Vector> witnesses_;
};

struct ReferenceOptions {
  double tol = 1e-12;
  int max_iter = 200;
  int restarts = 5;
  double restart_scale = 1.0;
  /// Primal distance above which two solutions count as distinct.
  double distinct_tol = 1e-6;
  std::uint64_t seed = 0;
};

struct ReferenceResult {
  Vector v;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves pg from v_hint with the centralized solver matching `solver`
/// (Josephy-Newton for the JN family, semismooth Newton otherwise), then
/// re-solves from randomized restarts. Throws SolverError(NotConverged) if
/// the main solve fails and NonIsolatedError if a restart converges to a
/// different solution.
ReferenceResult reference_solution(const ParameterizedGame& pg, const Vector& v_hint,
                                   MpcSolver solver, const ReferenceOptions& opt = {});

struct ClosedLoopStep {
  int t = 0;
  Vector x;
  Vector u;
  Vector v;
  Vector v_star;
  double e = 0.0;
  double dx = 0.0;
  double residual = 0.0;
};

struct ClosedLoopLog {
  int K = 0;
  MpcSolver solver = MpcSolver::DistributedJN;
  /// Length of the primal part of v (the rest are multipliers).
  int primal_dimension = 0;
  std::vector<ClosedLoopStep> steps;
  Vector x_final;

  double sup_e() const;
};

class ClosedLoopAborted : public std::runtime_error {
 public:
  ClosedLoopAborted(const std::string& what, ClosedLoopLog partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const ClosedLoopLog& partial() const noexcept { return partial_; }

 private:
  ClosedLoopLog partial_;
};

struct ClosedLoopOptions {
  NewtonConfig solver;
  ReferenceOptions reference;
  /// Overrides scenario.e0 when set.
  std::optional<double> e0;
};

/// Time-distributed closed loop: v(t) = K solver iterations on game(x(t))
/// from v(t-1), u(t) = first inputs of v(t), x(t+1) = f(x(t), u(t)).
/// e(t) = |v(t) - v*(t)| on the primal part.
ClosedLoopLog run_closed_loop(const MpcScenario& s, MpcSolver solver, int K,
                              std::uint64_t seed, const ClosedLoopOptions& opt = {});

struct ContractionFit {
  int K = 0;
  double alpha = 0.0;
  double theta = 0.0;
  int samples = 0;
  int violations = 0;
  double slack = 1.1;
  /// Smallest slack that would cover every step.
  double required_slack = 0.0;
  double sup_e = 0.0;
};

/// Least-squares fit of e(t+1) ~ alpha e(t) + theta dx(t) over steps with
/// e(t) > 1e-12 (at least 20 required, TooFewPoints otherwise).
ContractionFit estimate_contraction(const ClosedLoopLog& log, double slack = 1.1);

struct ContractionTable {
  std::vector<ContractionFit> fits;
  bool alpha_nonincreasing = false;
  bool theta_nonincreasing = false;
  bool sup_e_nonincreasing = false;
};

/// One fit per log (logs ordered by increasing K).
ContractionTable estimate_contraction(const std::vector<ClosedLoopLog>& logs,
                                      double slack = 1.1);

struct LipschitzProbe {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  /// max_ratio exceeds 100 x the median, or is not finite.
  bool flagged = false;
};

/// Ratios |v*(t+1) - v*(t)| / dx(t) along a closed-loop log.
LipschitzProbe lipschitz_probe(const ClosedLoopLog& log);

}  // namespace nashnewton
