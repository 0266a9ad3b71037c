#include "nashnewton/josephy_newton.hpp"

#include "nashnewton/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <string>

namespace nashnewton {

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
 public:
  explicit Recorder(IterateTrace& trace) : trace_(trace), start_(Clock::now()) {}

  void push(const Vector& a, double residual, double step) {
    trace_.iterates.push_back(a);
    trace_.residuals.push_back(residual);
    trace_.step_norms.push_back(step);
    trace_.wall_seconds.push_back(
        std::chrono::duration<double>(Clock::now() - start_).count());
  }

 private:
  IterateTrace& trace_;
  Clock::time_point start_;
};

const FeasibleRegion& ne_region(const GameProblem& game) {
  if (game.has_constraints() && !game.has_region())
    throw InputError("Josephy-Newton solvers need an NE-form game (fixed feasible sets)");
  return game.region();
}

Vector feasible_start(const FeasibleRegion& region, const Vector& a0,
                      IterateTrace& trace) {
  if (!a0.allFinite()) throw InputError("start point is not finite");
  if (region.contains(a0, 1e-12)) return a0;
  trace.warnings.push_back("start point projected onto the feasible set");
  return region.project(a0);
}

void finish(IterateTrace& trace, const std::optional<Vector>& ref) {
  if (ref) trace.set_reference(*ref);
}

// Shared loop of the centralized and perturbed Josephy-Newton methods.
IterateTrace run_josephy_newton(const GameProblem& game, const Vector& a0,
                                const NewtonConfig& cfg,
                                const PerturbationSpec* pert,
                                const std::optional<Vector>& ref) {
  cfg.validate();
  game.require_dimension(a0);
  const FeasibleRegion& region = ne_region(game);
  const int n = game.dimension();

  std::optional<PerturbationSource> source;
  PerturbationSpec::Mode mode = PerturbationSpec::Mode::None;
  if (pert && !pert->inactive()) {
    pert->validate();
    if (pert->effective_magnitude() > cfg.max_perturbation)
      throw InputError("perturbation magnitude exceeds the configured guard");
    mode = pert->mode;
    const int len = mode == PerturbationSpec::Mode::AdditiveHessian ? n * n : n;
    source.emplace(*pert, len);
  }

  IterateTrace trace;
  Recorder rec(trace);
  Vector a = feasible_start(region, a0, trace);
  double res = game_residual(game, a);
  rec.push(a, res, 0.0);
  // Started at the solution, the disturbance alone sets the residual scale.
  const double res0 =
      std::max({res, cfg.tol_outer, source ? pert->effective_magnitude() : 0.0});

  for (int k = 0;; ++k) {
    if (cfg.stop_on_tolerance && res <= cfg.tol_outer) {
      trace.status = SolverStatus::Converged;
      break;
    }
    if (k >= cfg.max_outer) {
      trace.status = cfg.stop_on_tolerance ? SolverStatus::MaxIterations
                                           : SolverStatus::BudgetExhausted;
      break;
    }
    Vector F = pseudogradient(game, a);
    Matrix H = game_hessian(game, a).assembled;
    Vector v;
    if (source) {
      v = source->draw();
      switch (mode) {
        case PerturbationSpec::Mode::AdditiveGradient:
          F += v;
          break;
        case PerturbationSpec::Mode::AdditiveHessian:
          H += Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(v.data(), n, n);
          break;
        default:
          break;
      }
    }
    Vector q = F - H * a;
    if (source && mode == PerturbationSpec::Mode::ResidualInjection) q -= v;

    const ViSolution sol = solve_affine_vi({H, q, region}, a, cfg.inner);
    if (!sol.converged()) {
      trace.status = SolverStatus::InnerSolveFailed;
      trace.failed_at = k;
      break;
    }
    const Vector next = a + cfg.damping * (sol.a - a);
    const double step = (next - a).norm();
    a = next;
    res = game_residual(game, a);
    trace.perturbations.push_back(v);
    rec.push(a, res, step);
    if (!std::isfinite(res) || res > cfg.divergence_factor * res0) {
      trace.status = SolverStatus::Diverged;
      trace.failed_at = k + 1;
      break;
    }
  }
  finish(trace, ref);
  return trace;
}

Vector agent_gradient(const GameProblem& game, const Vector& a, int i) {
  if (!game.cost(i).gradient)
    throw CapabilityError("agent " + std::to_string(i) + " has no gradient oracle");
  return game.cost(i).gradient(a);
}

double block_residual(const FeasibleRegion& region_i, const Vector& ai,
                      const Vector& gi) {
  return vi_natural_residual(region_i, ai, gi);
}

}  // namespace

void NewtonConfig::validate() const {
  if (!(tol_outer > 0.0)) throw InputError("tol_outer must be positive");
  if (max_outer < 0) throw InputError("max_outer must be nonnegative");
  if (stop_on_tolerance && max_outer < 1)
    throw InputError("max_outer must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0))
    throw InputError("damping must lie in (0, 1]");
  if (!(inner.tol_inner > 0.0)) throw InputError("tol_inner must be positive");
  if (inner.max_iter < 1) throw InputError("inner max_iter must be at least 1");
  if (!(divergence_factor > 1.0))
    throw InputError("divergence_factor must exceed 1");
}

double game_residual(const GameProblem& game, const Vector& a) {
  return vi_natural_residual(game.region(), a, pseudogradient(game, a));
}

IterateTrace josephy_newton(const GameProblem& game, const Vector& a0,
                            const NewtonConfig& cfg,
                            const std::optional<Vector>& ref) {
  return run_josephy_newton(game, a0, cfg, nullptr, ref);
}

IterateTrace perturbed_josephy_newton(const GameProblem& game, const Vector& a0,
                                      const NewtonConfig& cfg,
                                      const PerturbationSpec& pert,
                                      const std::optional<Vector>& ref) {
  return run_josephy_newton(game, a0, cfg, &pert, ref);
}

IterateTrace distributed_jn_mechanism1(const GameProblem& game, const Vector& a0,
                                       const NewtonConfig& cfg,
                                       const std::optional<Vector>& ref) {
  cfg.validate();
  game.require_dimension(a0);
  const FeasibleRegion& region = ne_region(game);
  const int N = game.num_agents();
  std::vector<FeasibleRegion> local;
  for (int i = 0; i < N; ++i) local.push_back(region.block_region(i));

  IterateTrace trace;
  Recorder rec(trace);
  Vector a = feasible_start(region, a0, trace);
  double res = game_residual(game, a);
  rec.push(a, res, 0.0);
  const double res0 = std::max(res, cfg.tol_outer);

  for (int k = 0;; ++k) {
    if (cfg.stop_on_tolerance && res <= cfg.tol_outer) {
      trace.status = SolverStatus::Converged;
      break;
    }
    if (k >= cfg.max_outer) {
      trace.status = cfg.stop_on_tolerance ? SolverStatus::MaxIterations
                                           : SolverStatus::BudgetExhausted;
      break;
    }
    const Vector F = pseudogradient(game, a);
    auto solve_agent = [&](int i) {
      const Matrix Mi = own_hessian(game, a, i);
      const Vector ai = game.block(a, i);
      const Vector qi = F.segment(game.offset(i), game.dim(i)) - Mi * ai;
      return solve_affine_vi({Mi, qi, local[i]}, ai, cfg.inner);
    };
    std::vector<ViSolution> sols(N);
    if (cfg.parallel_agents && N > 1) {
      std::vector<std::future<ViSolution>> jobs;
      for (int i = 0; i < N; ++i)
        jobs.push_back(std::async(std::launch::async, solve_agent, i));
      for (int i = 0; i < N; ++i) sols[i] = jobs[i].get();
    } else {
      for (int i = 0; i < N; ++i) sols[i] = solve_agent(i);
    }

    Vector next = a;
    bool failed = false;
    for (int i = 0; i < N && !failed; ++i) {
      if (!sols[i].converged()) {
        trace.status = SolverStatus::InnerSolveFailed;
        trace.failed_at = k;
        trace.failed_agent = i;
        failed = true;
        break;
      }
      next.segment(game.offset(i), game.dim(i)) =
          game.block(a, i) + cfg.damping * (sols[i].a - game.block(a, i));
    }
    if (failed) break;
    const double step = (next - a).norm();
    a = next;
    res = game_residual(game, a);
    trace.perturbations.emplace_back();
    rec.push(a, res, step);
    if (!std::isfinite(res) || res > cfg.divergence_factor * res0) {
      trace.status = SolverStatus::Diverged;
      trace.failed_at = k + 1;
      break;
    }
  }
  finish(trace, ref);
  return trace;
}

IterateTrace distributed_jn_mechanism2(const GameProblem& game, const Vector& a0,
                                       const NewtonConfig& cfg,
                                       const BestResponseOptions& br,
                                       const std::optional<Vector>& ref) {
  cfg.validate();
  game.require_dimension(a0);
  if (!(br.tol_br > 0.0)) throw InputError("tol_br must be positive");
  if (br.max_inner < 1) throw InputError("max_inner must be at least 1");
  const FeasibleRegion& region = ne_region(game);
  const int N = game.num_agents();
  std::vector<FeasibleRegion> local;
  for (int i = 0; i < N; ++i) local.push_back(region.block_region(i));

  IterateTrace trace;
  Vector a = feasible_start(region, a0, trace);

  for (int i = 0; i < N; ++i) {
    const Matrix Mi = own_hessian(game, a, i);
    const double scale = std::max(1.0, Mi.cwiseAbs().maxCoeff());
    if (smallest_singular_value(Mi) <= 1e-12 * scale)
      throw SolverError(SolverError::Kind::SingularAgentBlock,
                        "agent " + std::to_string(i) +
                            ": own Hessian block is singular at the start point");
  }

  Recorder rec(trace);
  double res = game_residual(game, a);
  rec.push(a, res, 0.0);
  const double res0 = std::max(res, cfg.tol_outer);

  // Returns false and fills the failure fields if the inner iteration fails.
  auto best_response = [&](const Vector& base, int i, Vector& out, int k) {
    Vector y = base;
    const int off = game.offset(i);
    const int ni = game.dim(i);
    for (int it = 0;; ++it) {
      const Vector xi = y.segment(off, ni);
      const Vector gi = agent_gradient(game, y, i);
      if (block_residual(local[i], xi, gi) <= br.tol_br) break;
      if (it >= br.max_inner) {
        trace.status = SolverStatus::InnerSolveFailed;
        trace.failed_at = k;
        trace.failed_agent = i;
        return false;
      }
      const Matrix Mi = own_hessian(game, y, i);
      const ViSolution sol = solve_affine_vi({Mi, gi - Mi * xi, local[i]}, xi, cfg.inner);
      if (!sol.converged()) {
        trace.status = SolverStatus::InnerSolveFailed;
        trace.failed_at = k;
        trace.failed_agent = i;
        return false;
      }
      y.segment(off, ni) = sol.a;
    }
    out = y.segment(off, ni);
    return true;
  };

  for (int k = 0;; ++k) {
    if (cfg.stop_on_tolerance && res <= cfg.tol_outer) {
      trace.status = SolverStatus::Converged;
      break;
    }
    if (k >= cfg.max_outer) {
      trace.status = cfg.stop_on_tolerance ? SolverStatus::MaxIterations
                                           : SolverStatus::BudgetExhausted;
      break;
    }
    Vector next = a;
    bool ok = true;
    for (int i = 0; i < N && ok; ++i) {
      const Vector& base = br.order == BestResponseOrder::Jacobi ? a : next;
      Vector bri;
      ok = best_response(base, i, bri, k);
      if (ok) {
        const Vector ai = game.block(a, i);
        next.segment(game.offset(i), game.dim(i)) = ai + cfg.damping * (bri - ai);
      }
    }
    if (!ok) break;
    const double step = (next - a).norm();
    a = next;
    res = game_residual(game, a);
    trace.perturbations.emplace_back();
    rec.push(a, res, step);
    if (!std::isfinite(res) || res > cfg.divergence_factor * res0) {
      trace.status = SolverStatus::Diverged;
      trace.failed_at = k + 1;
      break;
    }
    if (cfg.stop_on_tolerance && res > cfg.tol_outer) {
      const int last = static_cast<int>(trace.iterates.size()) - 1;
      bool repeated = false;
      for (int j = 0; j < last && !repeated; ++j)
        repeated = (trace.iterates[j] - a).cwiseAbs().maxCoeff() <= 1e-12;
      if (repeated) {
        trace.status = SolverStatus::OuterCycleDetected;
        trace.failed_at = k + 1;
        break;
      }
    }
  }
  finish(trace, ref);
  return trace;
}

}  // namespace nashnewton
