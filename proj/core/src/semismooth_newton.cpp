#include "nashnewton/semismooth_newton.hpp"

#include "nashnewton/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <string>

namespace nashnewton {

namespace {

using Clock = std::chrono::steady_clock;

struct Run {
  IterateTrace trace;
  Clock::time_point start = Clock::now();

  void push(const Vector& z, double residual, double step, BranchRecord rec) {
    trace.iterates.push_back(z);
    trace.residuals.push_back(residual);
    trace.step_norms.push_back(step);
    trace.branches.push_back(std::move(rec));
    trace.wall_seconds.push_back(
        std::chrono::duration<double>(Clock::now() - start).count());
  }
};

void require_stacked(const GameProblem& game, const Vector& z0) {
  if (z0.size() != game.dimension() + game.num_multipliers())
    throw InputError("primal-dual start has length " + std::to_string(z0.size()) +
                     ", expected " +
                     std::to_string(game.dimension() + game.num_multipliers()));
  if (!z0.allFinite()) throw InputError("primal-dual start is not finite");
}

// Row/column indices of agent i's variables (a_i, lambda_i) inside z.
std::vector<int> agent_indices(const GameProblem& game, int i) {
  std::vector<int> idx;
  for (int k = 0; k < game.dim(i); ++k) idx.push_back(game.offset(i) + k);
  for (int c = 0; c < game.multiplier_count(i); ++c)
    idx.push_back(game.dimension() + game.multiplier_offset(i) + c);
  return idx;
}

enum class Update { Centralized, Distributed };

IterateTrace run(const GameProblem& game, const Vector& z0, const NewtonConfig& cfg,
                 TieRule rule, const PerturbationSpec* pert, Update update,
                 const std::optional<Vector>& ref) {
  cfg.validate();
  require_stacked(game, z0);
  const int n = game.dimension();
  const int dim = n + game.num_multipliers();

  std::optional<PerturbationSource> source;
  if (pert && !pert->inactive()) {
    pert->validate();
    if (pert->mode != PerturbationSpec::Mode::ResidualInjection)
      throw InputError("semismooth Newton accepts residual-injection perturbations only");
    if (pert->effective_magnitude() > cfg.max_perturbation)
      throw InputError("perturbation magnitude exceeds the configured guard");
    source.emplace(*pert, dim);
  }

  std::vector<std::vector<int>> blocks;
  if (update == Update::Distributed)
    for (int i = 0; i < game.num_agents(); ++i) blocks.push_back(agent_indices(game, i));

  Run r;
  Vector z = z0;
  Vector phi = assemble_phi(game, z);
  double res = phi.norm();
  JacobianElement jac = limiting_jacobian(game, PrimalDualPoint::split(z, n), rule);
  r.push(z, res, 0.0, jac.branches);
  const double res0 =
      std::max({res, cfg.tol_outer, source ? pert->effective_magnitude() : 0.0});

  for (int k = 0;; ++k) {
    if (cfg.stop_on_tolerance && res <= cfg.tol_outer) {
      r.trace.status = SolverStatus::Converged;
      break;
    }
    if (k >= cfg.max_outer) {
      r.trace.status = cfg.stop_on_tolerance ? SolverStatus::MaxIterations
                                             : SolverStatus::BudgetExhausted;
      break;
    }
    Vector rhs = -phi;
    Vector v;
    if (source) {
      v = source->draw();
      rhs += v;
    }

    Vector d(dim);
    bool failed = false;
    if (update == Update::Centralized) {
      const auto status = solve_newton_system(jac.matrix, rhs, d);
      if (status == LinearSolveStatus::Failed) failed = true;
      if (status == LinearSolveStatus::Regularized) ++r.trace.regularized_steps;
    } else {
      auto solve_block = [&](int i, Vector& di) {
        const auto& idx = blocks[i];
        const int bn = static_cast<int>(idx.size());
        Matrix Jii(bn, bn);
        Vector bi(bn);
        for (int p = 0; p < bn; ++p) {
          bi(p) = rhs(idx[p]);
          for (int q = 0; q < bn; ++q) Jii(p, q) = jac.matrix(idx[p], idx[q]);
        }
        return solve_newton_system(Jii, bi, di);
      };
      const int N = game.num_agents();
      std::vector<Vector> parts(N);
      std::vector<LinearSolveStatus> status(N);
      if (cfg.parallel_agents && N > 1) {
        std::vector<std::future<LinearSolveStatus>> jobs;
        for (int i = 0; i < N; ++i)
          jobs.push_back(std::async(std::launch::async, solve_block, i, std::ref(parts[i])));
        for (int i = 0; i < N; ++i) status[i] = jobs[i].get();
      } else {
        for (int i = 0; i < N; ++i) status[i] = solve_block(i, parts[i]);
      }
      for (int i = 0; i < N && !failed; ++i) {
        if (status[i] == LinearSolveStatus::Failed) {
          failed = true;
          r.trace.failed_agent = i;
        }
        if (status[i] == LinearSolveStatus::Regularized) ++r.trace.regularized_steps;
        for (std::size_t p = 0; p < blocks[i].size(); ++p) d(blocks[i][p]) = parts[i](p);
      }
    }
    if (failed) {
      r.trace.status = SolverStatus::SingularJacobian;
      r.trace.failed_at = k;
      break;
    }

    const Vector step = cfg.damping * d;
    z += step;
    phi = assemble_phi(game, z);
    res = phi.norm();
    jac = limiting_jacobian(game, PrimalDualPoint::split(z, n), rule);
    r.trace.perturbations.push_back(v);
    r.push(z, res, step.norm(), jac.branches);
    if (!std::isfinite(res) || res > cfg.divergence_factor * res0) {
      r.trace.status = SolverStatus::Diverged;
      r.trace.failed_at = k + 1;
      break;
    }
  }
  if (r.trace.regularized_steps > 0)
    r.trace.warnings.push_back(std::to_string(r.trace.regularized_steps) +
                               " singular Newton systems solved in the least-squares sense");
  if (ref) r.trace.set_reference(*ref);
  return std::move(r.trace);
}

}  // namespace

IterateTrace semismooth_newton(const GameProblem& game, const Vector& z0,
                               const NewtonConfig& cfg, TieRule rule,
                               const std::optional<Vector>& ref) {
  return run(game, z0, cfg, rule, nullptr, Update::Centralized, ref);
}

IterateTrace perturbed_semismooth_newton(const GameProblem& game, const Vector& z0,
                                         const NewtonConfig& cfg,
                                         const PerturbationSpec& pert, TieRule rule,
                                         const std::optional<Vector>& ref) {
  return run(game, z0, cfg, rule, &pert, Update::Centralized, ref);
}

IterateTrace distributed_semismooth_newton(const GameProblem& game, const Vector& z0,
                                           const NewtonConfig& cfg, TieRule rule,
                                           const std::optional<Vector>& ref) {
  return run(game, z0, cfg, rule, nullptr, Update::Distributed, ref);
}

QuasiRegularityVerdict check_quasi_regularity(const GameProblem& game,
                                              const Vector& z_star, int max_ties,
                                              std::uint64_t seed) {
  require_stacked(game, z_star);
  if (max_ties < 0 || max_ties > 30) throw InputError("max_ties must lie in [0, 30]");
  const auto z = PrimalDualPoint::split(z_star, game.dimension());
  const BranchRecord base = branch_record(game, z, TieRule::PreferG);
  std::vector<int> tied;
  for (std::size_t r = 0; r < base.tied.size(); ++r)
    if (base.tied[r]) tied.push_back(static_cast<int>(r));

  QuasiRegularityVerdict verdict;
  verdict.ties = static_cast<int>(tied.size());
  verdict.min_singular_value = std::numeric_limits<double>::infinity();
  const int t = verdict.ties;
  verdict.partial = t > max_ties;
  const long count = 1L << std::min(t, max_ties);

  std::mt19937_64 rng(seed);
  std::vector<Branch> branches = base.side;
  for (long code = 0; code < count; ++code) {
    for (int j = 0; j < t; ++j) {
      bool bit;
      if (verdict.partial) {
        bit = (rng() >> 11) & 1ULL;
      } else {
        bit = (code >> j) & 1L;
      }
      branches[tied[j]] = bit ? Branch::Multiplier : Branch::Constraint;
    }
    const double s = smallest_singular_value(jacobian_for_branches(game, z, branches));
    ++verdict.elements_checked;
    verdict.min_singular_value = std::min(verdict.min_singular_value, s);
    if (s <= kSingularThreshold && !verdict.witness) {
      verdict.outcome = QuasiRegularityVerdict::Outcome::FoundSingular;
      verdict.witness = branches;
    }
  }
  return verdict;
}

}  // namespace nashnewton
