#pragma once

#include "nashnewton/josephy_newton.hpp"
#include "nashnewton/kkt.hpp"
#include "nashnewton/mpc.hpp"
#include "nashnewton/perturbation.hpp"
#include "nashnewton/rates.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashnewton::harness {

enum class ExperimentKind {
  Convergence,
  IssCampaign,
  DistributedCompare,
  QuasiRegularityScan,
  MpcSweep,
};

const char* to_string(ExperimentKind kind);
/// Matches the CLI subcommand names: converge, iss, distributed, quasireg,
/// mpc-sweep.
std::optional<ExperimentKind> kind_from_command(const std::string& command);
const char* command_name(ExperimentKind kind);

enum class SolverKind {
  JosephyNewton,
  Mechanism1,
  Mechanism2,
  SemismoothNewton,
  DistributedSemismooth,
};

const char* to_string(SolverKind solver);
/// Names: jn, m1, m2, ssn, dssn.
std::optional<SolverKind> solver_from_name(const std::string& name);
bool is_primal_dual(SolverKind solver);
bool is_distributed(SolverKind solver);

/// Thresholds a run is judged against. Only the fields relevant to the
/// experiment kind are used.
struct Acceptance {
  /// Convergence
  RateEstimate::Class expected_rate = RateEstimate::Class::Quadratic;
  double max_tail_ratio = 1e3;
  double residual_tol = 1e-10;
  /// Affine games must converge in exactly this many outer iterations.
  int affine_iterations = 1;
  /// IssCampaign
  IssModel model = IssModel::Linear;
  double slack = 1.1;
  int max_violations = 0;
  double scaling_factor = 3.0;
  /// Iterations skipped before the ultimate error is measured.
  int ultimate_skip = 10;
  /// DistributedCompare and QuasiRegularityScan
  double max_distance = 1e-8;
  bool require_regular = true;
  /// MpcSweep
  bool require_sup_e_monotone = true;
  bool require_alpha_monotone = true;
  std::optional<int> tracking_K;
  double tracking_tol = 1e-8;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Convergence;
  std::string name;
  /// Game or scenario file, resolved against the config file's directory.
  std::filesystem::path problem;
  std::vector<SolverKind> solvers;
  NewtonConfig newton;
  BestResponseOptions best_response;
  TieRule tie_rule = TieRule::PreferG;
  /// Template for IssCampaign; magnitude and seed are set per run.
  PerturbationSpec perturbation;
  std::vector<double> magnitudes;
  std::vector<std::uint64_t> seeds;
  /// Explicit start point, or a seeded point at start_radius from the
  /// reference solution.
  std::optional<Vector> start;
  double start_radius = 0.1;
  /// Explicit reference solution (otherwise computed).
  std::optional<Vector> reference;
  /// MpcSweep overrides of the scenario's K list and e0.
  std::optional<std::vector<int>> budgets;
  std::optional<double> e0;
  /// Worker threads for independent runs (0 = hardware concurrency).
  int threads = 1;
  std::filesystem::path output = "out";
  Acceptance acceptance;
};

/// All validation errors of a config file, each naming its field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates a JSON config. Defaults: solvers [jn] (MpcSweep:
/// [m1]), seeds [0], magnitudes [1e-3]. Throws ConfigError listing every
/// problem found, or InputError for syntax errors (with line and column).
/// `expected` is the kind implied by the CLI subcommand: it applies when the
/// file has no "kind" field, and a conflicting "kind" is an error.
ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::filesystem::path& base_dir = ".",
                                   std::optional<ExperimentKind> expected = std::nullopt);

/// Replaces the seed list with {seed}.
void apply_seed_override(ExperimentConfig& cfg, std::uint64_t seed);

/// One unit of work of an experiment.
struct RunSpec {
  std::string id;
  SolverKind solver = SolverKind::JosephyNewton;
  std::uint64_t seed = 0;
  double magnitude = 0.0;
  /// Budget K for MpcSweep runs, -1 otherwise.
  int K = -1;
};

/// Runs the experiment will execute, in report order. For MpcSweep the
/// K list comes from the config override, falling back to `scenario_K`.
std::vector<RunSpec> schedule_runs(const ExperimentConfig& cfg,
                                   const std::vector<int>& scenario_K = {});

}  // namespace nashnewton::harness
