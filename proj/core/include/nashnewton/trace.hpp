#pragma once

#include "nashnewton/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nashnewton {

enum class SolverStatus {
  Converged,
  MaxIterations,
  InnerSolveFailed,
  Diverged,
  SingularJacobian,
  OuterCycleDetected,
  BudgetExhausted,
};

const char* to_string(SolverStatus status);

/// Which side of min(-g, lambda) a complementarity row was linearized on.
enum class Branch : char { Constraint, Multiplier };

struct BranchRecord {
  std::vector<Branch> side;
  /// Rows where |-g - lambda| fell within the tie threshold.
  std::vector<bool> tied;

  int tie_count() const;
  std::string to_string() const;
};

/// Iterates of an outer solver together with per-iteration diagnostics.
///
/// Entry k of `iterates`, `residuals`, `step_norms` and `wall_seconds`
/// describes iterate k (step_norms[0] is 0). `perturbations[k]` is the
/// disturbance injected while computing iterate k+1, so it has one entry
/// fewer than `iterates`.
struct IterateTrace {
  std::vector<Vector> iterates;
  std::vector<double> residuals;
  std::vector<double> step_norms;
  std::vector<Vector> perturbations;
  std::optional<std::vector<double>> error_to_ref;
  std::vector<double> wall_seconds;
  /// Branch choices at each iterate (semismooth solvers only).
  std::vector<BranchRecord> branches;

  SolverStatus status = SolverStatus::MaxIterations;
  /// Iteration at which a failure occurred, and the agent when the solver
  /// is agent-distributed (-1 otherwise).
  int failed_at = -1;
  int failed_agent = -1;
  /// Newton systems solved through the regularized fallback.
  int regularized_steps = 0;
  std::vector<std::string> warnings;

  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
  const Vector& final_point() const { return iterates.back(); }
  double final_residual() const { return residuals.back(); }
  bool converged() const { return status == SolverStatus::Converged; }
  double perturbation_norm(int k) const;

  /// Fills error_to_ref with |iterate_k - ref| over the first ref.size()
  /// coordinates (so primal-dual traces can be compared on the primal part).
  void set_reference(const Vector& ref);
  /// Checks the length invariants; throws InputError when violated.
  void validate() const;
};

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(const std::string& text);

struct TraceRow {
  int k = 0;
  double residual = 0.0;
  double step_norm = 0.0;
  std::optional<double> err_to_ref;
  double pert_norm = 0.0;
};

/// Header `k,residual,step_norm,err_to_ref,pert_norm`, one row per iterate.
/// err_to_ref is left empty when no reference was set; pert_norm is the
/// norm of the disturbance injected after that iterate (0 on the last row).
void write_trace_csv(const IterateTrace& trace, std::ostream& out);
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace nashnewton
