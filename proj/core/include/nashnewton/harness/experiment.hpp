#pragma once

#include "nashnewton/harness/config.hpp"
#include "nashnewton/harness/problem_io.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nashnewton::harness {

const char* version();

/// Outcome of one acceptance check.
struct Verdict {
  std::string check;
  /// Run id the verdict belongs to, or "campaign".
  std::string run;
  bool passed = false;
  std::string threshold;
  std::string observed;
  /// Output files (relative to the output directory) the verdict rests on.
  std::vector<std::string> evidence;
};

struct Report {
  std::string name;
  ExperimentKind kind = ExperimentKind::Convergence;
  std::string problem;
  std::vector<std::uint64_t> seeds;
  /// Named tables, each an array of row objects.
  Json tables = Json::object();
  std::vector<Verdict> verdicts;
  /// Failed runs, prefixed with the run id.
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  bool passed() const;
  /// Everything except `generated_at` is a function of the config.
  Json to_json(bool with_timestamp = true) const;
};

/// Runs every scheduled run on a worker pool, writes trace CSVs and
/// report.json into cfg.output, and returns the report. Solver failures
/// are recorded per run; problem files that fail to load throw InputError.
Report run_experiment(const ExperimentConfig& cfg);

/// 0 when every verdict passed and no run failed, 1 otherwise.
int exit_code(const Report& report);

/// Calls fn(k) for k in [0, count) on `threads` workers (0 = hardware
/// concurrency). Exceptions are rethrown after all workers finish.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace nashnewton::harness
