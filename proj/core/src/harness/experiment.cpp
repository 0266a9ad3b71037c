#include "nashnewton/harness/experiment.hpp"

#include "nashnewton/harness/csv.hpp"
#include "nashnewton/rates.hpp"
#include "nashnewton/semismooth_newton.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace nashnewton::harness {

const char* version() {
#ifdef NASHNEWTON_VERSION_STRING
  return NASHNEWTON_VERSION_STRING;
#else
  return "unknown";
#endif
}

bool Report::passed() const {
  if (!errors.empty() || verdicts.empty()) return false;
  for (const auto& v : verdicts)
    if (!v.passed) return false;
  return true;
}

Json Report::to_json(bool with_timestamp) const {
  Json j;
  j["name"] = name;
  j["kind"] = to_string(kind);
  j["problem"] = problem;
  j["version"] = version();
  j["seeds"] = seeds;
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    j["generated_at"] = ts.str();
  }
  j["tables"] = tables;
  Json vs = Json::array();
  for (const auto& v : verdicts)
    vs.push_back({{"check", v.check},
                  {"run", v.run},
                  {"passed", v.passed},
                  {"threshold", v.threshold},
                  {"observed", v.observed},
                  {"evidence", v.evidence}});
  j["verdicts"] = vs;
  j["errors"] = errors;
  j["warnings"] = warnings;
  j["files"] = files;
  j["passed"] = passed();
  return j;
}

int exit_code(const Report& report) { return report.passed() ? 0 : 1; }

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

std::string fmt(double x) { return format_double(x); }

std::string describe(const std::exception& e) {
  if (const auto* s = dynamic_cast<const SolverError*>(&e)) {
    static const char* names[] = {"SingularAgentBlock", "ConstraintsNotCommon", "NonIsolated",
                                  "NotConverged", "Unsupported"};
    return std::string(names[static_cast<int>(s->kind())]) + ": " + e.what();
  }
  if (const auto* s = dynamic_cast<const EstimationError*>(&e))
    return std::string(s->kind() == EstimationError::Kind::TooFewPoints ? "TooFewPoints"
                                                                         : "DegenerateFit") +
           ": " + e.what();
  return e.what();
}

Vector unit_direction(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector d(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) = normal(rng);
  return d.normalized();
}

// Distinct stream for perturbations so they do not reuse the start draws.
std::uint64_t perturbation_seed(std::uint64_t seed, std::size_t magnitude_index) {
  return seed * 0x9E3779B97F4A7C15ULL + 1000003ULL * (magnitude_index + 1);
}

IterateTrace run_solver(SolverKind solver, const GameProblem& game, const Vector& start,
                        const ExperimentConfig& cfg, const std::optional<Vector>& ref) {
  switch (solver) {
    case SolverKind::JosephyNewton: return josephy_newton(game, start, cfg.newton, ref);
    case SolverKind::Mechanism1: return distributed_jn_mechanism1(game, start, cfg.newton, ref);
    case SolverKind::Mechanism2:
      return distributed_jn_mechanism2(game, start, cfg.newton, cfg.best_response, ref);
    case SolverKind::SemismoothNewton:
      return semismooth_newton(game, start, cfg.newton, cfg.tie_rule, ref);
    case SolverKind::DistributedSemismooth:
      return distributed_semismooth_newton(game, start, cfg.newton, cfg.tie_rule, ref);
  }
  throw InputError("unknown solver");
}

// Reference solution: from the config, from the problem file, or by a
// tight centralized solve.
Vector reference_for(const LoadedGame& g, const ExperimentConfig& cfg, bool primal_dual) {
  const int n = g.game.dimension();
  const int dim = primal_dual ? n + g.game.num_multipliers() : n;
  for (const auto& known : {cfg.reference, g.solution})
    if (known && known->size() == dim) return *known;
  if (primal_dual && cfg.reference && cfg.reference->size() == n) {
    Vector z(dim);
    z << *cfg.reference, initial_multipliers(g.game, *cfg.reference);
    return z;
  }

  NewtonConfig tight = cfg.newton;
  tight.tol_outer = primal_dual ? 1e-14 : 1e-13;
  tight.max_outer = 200;
  tight.stop_on_tolerance = true;
  tight.inner.tol_inner = 1e-14;
  Vector a0 = cfg.start && cfg.start->size() >= n ? Vector(cfg.start->head(n)) : Vector::Zero(n);
  if (!primal_dual) {
    const auto tr = josephy_newton(g.game, g.game.region().project(a0), tight);
    if (!tr.converged())
      throw SolverError(SolverError::Kind::NotConverged,
                        std::string("reference solve ended with ") + to_string(tr.status));
    return tr.final_point();
  }
  Vector z0(dim);
  z0 << a0, initial_multipliers(g.game, a0);
  const auto tr = semismooth_newton(g.game, z0, tight, cfg.tie_rule);
  if (tr.final_residual() > 1e-12)
    throw SolverError(SolverError::Kind::NotConverged,
                      std::string("reference solve ended with ") + to_string(tr.status));
  return tr.final_point();
}

Vector start_for(const LoadedGame& g, const ExperimentConfig& cfg, const Vector& ref,
                 std::uint64_t seed, bool primal_dual, std::string* warning) {
  if (cfg.start && cfg.start->size() == ref.size()) return *cfg.start;
  Vector s = ref + cfg.start_radius * unit_direction(seed, ref.size());
  if (!primal_dual) {
    const Vector p = g.game.region().project(s);
    if ((p - s).norm() > 1e-12 && warning)
      *warning = "start projected onto the feasible region (moved by " + fmt((p - s).norm()) + ")";
    s = p;
  }
  return s;
}

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path out;
  Report& report;

  std::string write_trace(const std::string& id, const IterateTrace& tr) {
    const std::string file = "trace_" + id + ".csv";
    write_trace_file(tr, out / file);
    return file;
  }
};

Json trace_row(const RunSpec& run, const IterateTrace& tr, const std::string& file) {
  Json row{{"run", run.id},
           {"solver", to_string(run.solver)},
           {"seed", run.seed},
           {"status", to_string(tr.status)},
           {"iterations", tr.iterations()},
           {"final_residual", tr.final_residual()},
           {"trace", file}};
  if (tr.error_to_ref) row["final_error"] = tr.error_to_ref->back();
  if (tr.regularized_steps > 0) row["regularized_steps"] = tr.regularized_steps;
  return row;
}

// Classification of a trace, or the estimation error that prevented one.
struct RateOutcome {
  std::optional<RateEstimate> rate;
  std::string error;
};

RateOutcome classify(const IterateTrace& tr) {
  try {
    return {estimate_q_rate(tr), ""};
  } catch (const EstimationError& e) {
    return {std::nullopt, describe(e)};
  }
}

// ---------------------------------------------------------------- kinds

void convergence(Context& ctx, const LoadedGame& g, const std::vector<RunSpec>& runs) {
  const auto& cfg = ctx.cfg;
  const auto& acc = cfg.acceptance;
  struct Result {
    IterateTrace trace;
    std::string file, error, warning;
  };
  std::vector<Result> results(runs.size());
  std::optional<Vector> ref_primal, ref_pd;
  for (auto s : cfg.solvers) {
    if (is_primal_dual(s) && !ref_pd) ref_pd = reference_for(g, cfg, true);
    if (!is_primal_dual(s) && !ref_primal) ref_primal = reference_for(g, cfg, false);
  }
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int k) {
    const auto& run = runs[k];
    const bool pd = is_primal_dual(run.solver);
    const Vector& ref = pd ? *ref_pd : *ref_primal;
    try {
      const Vector a0 = start_for(g, cfg, ref, run.seed, pd, &results[k].warning);
      results[k].trace = run_solver(run.solver, g.game, a0, cfg, ref);
      results[k].file = ctx.write_trace(run.id, results[k].trace);
    } catch (const std::exception& e) {
      results[k].error = describe(e);
    }
  });

  Json rows = Json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    auto& r = results[k];
    if (!r.warning.empty()) ctx.report.warnings.push_back(run.id + ": " + r.warning);
    if (!r.error.empty()) {
      ctx.report.errors.push_back(run.id + ": " + r.error);
      continue;
    }
    ctx.report.files.push_back(r.file);
    Json row = trace_row(run, r.trace, r.file);
    const bool one_step = g.affine() && run.solver == SolverKind::JosephyNewton;
    const auto rate = classify(r.trace);
    if (rate.rate) {
      row["rate"] = to_string(rate.rate->classification);
      row["tail_max"] = rate.rate->tail_max;
    } else {
      row["rate"] = rate.error;
    }
    rows.push_back(row);

    ctx.report.verdicts.push_back(
        {"converged", run.id,
         r.trace.converged() && r.trace.final_residual() <= acc.residual_tol,
         "status Converged, residual <= " + fmt(acc.residual_tol),
         std::string(to_string(r.trace.status)) + ", residual " + fmt(r.trace.final_residual()),
         {r.file}});
    if (one_step) {
      ctx.report.verdicts.push_back(
          {"one_step", run.id, r.trace.iterations() == acc.affine_iterations,
           "affine game: iterations == " + std::to_string(acc.affine_iterations),
           std::to_string(r.trace.iterations()) + " iterations", {r.file}});
      continue;
    }
    const bool class_ok = rate.rate && rate.rate->classification == acc.expected_rate;
    const bool tail_ok = !rate.rate || acc.expected_rate != RateEstimate::Class::Quadratic ||
                         rate.rate->tail_max <= acc.max_tail_ratio;
    std::string threshold = std::string("classification ") +
                            to_string(acc.expected_rate);
    if (acc.expected_rate == RateEstimate::Class::Quadratic)
      threshold += ", tail ratio <= " + fmt(acc.max_tail_ratio);
    ctx.report.verdicts.push_back(
        {"rate", run.id, class_ok && tail_ok, threshold,
         rate.rate ? std::string(to_string(rate.rate->classification)) + ", tail " +
                         fmt(rate.rate->tail_max)
                   : rate.error,
         {r.file}});
  }
  ctx.report.tables["runs"] = rows;
}

void iss_campaign(Context& ctx, const LoadedGame& g, const std::vector<RunSpec>& runs) {
  const auto& cfg = ctx.cfg;
  const auto& acc = cfg.acceptance;
  const bool pd = is_primal_dual(cfg.solvers.front());
  const Vector ref = reference_for(g, cfg, pd);

  NewtonConfig budget = cfg.newton;
  budget.stop_on_tolerance = false;
  struct Result {
    IterateTrace trace;
    std::string file, error;
    double ultimate = 0.0;
  };
  std::vector<Result> results(runs.size());
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int k) {
    const auto& run = runs[k];
    auto& r = results[k];
    try {
      const Vector s0 = start_for(g, cfg, ref, run.seed, pd, nullptr);
      PerturbationSpec p = cfg.perturbation;
      p.magnitude = run.magnitude;
      std::size_t m = 0;
      while (m < cfg.magnitudes.size() && cfg.magnitudes[m] != run.magnitude) ++m;
      p.seed = perturbation_seed(run.seed, m);
      r.trace = pd ? perturbed_semismooth_newton(g.game, s0, budget, p, cfg.tie_rule, ref)
                   : perturbed_josephy_newton(g.game, s0, budget, p, ref);
      r.file = ctx.write_trace(run.id, r.trace);
      const auto& e = *r.trace.error_to_ref;
      for (std::size_t t = static_cast<std::size_t>(acc.ultimate_skip); t < e.size(); ++t)
        r.ultimate = std::max(r.ultimate, e[t]);
    } catch (const std::exception& e) {
      r.error = describe(e);
    }
  });

  std::vector<IssSample> pooled;
  std::vector<std::vector<IssSample>> per_mag(cfg.magnitudes.size());
  std::vector<double> ultimate(cfg.magnitudes.size(), 0.0);
  std::vector<std::vector<std::string>> files(cfg.magnitudes.size());
  Json rows = Json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    auto& r = results[k];
    if (!r.error.empty()) {
      ctx.report.errors.push_back(run.id + ": " + r.error);
      continue;
    }
    std::size_t m = 0;
    while (cfg.magnitudes[m] != run.magnitude) ++m;
    ctx.report.files.push_back(r.file);
    files[m].push_back(r.file);
    Json row = trace_row(run, r.trace, r.file);
    row["magnitude"] = run.magnitude;
    row["ultimate_error"] = r.ultimate;
    rows.push_back(row);
    const auto s = iss_samples(r.trace);
    pooled.insert(pooled.end(), s.begin(), s.end());
    per_mag[m].insert(per_mag[m].end(), s.begin(), s.end());
    ultimate[m] = std::max(ultimate[m], r.ultimate);
  }
  ctx.report.tables["runs"] = rows;

  auto fit_json = [&](const std::vector<IssSample>& samples, Json& out) -> std::optional<IssFit> {
    try {
      const auto f = estimate_iss_constants(samples, acc.model, acc.slack);
      out["L_a"] = f.L_a;
      out["L_v"] = f.L_v;
      out["fit_residual"] = f.fit_residual;
      out["violations"] = f.violations;
      out["samples"] = f.samples;
      out["violation_fraction"] = f.violation_fraction;
      out["required_slack"] = f.required_slack;
      return f;
    } catch (const EstimationError& e) {
      out["error"] = describe(e);
      return std::nullopt;
    }
  };

  Json fits = Json::array();
  for (std::size_t m = 0; m < cfg.magnitudes.size(); ++m) {
    Json row{{"magnitude", cfg.magnitudes[m]}, {"ultimate_error", ultimate[m]}};
    fit_json(per_mag[m], row);
    fits.push_back(row);
  }
  Json pooled_row{{"magnitude", "all"}};
  const auto fit = fit_json(pooled, pooled_row);
  fits.push_back(pooled_row);
  ctx.report.tables["fits"] = fits;

  std::vector<std::string> all_files;
  for (const auto& f : files) all_files.insert(all_files.end(), f.begin(), f.end());
  const std::string model = acc.model == IssModel::Linear ? "linear" : "quadratic";
  ctx.report.verdicts.push_back(
      {"iss_bound", "campaign", fit && fit->violations <= acc.max_violations,
       model + " fit, violations <= " + std::to_string(acc.max_violations) + " at slack " +
           fmt(acc.slack),
       fit ? std::to_string(fit->violations) + "/" + std::to_string(fit->samples) +
                 " violations (slack needed " + fmt(fit->required_slack) + ")"
           : pooled_row.value("error", std::string("no fit")),
       all_files});

  std::vector<std::size_t> nonzero;
  for (std::size_t m = 0; m < cfg.magnitudes.size(); ++m)
    if (cfg.magnitudes[m] > 0.0) nonzero.push_back(m);
  for (std::size_t j = 1; j < nonzero.size(); ++j) {
    const auto a = nonzero[j - 1], b = nonzero[j];
    const double expected = cfg.magnitudes[b] / cfg.magnitudes[a];
    const double observed = ultimate[a] > 0.0 ? ultimate[b] / ultimate[a] : INFINITY;
    const double ratio = observed / expected;
    std::vector<std::string> ev = files[a];
    ev.insert(ev.end(), files[b].begin(), files[b].end());
    ctx.report.verdicts.push_back(
        {"ultimate_scaling", "campaign",
         ratio <= acc.scaling_factor && ratio >= 1.0 / acc.scaling_factor,
         "ultimate error ratio within factor " + fmt(acc.scaling_factor) + " of " + fmt(expected),
         "ratio " + fmt(observed), ev});
  }
}

void distributed_compare(Context& ctx, const LoadedGame& g, const std::vector<RunSpec>& runs) {
  const auto& cfg = ctx.cfg;
  const auto& acc = cfg.acceptance;
  struct Result {
    IterateTrace trace, central;
    std::string file, central_file, error;
  };
  std::optional<Vector> ref_primal, ref_pd;
  for (auto s : cfg.solvers) {
    if (is_primal_dual(s) && !ref_pd) ref_pd = reference_for(g, cfg, true);
    if (!is_primal_dual(s) && !ref_primal) ref_primal = reference_for(g, cfg, false);
  }
  std::vector<Result> results(runs.size());
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int k) {
    const auto& run = runs[k];
    auto& r = results[k];
    const bool pd = is_primal_dual(run.solver);
    const Vector& ref = pd ? *ref_pd : *ref_primal;
    try {
      const Vector s0 = start_for(g, cfg, ref, run.seed, pd, nullptr);
      r.trace = run_solver(run.solver, g.game, s0, cfg, ref);
      r.file = ctx.write_trace(run.id, r.trace);
      if (is_distributed(run.solver)) {
        const auto central = pd ? SolverKind::SemismoothNewton : SolverKind::JosephyNewton;
        r.central = run_solver(central, g.game, s0, cfg, ref);
        r.central_file = ctx.write_trace(run.id + "_centralized", r.central);
      }
    } catch (const std::exception& e) {
      r.error = describe(e);
    }
  });

  Json rows = Json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    auto& r = results[k];
    if (!r.error.empty()) {
      ctx.report.errors.push_back(run.id + ": " + r.error);
      continue;
    }
    ctx.report.files.push_back(r.file);
    Json row = trace_row(run, r.trace, r.file);
    const auto rate = classify(r.trace);
    row["rate"] = rate.rate ? std::string(to_string(rate.rate->classification)) : rate.error;
    if (!is_distributed(run.solver)) {
      rows.push_back(row);
      continue;
    }
    ctx.report.files.push_back(r.central_file);
    const double dist = (r.trace.final_point() - r.central.final_point()).norm();
    row["centralized_status"] = to_string(r.central.status);
    row["distance_to_centralized"] = dist;
    rows.push_back(row);
    ctx.report.verdicts.push_back(
        {"matches_centralized", run.id,
         r.trace.converged() && r.central.converged() && dist <= acc.max_distance,
         "both converged, distance <= " + fmt(acc.max_distance),
         std::string(to_string(r.trace.status)) + " / " + to_string(r.central.status) +
             ", distance " + fmt(dist),
         {r.file, r.central_file}});
  }
  ctx.report.tables["runs"] = rows;
}

void quasireg_scan(Context& ctx, const LoadedGame& g, const std::vector<RunSpec>& runs) {
  const auto& cfg = ctx.cfg;
  const auto& acc = cfg.acceptance;
  const Vector ref = reference_for(g, cfg, true);

  auto check = [&](const std::string& id, const Vector& z, const std::vector<std::string>& ev) {
    const auto v = check_quasi_regularity(g.game, z, 20, 0);
    const std::string file = "solution_" + id + ".csv";
    std::ofstream out(ctx.out / file);
    write_gne_solution_csv(g.game, z, cfg.tie_rule, out);
    ctx.report.files.push_back(file);
    std::vector<std::string> evidence = ev;
    evidence.push_back(file);
    Json row{{"point", id},
             {"ties", v.ties},
             {"elements_checked", v.elements_checked},
             {"min_singular_value", v.min_singular_value},
             {"partial", v.partial},
             {"outcome", v.regular() ? "AllNonsingular" : "FoundSingular"},
             {"phi_norm", assemble_phi(g.game, z).norm()},
             {"solution", file}};
    if (acc.require_regular)
      ctx.report.verdicts.push_back(
          {"quasi_regular", id, v.regular() && !v.partial,
           "every limiting-Jacobian element has smallest singular value > " +
               fmt(kSingularThreshold),
           std::string(v.regular() ? "AllNonsingular" : "FoundSingular") + ", min sv " +
               fmt(v.min_singular_value) + (v.partial ? " (sampled)" : ""),
           evidence});
    return row;
  };

  Json rows = Json::array();
  rows.push_back(check("reference", ref, {}));

  struct Result {
    IterateTrace trace;
    std::string file, error;
  };
  std::vector<Result> results(runs.size());
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int k) {
    const auto& run = runs[k];
    try {
      const Vector z0 = start_for(g, cfg, ref, run.seed, true, nullptr);
      results[k].trace = run_solver(run.solver, g.game, z0, cfg, ref);
      results[k].file = ctx.write_trace(run.id, results[k].trace);
    } catch (const std::exception& e) {
      results[k].error = describe(e);
    }
  });
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    auto& r = results[k];
    if (!r.error.empty()) {
      ctx.report.errors.push_back(run.id + ": " + r.error);
      continue;
    }
    ctx.report.files.push_back(r.file);
    const double dist = (r.trace.final_point() - ref).norm();
    ctx.report.verdicts.push_back(
        {"reaches_reference", run.id,
         r.trace.final_residual() <= acc.residual_tol && dist <= acc.max_distance,
         "|Phi| <= " + fmt(acc.residual_tol) + ", distance to reference <= " +
             fmt(acc.max_distance),
         "|Phi| " + fmt(r.trace.final_residual()) + ", distance " + fmt(dist), {r.file}});
    Json row = check(run.id, r.trace.final_point(), {r.file});
    row["iterations"] = r.trace.iterations();
    row["distance_to_reference"] = dist;
    rows.push_back(row);
  }
  ctx.report.tables["points"] = rows;
}

MpcSolver mpc_solver(SolverKind s) {
  switch (s) {
    case SolverKind::JosephyNewton: return MpcSolver::JN;
    case SolverKind::Mechanism1: return MpcSolver::DistributedJN;
    case SolverKind::SemismoothNewton: return MpcSolver::SemismoothNewton;
    case SolverKind::DistributedSemismooth: return MpcSolver::DistributedSSN;
    case SolverKind::Mechanism2: break;
  }
  throw InputError("solver has no closed-loop variant");
}

void mpc_sweep(Context& ctx, MpcScenario scenario, const std::vector<RunSpec>& runs) {
  const auto& cfg = ctx.cfg;
  const auto& acc = cfg.acceptance;
  if (cfg.e0) scenario.e0 = *cfg.e0;
  ClosedLoopOptions opt;
  opt.solver = cfg.newton;

  struct Result {
    std::optional<ClosedLoopLog> log;
    std::string file, error;
  };
  std::vector<Result> results(runs.size());
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int k) {
    const auto& run = runs[k];
    auto& r = results[k];
    auto write = [&](const ClosedLoopLog& log, const std::string& suffix) {
      r.file = "closed_loop_" + run.id + suffix + ".csv";
      std::ofstream out(ctx.out / r.file);
      write_closed_loop_csv(log, out);
    };
    try {
      r.log = run_closed_loop(scenario, mpc_solver(run.solver), run.K, run.seed, opt);
      write(*r.log, "");
    } catch (const ClosedLoopAborted& e) {
      write(e.partial(), "_partial");
      r.error = e.what();
    } catch (const std::exception& e) {
      r.error = describe(e);
    }
  });

  Json rows = Json::array();
  for (auto solver : cfg.solvers) {
    std::vector<ClosedLoopLog> sweep;
    std::vector<std::string> sweep_files;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& run = runs[k];
      if (run.solver != solver) continue;
      auto& r = results[k];
      if (!r.file.empty()) ctx.report.files.push_back(r.file);
      if (!r.error.empty()) {
        ctx.report.errors.push_back(run.id + ": " + r.error);
        continue;
      }
      const bool tracking = run.id.find("tracking") != std::string::npos;
      const auto probe = lipschitz_probe(*r.log);
      if (probe.flagged)
        ctx.report.warnings.push_back(run.id + ": solution map jump, ratio " +
                                      fmt(probe.max_ratio) + " vs median " +
                                      fmt(probe.median_ratio));
      if (tracking) {
        const double sup = r.log->sup_e();
        rows.push_back({{"run", run.id}, {"K", run.K}, {"sup_e", sup}, {"file", r.file}});
        ctx.report.verdicts.push_back({"tracking", run.id, sup <= acc.tracking_tol,
                                       "sup_t e(t) <= " + fmt(acc.tracking_tol),
                                       "sup_e " + fmt(sup), {r.file}});
        continue;
      }
      sweep.push_back(*r.log);
      sweep_files.push_back(r.file);
    }
    if (sweep.empty()) continue;

    const std::string summary = std::string("summary_") + to_string(solver) + ".csv";
    try {
      const auto table = estimate_contraction(sweep, acc.slack);
      {
        std::ofstream out(ctx.out / summary);
        write_contraction_summary_csv(table, out);
      }
      ctx.report.files.push_back(summary);
      std::vector<std::string> ev = sweep_files;
      ev.push_back(summary);
      for (std::size_t j = 0; j < table.fits.size(); ++j) {
        const auto& f = table.fits[j];
        rows.push_back({{"run", std::string(to_string(solver)) + "_K" + std::to_string(f.K)},
                        {"K", f.K},
                        {"sup_e", f.sup_e},
                        {"alpha_hat", f.alpha},
                        {"theta_hat", f.theta},
                        {"violations", f.violations},
                        {"samples", f.samples},
                        {"required_slack", f.required_slack},
                        {"file", sweep_files[j]}});
        ctx.report.verdicts.push_back(
            {"contraction_bound", std::string(to_string(solver)) + "_K" + std::to_string(f.K),
             f.violations <= acc.max_violations,
             "violations <= " + std::to_string(acc.max_violations) + " at slack " + fmt(acc.slack),
             std::to_string(f.violations) + "/" + std::to_string(f.samples) +
                 " (slack needed " + fmt(f.required_slack) + ")",
             {sweep_files[j], summary}});
      }
      auto column = [&](auto get) {
        std::string s;
        for (const auto& f : table.fits) s += (s.empty() ? "" : ", ") + fmt(get(f));
        return s;
      };
      if (acc.require_sup_e_monotone)
        ctx.report.verdicts.push_back(
            {"sup_e_nonincreasing", to_string(solver), table.sup_e_nonincreasing,
             "sup_e nonincreasing in K",
             column([](const ContractionFit& f) { return f.sup_e; }), ev});
      if (acc.require_alpha_monotone)
        ctx.report.verdicts.push_back(
            {"alpha_nonincreasing", to_string(solver), table.alpha_nonincreasing,
             "alpha_hat nonincreasing in K",
             column([](const ContractionFit& f) { return f.alpha; }), ev});
    } catch (const EstimationError& e) {
      ctx.report.errors.push_back(std::string(to_string(solver)) + " sweep: " + describe(e));
    }
  }
  ctx.report.tables["sweep"] = rows;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  Report report;
  report.name = cfg.name;
  report.kind = cfg.kind;
  report.problem = cfg.problem.lexically_normal().generic_string();
  report.seeds = cfg.seeds;
  std::filesystem::create_directories(cfg.output);
  Context ctx{cfg, cfg.output, report};

  if (cfg.kind == ExperimentKind::MpcSweep) {
    const auto scenario = load_scenario(cfg.problem);
    mpc_sweep(ctx, scenario, schedule_runs(cfg, scenario.budgets));
  } else {
    const LoadedGame g = load_game(cfg.problem);
    const auto runs = schedule_runs(cfg);
    try {
      switch (cfg.kind) {
        case ExperimentKind::Convergence: convergence(ctx, g, runs); break;
        case ExperimentKind::IssCampaign: iss_campaign(ctx, g, runs); break;
        case ExperimentKind::DistributedCompare: distributed_compare(ctx, g, runs); break;
        case ExperimentKind::QuasiRegularityScan: quasireg_scan(ctx, g, runs); break;
        case ExperimentKind::MpcSweep: break;
      }
    } catch (const SolverError& e) {
      report.errors.push_back("reference: " + describe(e));
    }
  }

  std::ofstream out(cfg.output / "report.json");
  out << std::setw(2) << report.to_json() << '\n';
  return report;
}

}  // namespace nashnewton::harness
