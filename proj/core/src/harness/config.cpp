#include "nashnewton/harness/config.hpp"

#include "nashnewton/harness/problem_io.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace nashnewton::harness {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "Convergence";
    case ExperimentKind::IssCampaign: return "IssCampaign";
    case ExperimentKind::DistributedCompare: return "DistributedCompare";
    case ExperimentKind::QuasiRegularityScan: return "QuasiRegularityScan";
    case ExperimentKind::MpcSweep: return "MpcSweep";
  }
  return "?";
}

const char* command_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "converge";
    case ExperimentKind::IssCampaign: return "iss";
    case ExperimentKind::DistributedCompare: return "distributed";
    case ExperimentKind::QuasiRegularityScan: return "quasireg";
    case ExperimentKind::MpcSweep: return "mpc-sweep";
  }
  return "?";
}

std::optional<ExperimentKind> kind_from_command(const std::string& command) {
  for (auto k : {ExperimentKind::Convergence, ExperimentKind::IssCampaign,
                 ExperimentKind::DistributedCompare, ExperimentKind::QuasiRegularityScan,
                 ExperimentKind::MpcSweep})
    if (command == command_name(k) || command == to_string(k)) return k;
  if (command == "McpcSweep") return ExperimentKind::MpcSweep;
  return std::nullopt;
}

const char* to_string(SolverKind solver) {
  switch (solver) {
    case SolverKind::JosephyNewton: return "jn";
    case SolverKind::Mechanism1: return "m1";
    case SolverKind::Mechanism2: return "m2";
    case SolverKind::SemismoothNewton: return "ssn";
    case SolverKind::DistributedSemismooth: return "dssn";
  }
  return "?";
}

std::optional<SolverKind> solver_from_name(const std::string& name) {
  for (auto s : {SolverKind::JosephyNewton, SolverKind::Mechanism1, SolverKind::Mechanism2,
                 SolverKind::SemismoothNewton, SolverKind::DistributedSemismooth})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

bool is_primal_dual(SolverKind solver) {
  return solver == SolverKind::SemismoothNewton || solver == SolverKind::DistributedSemismooth;
}

bool is_distributed(SolverKind solver) {
  return solver == SolverKind::Mechanism1 || solver == SolverKind::Mechanism2 ||
         solver == SolverKind::DistributedSemismooth;
}

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out = std::to_string(errors.size()) + " config error(s)";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

// Reads fields of one JSON object, recording every problem instead of
// stopping at the first.
class Reader {
 public:
  Reader(const Json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) error("", "expected an object");
  }

  ~Reader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) error(key, "unknown field");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  const Json& at(const std::string& key) { return obj_.at(key); }

  std::string field(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back(field(key) + ": " + msg);
  }

  void number(const std::string& key, double& out,
              const std::function<bool(double)>& ok = {}, const char* rule = "") {
    if (!has(key)) return;
    const auto& j = at(key);
    if (!j.is_number()) return error(key, "expected a number");
    const double v = j.get<double>();
    if (ok && !ok(v)) return error(key, rule);
    out = v;
  }

  void integer(const std::string& key, int& out, int min_value) {
    if (!has(key)) return;
    const auto& j = at(key);
    if (!j.is_number_integer()) return error(key, "expected an integer");
    const int v = j.get<int>();
    if (v < min_value) return error(key, "must be at least " + std::to_string(min_value));
    out = v;
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    if (!at(key).is_boolean()) return error(key, "expected true or false");
    out = at(key).get<bool>();
  }

  std::optional<std::string> text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    if (!at(key).is_string()) {
      error(key, "expected a string");
      return std::nullopt;
    }
    return at(key).get<std::string>();
  }

  std::optional<Vector> vector(const std::string& key) {
    if (!has(key)) return std::nullopt;
    try {
      return json_to_vector(at(key), field(key));
    } catch (const InputError& e) {
      errors_.push_back(e.what());
      return std::nullopt;
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

const auto positive = [](double v) { return v > 0.0; };
const auto nonneg = [](double v) { return v >= 0.0; };

void read_newton(Reader& r, NewtonConfig& cfg) {
  r.number("tol_outer", cfg.tol_outer, positive, "must be positive");
  r.integer("max_outer", cfg.max_outer, 0);
  r.number("tol_inner", cfg.inner.tol_inner, positive, "must be positive");
  r.integer("max_inner", cfg.inner.max_iter, 1);
  r.number("damping", cfg.damping, [](double v) { return v > 0.0 && v <= 1.0; },
           "must lie in (0, 1]");
  r.number("divergence_factor", cfg.divergence_factor, [](double v) { return v > 1.0; },
           "must exceed 1");
  r.boolean("stop_on_tolerance", cfg.stop_on_tolerance);
  r.number("max_perturbation", cfg.max_perturbation, nonneg, "must be nonnegative");
  r.boolean("parallel_agents", cfg.parallel_agents);
}

void read_best_response(Reader& r, BestResponseOptions& br) {
  if (auto order = r.text("order")) {
    if (*order == "jacobi")
      br.order = BestResponseOrder::Jacobi;
    else if (*order == "gauss_seidel")
      br.order = BestResponseOrder::GaussSeidel;
    else
      r.error("order", "expected \"jacobi\" or \"gauss_seidel\"");
  }
  r.number("tol_br", br.tol_br, positive, "must be positive");
  r.integer("max_inner", br.max_inner, 1);
}

void read_perturbation(Reader& r, PerturbationSpec& p) {
  if (auto mode = r.text("mode")) {
    if (*mode == "none")
      p.mode = PerturbationSpec::Mode::None;
    else if (*mode == "additive_gradient")
      p.mode = PerturbationSpec::Mode::AdditiveGradient;
    else if (*mode == "additive_hessian")
      p.mode = PerturbationSpec::Mode::AdditiveHessian;
    else if (*mode == "residual_injection")
      p.mode = PerturbationSpec::Mode::ResidualInjection;
    else
      r.error("mode", "unknown perturbation mode \"" + *mode + "\"");
  }
  if (auto dist = r.text("distribution")) {
    if (*dist == "uniform_ball")
      p.distribution = PerturbationSpec::Distribution::UniformBall;
    else if (*dist == "fixed")
      p.distribution = PerturbationSpec::Distribution::FixedVector;
    else
      r.error("distribution", "expected \"uniform_ball\" or \"fixed\"");
  }
  if (auto v = r.vector("fixed")) p.fixed = *v;
  if (p.distribution == PerturbationSpec::Distribution::FixedVector && p.fixed.size() == 0)
    r.error("fixed", "required when distribution is \"fixed\"");
}

void read_acceptance(Reader& r, Acceptance& a) {
  if (auto rate = r.text("expected_rate")) {
    if (*rate == "Quadratic")
      a.expected_rate = RateEstimate::Class::Quadratic;
    else if (*rate == "Superlinear")
      a.expected_rate = RateEstimate::Class::Superlinear;
    else if (*rate == "Linear")
      a.expected_rate = RateEstimate::Class::Linear;
    else
      r.error("expected_rate", "expected Quadratic, Superlinear or Linear");
  }
  r.number("max_tail_ratio", a.max_tail_ratio, positive, "must be positive");
  r.number("residual_tol", a.residual_tol, positive, "must be positive");
  r.integer("affine_iterations", a.affine_iterations, 0);
  if (auto model = r.text("model")) {
    if (*model == "linear")
      a.model = IssModel::Linear;
    else if (*model == "quadratic")
      a.model = IssModel::Quadratic;
    else
      r.error("model", "expected \"linear\" or \"quadratic\"");
  }
  r.number("slack", a.slack, [](double v) { return v >= 1.0; }, "must be at least 1");
  r.integer("max_violations", a.max_violations, 0);
  r.number("scaling_factor", a.scaling_factor, [](double v) { return v >= 1.0; },
           "must be at least 1");
  r.integer("ultimate_skip", a.ultimate_skip, 0);
  r.number("max_distance", a.max_distance, positive, "must be positive");
  r.boolean("require_regular", a.require_regular);
  r.boolean("require_sup_e_monotone", a.require_sup_e_monotone);
  r.boolean("require_alpha_monotone", a.require_alpha_monotone);
  if (r.has("tracking_K")) {
    int K = 0;
    r.integer("tracking_K", K, 1);
    if (K >= 1) a.tracking_K = K;
  }
  r.number("tracking_tol", a.tracking_tol, positive, "must be positive");
}

bool stochastic(ExperimentKind kind) {
  return kind != ExperimentKind::QuasiRegularityScan;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::filesystem::path& base_dir,
                                   std::optional<ExperimentKind> expected) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("config:" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     e.what());
  }

  std::vector<std::string> errors;
  ExperimentConfig cfg;
  if (expected) cfg.kind = *expected;
  {
    Reader r(doc, "", errors);
    if (auto kind = r.text("kind")) {
      if (auto k = kind_from_command(*kind)) {
        if (expected && *k != *expected)
          r.error("kind", "config is for " + std::string(to_string(*k)) + " but the command runs " +
                              to_string(*expected));
        cfg.kind = *k;
      } else {
        r.error("kind", "unknown experiment kind \"" + *kind + "\"");
      }
    }
    cfg.name = r.text("name").value_or(to_string(cfg.kind));
    if (auto problem = r.text("problem")) {
      cfg.problem = base_dir / *problem;
    } else {
      r.error("problem", "required");
    }

    if (r.has("solvers")) {
      const auto& s = r.at("solvers");
      if (!s.is_array() || s.empty()) {
        r.error("solvers", "expected a nonempty array of solver names");
      } else {
        for (std::size_t k = 0; k < s.size(); ++k) {
          const std::string f = "solvers[" + std::to_string(k) + "]";
          if (!s[k].is_string()) {
            errors.push_back(f + ": expected a string");
          } else if (auto sv = solver_from_name(s[k].get<std::string>())) {
            cfg.solvers.push_back(*sv);
          } else {
            errors.push_back(f + ": unknown solver \"" + s[k].get<std::string>() +
                             "\" (expected jn, m1, m2, ssn or dssn)");
          }
        }
      }
    }
    if (r.has("newton")) {
      Reader n(r.at("newton"), "newton", errors);
      read_newton(n, cfg.newton);
    }
    if (r.has("best_response")) {
      Reader b(r.at("best_response"), "best_response", errors);
      read_best_response(b, cfg.best_response);
    }
    if (auto rule = r.text("tie_rule")) {
      if (*rule == "prefer_g")
        cfg.tie_rule = TieRule::PreferG;
      else if (*rule == "prefer_lambda")
        cfg.tie_rule = TieRule::PreferLambda;
      else
        r.error("tie_rule", "expected \"prefer_g\" or \"prefer_lambda\"");
    }
    if (r.has("perturbation")) {
      Reader p(r.at("perturbation"), "perturbation", errors);
      read_perturbation(p, cfg.perturbation);
    }
    if (r.has("magnitudes")) {
      const auto& m = r.at("magnitudes");
      if (!m.is_array() || m.empty()) {
        r.error("magnitudes", "expected a nonempty array");
      } else {
        for (std::size_t k = 0; k < m.size(); ++k) {
          if (!m[k].is_number() || m[k].get<double>() < 0.0)
            errors.push_back("magnitudes[" + std::to_string(k) + "]: must be a nonnegative number");
          else
            cfg.magnitudes.push_back(m[k].get<double>());
        }
      }
    }
    if (r.has("seeds")) {
      const auto& s = r.at("seeds");
      if (s.is_array()) {
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (!s[k].is_number_unsigned())
            errors.push_back("seeds[" + std::to_string(k) + "]: expected a nonnegative integer");
          else
            cfg.seeds.push_back(s[k].get<std::uint64_t>());
        }
      } else if (s.is_object()) {
        Reader sr(s, "seeds", errors);
        int first = 0, count = 0;
        sr.integer("first", first, 0);
        sr.integer("count", count, 1);
        if (!sr.has("count")) sr.error("count", "required");
        for (int k = 0; k < count; ++k) cfg.seeds.push_back(static_cast<std::uint64_t>(first + k));
      } else {
        r.error("seeds", "expected an array or {\"first\", \"count\"}");
      }
    }
    cfg.start = r.vector("start");
    r.number("start_radius", cfg.start_radius, positive, "must be positive");
    cfg.reference = r.vector("reference");
    if (r.has("K")) {
      const auto& K = r.at("K");
      std::vector<int> budgets;
      if (!K.is_array() || K.empty()) {
        r.error("K", "expected a nonempty array of budgets");
      } else {
        for (std::size_t k = 0; k < K.size(); ++k) {
          if (!K[k].is_number_integer() || K[k].get<int>() < 1)
            errors.push_back("K[" + std::to_string(k) + "]: budgets must be positive integers");
          else
            budgets.push_back(K[k].get<int>());
        }
        cfg.budgets = budgets;
      }
    }
    if (r.has("e0")) {
      double e0 = 0.0;
      r.number("e0", e0, nonneg, "must be nonnegative");
      cfg.e0 = e0;
    }
    r.integer("threads", cfg.threads, 0);
    if (auto out = r.text("output")) cfg.output = *out;
    if (r.has("acceptance")) {
      Reader a(r.at("acceptance"), "acceptance", errors);
      read_acceptance(a, cfg.acceptance);
    }
  }

  if (cfg.solvers.empty())
    cfg.solvers.push_back(cfg.kind == ExperimentKind::MpcSweep ? SolverKind::Mechanism1
                                                               : SolverKind::JosephyNewton);
  if (cfg.magnitudes.empty()) cfg.magnitudes.push_back(1e-3);
  if (cfg.seeds.empty() && !doc.contains("seeds")) cfg.seeds.push_back(0);
  if (cfg.seeds.empty() && stochastic(cfg.kind))
    errors.push_back("seeds: must be nonempty for " + std::string(to_string(cfg.kind)));

  for (auto s : cfg.solvers) {
    if (cfg.kind == ExperimentKind::MpcSweep && s == SolverKind::Mechanism2)
      errors.push_back("solvers: m2 is not available for closed-loop sweeps");
    if (cfg.kind == ExperimentKind::QuasiRegularityScan && !is_primal_dual(s))
      errors.push_back(std::string("solvers: ") + to_string(s) +
                       " does not produce primal-dual points for a quasi-regularity scan");
    if (cfg.kind == ExperimentKind::IssCampaign && is_distributed(s))
      errors.push_back(std::string("solvers: ") + to_string(s) +
                       " has no perturbed variant (use jn or ssn)");
  }
  if (cfg.newton.inner.tol_inner > cfg.newton.tol_outer)
    errors.push_back("newton.tol_inner: must not exceed newton.tol_outer (" +
                     format_double(cfg.newton.tol_outer) + "), or outer iterations stall");
  for (auto s : cfg.solvers) {
    if (s != SolverKind::Mechanism2) continue;
    if (cfg.newton.inner.tol_inner > cfg.best_response.tol_br)
      errors.push_back("newton.tol_inner: must not exceed best_response.tol_br (" +
                       format_double(cfg.best_response.tol_br) + ") when m2 is used");
    if (cfg.best_response.tol_br >= cfg.newton.tol_outer)
      errors.push_back("best_response.tol_br: must be below newton.tol_outer (" +
                       format_double(cfg.newton.tol_outer) + ") when m2 is used");
  }
  if (cfg.kind == ExperimentKind::IssCampaign) {
    const bool pd = !cfg.solvers.empty() && is_primal_dual(cfg.solvers.front());
    if (cfg.perturbation.mode == PerturbationSpec::Mode::None)
      cfg.perturbation.mode = pd ? PerturbationSpec::Mode::ResidualInjection
                                 : PerturbationSpec::Mode::AdditiveGradient;
    if (pd && cfg.perturbation.mode != PerturbationSpec::Mode::ResidualInjection)
      errors.push_back("perturbation.mode: semismooth Newton accepts residual_injection only");
  }
  if (cfg.kind == ExperimentKind::DistributedCompare) {
    bool any_dist = false;
    for (auto s : cfg.solvers) any_dist = any_dist || is_distributed(s);
    if (!any_dist) errors.push_back("solvers: a distributed comparison needs m1, m2 or dssn");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<ExperimentKind> expected) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str(), path.parent_path(), expected);
  } catch (const InputError& e) {
    std::string what = e.what();
    if (what.rfind("config:", 0) == 0) what = path.string() + what.substr(6);
    throw InputError(what);
  }
}

void apply_seed_override(ExperimentConfig& cfg, std::uint64_t seed) { cfg.seeds = {seed}; }

std::vector<RunSpec> schedule_runs(const ExperimentConfig& cfg,
                                   const std::vector<int>& scenario_K) {
  std::vector<RunSpec> runs;
  auto id = [](std::initializer_list<std::string> parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "_") + p;
    return out;
  };
  switch (cfg.kind) {
    case ExperimentKind::IssCampaign:
      for (auto solver : cfg.solvers)
        for (std::size_t m = 0; m < cfg.magnitudes.size(); ++m)
          for (auto seed : cfg.seeds)
            runs.push_back({id({to_string(solver), "m" + std::to_string(m),
                                "seed" + std::to_string(seed)}),
                            solver, seed, cfg.magnitudes[m], -1});
      break;
    case ExperimentKind::MpcSweep: {
      const auto& K = cfg.budgets ? *cfg.budgets : scenario_K;
      const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
      for (auto solver : cfg.solvers) {
        for (int k : K)
          runs.push_back({id({to_string(solver), "K" + std::to_string(k)}), solver, seed, 0.0, k});
        if (cfg.acceptance.tracking_K)
          runs.push_back({id({to_string(solver), "K" + std::to_string(*cfg.acceptance.tracking_K),
                              "tracking"}),
                          solver, seed, 0.0, *cfg.acceptance.tracking_K});
      }
      break;
    }
    default:
      for (auto solver : cfg.solvers)
        for (auto seed : cfg.seeds)
          runs.push_back({id({to_string(solver), "seed" + std::to_string(seed)}), solver, seed,
                          0.0, -1});
      break;
  }
  return runs;
}

}  // namespace nashnewton::harness
