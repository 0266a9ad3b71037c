// nashnewton: runs one experiment described by a JSON config and judges it
// against the thresholds declared there.
//
//   nashnewton converge    --config c.json [--out dir] [--seed-override s]
//   nashnewton iss         ...
//   nashnewton distributed ...
//   nashnewton quasireg    ...
//   nashnewton mpc-sweep   ...
//   nashnewton oracles
//
// Exit status: 0 all thresholds met, 1 some threshold failed, 2 bad input.

#include "nashnewton/harness/experiment.hpp"
#include "nashnewton/harness/oracles.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace nh = nashnewton::harness;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = -1;
};

int run(nh::ExperimentKind kind, const Options& opt) {
  nh::ExperimentConfig cfg;
  try {
    cfg = nh::parse_config(opt.config, kind);
  } catch (const nh::ConfigError& e) {
    std::cerr << opt.config << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (!opt.out.empty()) cfg.output = opt.out;
  if (opt.seed) nh::apply_seed_override(cfg, *opt.seed);
  if (opt.threads >= 0) cfg.threads = opt.threads;

  nh::Report report;
  try {
    report = nh::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  for (const auto& v : report.verdicts)
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.check << " [" << v.run << "] "
              << v.observed << " (" << v.threshold << ")\n";
  for (const auto& e : report.errors) std::cout << "ERROR " << e << '\n';
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << (report.passed() ? "all thresholds met" : "thresholds not met") << "; report in "
            << (cfg.output / "report.json").string() << '\n';
  return nh::exit_code(report);
}

int oracles() {
  const auto& reg = nh::oracle_registry();
  bool ok = true;
  for (const auto& t : reg.self_test_all()) {
    std::cout << (t.passed ? "PASS " : "FAIL ") << t.name << ": " << t.detail << '\n';
    ok = ok && t.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton-type Nash equilibrium experiments"};
  app.set_version_flag("--version", nh::version());
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed = 0;
  std::vector<std::pair<CLI::App*, nh::ExperimentKind>> commands;
  for (auto kind : {nh::ExperimentKind::Convergence, nh::ExperimentKind::IssCampaign,
                    nh::ExperimentKind::DistributedCompare,
                    nh::ExperimentKind::QuasiRegularityScan, nh::ExperimentKind::MpcSweep}) {
    auto* sub = app.add_subcommand(nh::command_name(kind),
                                   std::string("run a ") + nh::to_string(kind) + " experiment");
    sub->add_option("--config", opt.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides the config)");
    sub->add_option("--seed-override", seed, "replace the config's seed list with this seed");
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    commands.emplace_back(sub, kind);
  }
  auto* oracle_cmd = app.add_subcommand("oracles", "list the reference oracles and self-test them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (oracle_cmd->parsed()) return oracles();
  for (auto& [sub, kind] : commands) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed-override") > 0) opt.seed = seed;
    return run(kind, opt);
  }
  return 2;
}
