// Command line driver: validate | run | study | replay.
//
// Exit codes: 0 all checks pass, 1 a check failed (or the run broke off),
// 2 invalid input, 3 only inconclusive checks besides passes.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levylab/errors.hpp"
#include "levylab/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInconclusive = 3;

struct Flags {
  std::string config;
  std::string out = "levylab-out";
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

int exit_code(levylab::Status s) {
  switch (s) {
    case levylab::Status::pass:
      return kExitPass;
    case levylab::Status::fail:
      return kExitFail;
    case levylab::Status::inconclusive:
      return kExitInconclusive;
  }
  return kExitFail;
}

levylab::ExperimentConfig load(const Flags& f) {
  auto cfg = levylab::ExperimentConfig::load(f.config);
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

levylab::RunOptions options(const Flags& f) {
  levylab::RunOptions o;
  o.workers = f.workers;
  o.out = f.out;
  return o;
}

int finish(const levylab::DiagnosticsReport& report) {
  report.write_summary(std::cout);
  return exit_code(report.overall());
}

int validate(const Flags& f) {
  const auto cfg = load(f);
  const auto v = levylab::validate_assumptions(cfg.spec, 256, cfg.seed);
  for (const auto& c : v.checks) {
    std::printf("%-5s %-16s worst ratio %.6g%s%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                c.worst_ratio, c.reason.empty() ? "" : "  ", c.reason.c_str());
  }
  std::printf("c_phi=%.6g c_f=%.6g lambda*=%.6g K=%.6g\n", v.bounds.c_phi, v.bounds.c_f,
              v.bounds.lambda_star, v.bounds.K);
  std::printf("sqrt(phi') modulus / r^(2/3) trend: %s (informational)\n",
              v.modulus_trend_decreasing ? "decreasing" : "not decreasing");
  // Also make sure the grid resolves the initial data.
  levylab::discretize_initial(cfg.spec, cfg.grid(), cfg.spec.margin);
  return v.all_pass() ? kExitPass : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levylab experiment driver"};
  app.require_subcommand(1);
  Flags flags;
  std::string seed_text;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", flags.config, "experiment config (a manifest for replay)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory");
    if (with_seed) sub->add_option("--seed", seed_text, "base seed, overrides the config");
  };
  auto* validate_cmd = app.add_subcommand("validate", "check coefficient assumptions");
  auto* run_cmd = app.add_subcommand("run", "run the selected diagnostics");
  auto* study_cmd = app.add_subcommand("study", "Cauchy and viscosity rate tables");
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest with its stored paths");
  add_common(validate_cmd, true);
  add_common(run_cmd, true);
  add_common(study_cmd, true);
  add_common(replay_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInvalid;
  }

  try {
    if (!seed_text.empty()) {
      std::size_t used = 0;
      const unsigned long long s = std::stoull(seed_text, &used);
      if (used != seed_text.size() || seed_text[0] == '-') throw std::invalid_argument("seed");
      flags.seed = s;
    }
  } catch (const std::exception&) {
    std::cerr << "error: --seed must be a non-negative integer\n";
    return kExitInvalid;
  }

  try {
    if (validate_cmd->parsed()) return validate(flags);
    if (run_cmd->parsed()) return finish(levylab::run_experiment(load(flags), options(flags)));
    if (study_cmd->parsed()) return finish(levylab::convergence_study(load(flags), options(flags)));
    if (replay_cmd->parsed()) return finish(levylab::replay(flags.config, options(flags)));
  } catch (const levylab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const levylab::InvalidSpec& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const levylab::DomainTooSmall& e) {
    std::cerr << "invalid grid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const levylab::TruncationRequired& e) {
    std::cerr << "invalid intensity: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInvalid;
}
