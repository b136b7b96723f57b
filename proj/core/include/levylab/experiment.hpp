#ifndef LEVYLAB_EXPERIMENT_HPP_
#define LEVYLAB_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levylab/config.hpp"
#include "levylab/diagnostics.hpp"
#include "levylab/model.hpp"

namespace levylab {

// Names accepted in `diagnostics.checks`.
const std::vector<std::string>& known_diagnostics();

// Everything a run depends on. Worker count and output directory are not part
// of it: they never change an emitted number.
struct ExperimentConfig {
  std::string mode = "run";  // run | study
  ProblemSpec spec;
  int cells = 128;
  int steps = 64;
  std::size_t paths = 20;
  std::uint64_t seed = 1;
  std::size_t field_paths = 1;
  std::vector<std::string> diagnostics;

  std::vector<double> thetas = {1.0, 0.1, 0.01};
  std::optional<double> tol_constant;  // calibrated at run time when absent
  std::vector<int> steps_list;
  std::vector<double> eps_list;
  int weight_n = 1;
  InitialData perturbation = InitialData::zero();
  std::vector<int> powers = {2, 4};
  double max_principle_M = 1.0;

  // Throws ConfigError on unknown or malformed keys, naming the line.
  static ExperimentConfig from_config(const Config& config);
  static ExperimentConfig load(const std::filesystem::path& path);

  Grid grid() const;
  // The fully resolved configuration in config syntax; parsing it back gives
  // an identical ExperimentConfig.
  std::string manifest() const;
};

struct RunOptions {
  int workers = 1;
  std::filesystem::path out = "levylab-out";
  // Read jump paths from this directory instead of sampling them.
  std::optional<std::filesystem::path> replay_paths;
};

MonteCarlo make_monte_carlo(const ExperimentConfig& cfg, const RunOptions& opts);

// Writes manifest.txt, paths/, fields/, energy.csv, report.csv, summary.txt
// (and rates.csv when a rate diagnostic is selected) under opts.out.
DiagnosticsReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// Cauchy and viscosity rate tables; writes rates.csv, report.csv, summary.txt.
DiagnosticsReport convergence_study(const ExperimentConfig& cfg, const RunOptions& opts);

// Re-executes the run recorded in `manifest` with the jump paths stored next
// to it.
DiagnosticsReport replay(const std::filesystem::path& manifest, const RunOptions& opts);

}  // namespace levylab

#endif  // LEVYLAB_EXPERIMENT_HPP_
