#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mspde/harness/config.hpp"

namespace mspde::harness {

/// One asserted acceptance rule: `value relation threshold`.
struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string relation;
  double threshold = 0.0;
};

struct RunReport {
  std::string experiment;
  std::string config_hash;
  /// alpha, s, kappa, lambda, Lambda.
  Json parameters;
  Json metrics;
  std::vector<Check> checks;
  /// Paths relative to the output directory, in creation order.
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;

  bool all_pass() const;
  /// Everything except wall-clock; byte-identical for identical (config, seeds).
  Json body() const;
  const Check* find(const std::string& name) const;
};

/// output.dir / config hash.
std::filesystem::path output_directory(const ExperimentConfig& cfg);

RunReport run_noise_diag(const ExperimentConfig& cfg);
RunReport run_theorem1(const ExperimentConfig& cfg);
RunReport run_lemma_suite(const ExperimentConfig& cfg);
RunReport run_apriori_sweep(const ExperimentConfig& cfg);

/// Validates the config, dispatches on cfg.experiment and writes report.json
/// and timing.json into the output directory.
RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace mspde::harness
