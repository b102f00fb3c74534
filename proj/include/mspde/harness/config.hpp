#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mspde/grid.hpp"
#include "mspde/noise.hpp"
#include "mspde/nonlinearity.hpp"
#include "mspde/regularity/holder.hpp"
#include "mspde/solver.hpp"

namespace mspde::harness {

using Json = nlohmann::json;

struct GridSection {
  int dim = 1;
  int n = 256;
  double t_end = 1.0;
  double cfl = 0.25;
  int snap_stride = 16;
};

struct NoiseSection {
  double alpha = 0.75;
  double sigma = 1.0;
};

struct NonlinearitySection {
  std::string kind = "sine";
  double kappa = 0.5;
  Matrix2 matrix = Matrix2::identity();
  std::size_t probes = 1000;
};

struct SolverSection {
  std::string scheme = "lawson";
  bool dealias = false;
};

struct RegularitySection {
  double r_min = 0.0;
  double r_max = 0.25;
  std::size_t pair_budget = 100000;
  std::size_t shift_budget = 64;
};

/// Pass/fail thresholds of the experiments.
struct Thresholds {
  double slope_tolerance = 0.25;
  double pass_fraction = 0.8;
  double exact_remainder = 1e-9;
  double constant_cap = 50.0;
  double refinement_change = 0.5;
  double coefficient_holder_ratio = 1.05;
  double commutator_cap = 10.0;
  double covariance_relative = 0.05;
  double whiteness = 0.05;
  double frozen_holder_factor = 3.0;
  double regularity_refinement = 0.3;
  double oracle_relative = 0.05;
};

struct NoiseDiagSection {
  std::size_t samples = 10000;
  int max_lag = 4;
};

struct Theorem1Section {
  int basepoints = 16;
  double t_min = 0.2;
  bool companion_n = true;
};

struct LemmaSection {
  int n = 32;
  int fields = 20;
  int sim_n = 64;
  double sim_t_end = 0.25;
};

struct AprioriSection {
  std::vector<double> sigmas{0.25, 0.5, 1.0, 2.0};
  int n = 128;
  double t_end = 0.25;
  bool refine = true;
};

struct OutputSection {
  std::string dir = "out";
  bool plots = true;
  bool trajectories = false;
  int trajectory_stride = 256;
};

struct ExperimentConfig {
  std::string experiment = "theorem1";
  GridSection grid;
  NoiseSection noise;
  NonlinearitySection nonlinearity;
  SolverSection solver;
  RegularitySection regularity;
  Thresholds thresholds;
  NoiseDiagSection noise_diag;
  Theorem1Section theorem1;
  LemmaSection lemmas;
  AprioriSection apriori;
  OutputSection output;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};

  GridSpec grid_spec() const;
  NoiseSpec noise_spec(std::uint64_t seed) const;
  Nonlinearity flux() const;
  RegularityParams regularity_params(std::uint64_t seed = 1) const;
  Scheme scheme() const;
};

Json to_json(const ExperimentConfig& cfg);
/// Unknown keys are rejected.
ExperimentConfig from_json(const Json& j);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies "section.key=value" to a config document; the value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(Json& doc, std::string_view assignment);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

/// Runs every module validation the experiment depends on; throws
/// std::invalid_argument with a description on failure.
void validate(const ExperimentConfig& cfg);

bool is_known_experiment(std::string_view name);

}  // namespace mspde::harness
