#include "mspde/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mspde::harness {

namespace {

constexpr std::string_view kExperiments[] = {"noise-diag", "theorem1", "lemmas", "apriori-sweep"};

void merge_strict(Json& base, const Json& user, const std::string& path) {
  if (!user.is_object()) throw std::invalid_argument("config section '" + path + "' must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw std::invalid_argument("unknown config key: " + key);
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

template <class T>
T get(const Json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config key ") + section + "." + key + ": " + e.what());
  }
}

}  // namespace

GridSpec ExperimentConfig::grid_spec() const {
  return GridSpec::make(grid.dim, grid.n, grid.t_end, grid.cfl, grid.snap_stride);
}

NoiseSpec ExperimentConfig::noise_spec(std::uint64_t seed) const {
  NoiseSpec s;
  s.alpha = noise.alpha;
  s.dim = grid.dim;
  s.sigma = noise.sigma;
  s.master_seed = seed;
  s.t_support = grid.t_end;
  return s;
}

Nonlinearity ExperimentConfig::flux() const {
  return builtin_family(nonlinearity.kind, grid.dim, nonlinearity.kappa, nonlinearity.matrix);
}

RegularityParams ExperimentConfig::regularity_params(std::uint64_t seed) const {
  RegularityParams p;
  p.alpha = noise.alpha;
  p.r_min = regularity.r_min;
  p.r_max = regularity.r_max;
  p.pair_budget = regularity.pair_budget;
  p.shift_budget = regularity.shift_budget;
  p.seed = seed;
  return p;
}

Scheme ExperimentConfig::scheme() const { return parse_scheme(solver.scheme); }

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  j["grid"] = {{"dim", c.grid.dim}, {"n", c.grid.n}, {"t_end", c.grid.t_end}, {"cfl", c.grid.cfl},
               {"snap_stride", c.grid.snap_stride}};
  j["noise"] = {{"alpha", c.noise.alpha}, {"sigma", c.noise.sigma}};
  j["nonlinearity"] = {{"kind", c.nonlinearity.kind},
                       {"kappa", c.nonlinearity.kappa},
                       {"matrix", std::vector<double>(c.nonlinearity.matrix.v.begin(), c.nonlinearity.matrix.v.end())},
                       {"probes", c.nonlinearity.probes}};
  j["solver"] = {{"scheme", c.solver.scheme}, {"dealias", c.solver.dealias}};
  j["regularity"] = {{"r_min", c.regularity.r_min},
                     {"r_max", c.regularity.r_max},
                     {"pair_budget", c.regularity.pair_budget},
                     {"shift_budget", c.regularity.shift_budget}};
  const auto& t = c.thresholds;
  j["thresholds"] = {{"slope_tolerance", t.slope_tolerance},
                     {"pass_fraction", t.pass_fraction},
                     {"exact_remainder", t.exact_remainder},
                     {"constant_cap", t.constant_cap},
                     {"refinement_change", t.refinement_change},
                     {"coefficient_holder_ratio", t.coefficient_holder_ratio},
                     {"commutator_cap", t.commutator_cap},
                     {"covariance_relative", t.covariance_relative},
                     {"whiteness", t.whiteness},
                     {"frozen_holder_factor", t.frozen_holder_factor},
                     {"regularity_refinement", t.regularity_refinement},
                     {"oracle_relative", t.oracle_relative}};
  j["noise_diag"] = {{"samples", c.noise_diag.samples}, {"max_lag", c.noise_diag.max_lag}};
  j["theorem1"] = {{"basepoints", c.theorem1.basepoints},
                   {"t_min", c.theorem1.t_min},
                   {"companion_n", c.theorem1.companion_n}};
  j["lemmas"] = {{"n", c.lemmas.n},
                 {"fields", c.lemmas.fields},
                 {"sim_n", c.lemmas.sim_n},
                 {"sim_t_end", c.lemmas.sim_t_end}};
  j["apriori"] = {{"sigmas", c.apriori.sigmas},
                  {"n", c.apriori.n},
                  {"t_end", c.apriori.t_end},
                  {"refine", c.apriori.refine}};
  j["output"] = {{"dir", c.output.dir},
                 {"plots", c.output.plots},
                 {"trajectories", c.output.trajectories},
                 {"trajectory_stride", c.output.trajectory_stride}};
  j["seeds"] = c.seeds;
  return j;
}

ExperimentConfig from_json(const Json& user) {
  Json j = to_json(ExperimentConfig{});
  merge_strict(j, user, "");
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  c.grid.dim = get<int>(j, "grid", "dim");
  c.grid.n = get<int>(j, "grid", "n");
  c.grid.t_end = get<double>(j, "grid", "t_end");
  c.grid.cfl = get<double>(j, "grid", "cfl");
  c.grid.snap_stride = get<int>(j, "grid", "snap_stride");
  c.noise.alpha = get<double>(j, "noise", "alpha");
  c.noise.sigma = get<double>(j, "noise", "sigma");
  c.nonlinearity.kind = get<std::string>(j, "nonlinearity", "kind");
  c.nonlinearity.kappa = get<double>(j, "nonlinearity", "kappa");
  const auto m = get<std::vector<double>>(j, "nonlinearity", "matrix");
  if (m.size() == 1) {
    c.nonlinearity.matrix = Matrix2{{m[0], 0.0, 0.0, 0.0}};
  } else if (m.size() == 4) {
    c.nonlinearity.matrix = Matrix2{{m[0], m[1], m[2], m[3]}};
  } else {
    throw std::invalid_argument("nonlinearity.matrix must have 1 or 4 entries (row-major)");
  }
  c.nonlinearity.probes = get<std::size_t>(j, "nonlinearity", "probes");
  c.solver.scheme = get<std::string>(j, "solver", "scheme");
  c.solver.dealias = get<bool>(j, "solver", "dealias");
  c.regularity.r_min = get<double>(j, "regularity", "r_min");
  c.regularity.r_max = get<double>(j, "regularity", "r_max");
  c.regularity.pair_budget = get<std::size_t>(j, "regularity", "pair_budget");
  c.regularity.shift_budget = get<std::size_t>(j, "regularity", "shift_budget");
  auto& t = c.thresholds;
  t.slope_tolerance = get<double>(j, "thresholds", "slope_tolerance");
  t.pass_fraction = get<double>(j, "thresholds", "pass_fraction");
  t.exact_remainder = get<double>(j, "thresholds", "exact_remainder");
  t.constant_cap = get<double>(j, "thresholds", "constant_cap");
  t.refinement_change = get<double>(j, "thresholds", "refinement_change");
  t.coefficient_holder_ratio = get<double>(j, "thresholds", "coefficient_holder_ratio");
  t.commutator_cap = get<double>(j, "thresholds", "commutator_cap");
  t.covariance_relative = get<double>(j, "thresholds", "covariance_relative");
  t.whiteness = get<double>(j, "thresholds", "whiteness");
  t.frozen_holder_factor = get<double>(j, "thresholds", "frozen_holder_factor");
  t.regularity_refinement = get<double>(j, "thresholds", "regularity_refinement");
  t.oracle_relative = get<double>(j, "thresholds", "oracle_relative");
  c.noise_diag.samples = get<std::size_t>(j, "noise_diag", "samples");
  c.noise_diag.max_lag = get<int>(j, "noise_diag", "max_lag");
  c.theorem1.basepoints = get<int>(j, "theorem1", "basepoints");
  c.theorem1.t_min = get<double>(j, "theorem1", "t_min");
  c.theorem1.companion_n = get<bool>(j, "theorem1", "companion_n");
  c.lemmas.n = get<int>(j, "lemmas", "n");
  c.lemmas.fields = get<int>(j, "lemmas", "fields");
  c.lemmas.sim_n = get<int>(j, "lemmas", "sim_n");
  c.lemmas.sim_t_end = get<double>(j, "lemmas", "sim_t_end");
  c.apriori.sigmas = get<std::vector<double>>(j, "apriori", "sigmas");
  c.apriori.n = get<int>(j, "apriori", "n");
  c.apriori.t_end = get<double>(j, "apriori", "t_end");
  c.apriori.refine = get<bool>(j, "apriori", "refine");
  c.output.dir = get<std::string>(j, "output", "dir");
  c.output.plots = get<bool>(j, "output", "plots");
  c.output.trajectories = get<bool>(j, "output", "trajectories");
  c.output.trajectory_stride = get<int>(j, "output", "trajectory_stride");
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("override must look like section.key=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw std::invalid_argument("malformed override key: " + key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  const auto h = fnv1a(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(dump.data()), dump.size()));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_known_experiment(std::string_view name) {
  for (auto e : kExperiments) {
    if (e == name) return true;
  }
  return false;
}

void validate(const ExperimentConfig& cfg) {
  if (!is_known_experiment(cfg.experiment)) throw std::invalid_argument("unknown experiment: " + cfg.experiment);
  const GridSpec g = cfg.grid_spec();
  cfg.noise_spec(0).validate();
  const auto a = cfg.flux();
  if (cfg.nonlinearity.probes < 1000) throw std::invalid_argument("nonlinearity.probes must be at least 1000");
  const auto rep = mspde::validate(a, cfg.nonlinearity.probes);
  if (!rep.pass) throw std::invalid_argument("nonlinearity rejected: " + rep.message);
  (void)cfg.scheme();
  cfg.regularity_params().validate();
  if (cfg.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  const std::string& e = cfg.experiment;
  if (e == "theorem1") {
    if (cfg.regularity_params().radii(g).size() < 4) throw std::invalid_argument("fewer than four dyadic radii fit the grid");
    if (cfg.theorem1.basepoints < 1) throw std::invalid_argument("theorem1.basepoints must be positive");
    if (!(cfg.theorem1.t_min >= cfg.regularity.r_max * cfg.regularity.r_max) || cfg.theorem1.t_min > g.t_end) {
      throw std::invalid_argument("theorem1.t_min must lie in [r_max^2, t_end]");
    }
  } else if (e == "noise-diag") {
    if (cfg.noise_diag.samples < 2 || cfg.noise_diag.samples > g.steps()) {
      throw std::invalid_argument("noise_diag.samples must lie in [2, number of time steps]");
    }
    if (cfg.noise_diag.max_lag < 0 || cfg.noise_diag.max_lag >= cfg.grid.n / 2) {
      throw std::invalid_argument("noise_diag.max_lag out of range");
    }
  } else if (e == "lemmas") {
    if (cfg.lemmas.n < 16 || cfg.lemmas.sim_n < 16) throw std::invalid_argument("lemma grids need n >= 16");
    if (cfg.lemmas.fields < 1) throw std::invalid_argument("lemmas.fields must be positive");
    (void)GridSpec::make(cfg.grid.dim, 2 * cfg.lemmas.sim_n, cfg.lemmas.sim_t_end, cfg.grid.cfl, cfg.grid.snap_stride);
  } else {
    if (cfg.apriori.sigmas.empty()) throw std::invalid_argument("apriori.sigmas must not be empty");
    for (double s : cfg.apriori.sigmas) {
      if (!(s >= 0.0)) throw std::invalid_argument("apriori.sigmas must be nonnegative");
    }
    (void)GridSpec::make(cfg.grid.dim, 2 * cfg.apriori.n, cfg.apriori.t_end, cfg.grid.cfl, cfg.grid.snap_stride);
  }
  if (cfg.output.trajectory_stride < 1) throw std::invalid_argument("output.trajectory_stride must be positive");
}

}  // namespace mspde::harness
