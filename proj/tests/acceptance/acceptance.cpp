// Acceptance driver: one PASS/FAIL line per criterion.
//
//   acceptance run-headline DIR   run the headline theorem1 configuration into DIR
//   acceptance K DIR              evaluate criterion K (1..8)
//   acceptance all DIR            evaluate every criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mspde/harness/config.hpp"
#include "mspde/harness/corpus.hpp"
#include "mspde/harness/experiments.hpp"
#include "mspde/harness/io.hpp"
#include "mspde/regularity/estimators.hpp"
#include "mspde/regularity/holder.hpp"
#include "mspde/regularity/minimax.hpp"
#include "mspde/solver.hpp"

namespace fs = std::filesystem;
using namespace mspde;
using namespace mspde::harness;

namespace {

// Pinned tolerances.
constexpr double kExactRemainder = 1e-9;
constexpr double kPassFraction = 0.8;
constexpr double kCovarianceRelative = 0.05;
constexpr double kWhiteness = 0.05;
constexpr double kClosedFormDecay = 1e-12;
constexpr double kImexPerMode = 0.01;
constexpr double kImexOrder = 0.8;
constexpr double kConstantCap = 50.0;
constexpr double kRefinement = 0.5;
constexpr double kCoefficientHolderRatio = 1.05;
constexpr double kOracleRelative = 0.05;
constexpr double kLpGridSearch = 1e-4;
constexpr double kChebyshevGridSearch = 1e-6;
constexpr double kBenchmark = 1e-3;
constexpr double kRegularityRefinement = 0.3;
constexpr double kFrozenHolderFactor = 3.0;

constexpr double kRuntime1 = 120.0;
constexpr double kRuntime2 = 900.0;
constexpr double kRuntime3 = 60.0;
constexpr double kRuntime4 = 120.0;
constexpr double kRuntime5 = 600.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Item {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string relation;
  double threshold = 0.0;
};

Item le(std::string name, double v, double t) { return {std::move(name), v <= t, v, "<=", t}; }
Item ge(std::string name, double v, double t) { return {std::move(name), v >= t, v, ">=", t}; }
Item missing(const std::string& name) { return {name + " (missing)", false, 0.0, "", 0.0}; }

struct Outcome {
  std::vector<Item> items;
  bool pass() const {
    return !items.empty() && std::all_of(items.begin(), items.end(), [](const Item& i) { return i.pass; });
  }
  void add(Item i) { items.push_back(std::move(i)); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunReport run_into(ExperimentConfig cfg, const fs::path& dir) {
  cfg.output.dir = dir.string();
  return run_experiment(cfg);
}

// ---------------------------------------------------------------------------
// Headline run shared by criteria 2 and 7.

ExperimentConfig headline_config(const fs::path& root) {
  ExperimentConfig cfg;
  cfg.experiment = "theorem1";
  cfg.grid.dim = 1;
  cfg.grid.n = 256;
  cfg.noise.alpha = 0.75;
  cfg.nonlinearity.kind = "sine";
  cfg.nonlinearity.kappa = 0.5;
  cfg.theorem1.basepoints = 16;
  cfg.seeds = {1, 2, 3, 4};
  cfg.output.dir = (root / "headline").string();
  return cfg;
}

struct Headline {
  Json report;
  double wall_seconds = 0.0;
};

Headline load_headline(const fs::path& root) {
  const auto cfg = headline_config(root);
  const auto dir = output_directory(cfg);
  if (!fs::exists(dir / "report.json") || !fs::exists(dir / "timing.json")) {
    std::printf("    headline report missing, running it now\n");
    run_experiment(cfg);
  }
  Headline h;
  h.report = Json::parse(slurp(dir / "report.json"));
  h.wall_seconds = Json::parse(slurp(dir / "timing.json"))["wall_seconds"].get<double>();
  return h;
}

// ---------------------------------------------------------------------------
// 1. Linear degeneracy.

Outcome criterion1(const fs::path& root) {
  Outcome o;
  const auto t0 = Clock::now();
  ExperimentConfig base;
  base.experiment = "theorem1";
  base.seeds = {1};
  base.theorem1.companion_n = false;

  ExperimentConfig identity = base;
  identity.nonlinearity.kind = "sine";
  identity.nonlinearity.kappa = 0.0;
  const auto a = run_into(identity, root / "c1");

  ExperimentConfig linear = base;
  linear.nonlinearity.kind = "linear";
  linear.nonlinearity.matrix = Matrix2{{0.6, 0.0, 0.0, 0.0}};
  const auto b = run_into(linear, root / "c1");

  for (const auto* rep : {&a, &b}) {
    const std::string label = rep == &a ? "identity" : "linear_M";
    const Check* c = rep->find("exact_remainder");
    o.add(c ? le(label + ".remainder", c->value, kExactRemainder) : missing(label + ".remainder"));
    const Check* h = rep->find("shared_noise_path_mismatches");
    o.add(h ? le(label + ".noise_path_mismatches", h->value, 0.0) : missing(label + ".noise_path_mismatches"));
  }
  o.add(le("runtime_seconds", seconds_since(t0), kRuntime1));
  return o;
}

// ---------------------------------------------------------------------------
// 2. Headline scaling.

Outcome criterion2(const fs::path& root) {
  Outcome o;
  const auto h = load_headline(root);
  const auto& m = h.report["metrics"];
  o.add(ge("modelled_slope_fraction", m["slope_pass_fraction"].get<double>(), kPassFraction));
  o.add(ge("baseline_slope_fraction", m["baseline_pass_fraction"].get<double>(), kPassFraction));
  o.add(le("runtime_seconds", h.wall_seconds, kRuntime2));
  return o;
}

// ---------------------------------------------------------------------------
// 3. Noise statistics.

Outcome criterion3(const fs::path& root) {
  Outcome o;
  ExperimentConfig cfg;
  cfg.experiment = "noise-diag";
  cfg.noise_diag.samples = 10000;
  cfg.noise_diag.max_lag = 4;
  cfg.seeds = {1, 2, 3, 4};
  const auto rep = run_into(cfg, root / "c3");
  const Check* c = rep.find("covariance_relative_error");
  const Check* r = rep.find("increment_correlation");
  o.add(c ? le("covariance_relative_error", c->value, kCovarianceRelative) : missing("covariance_relative_error"));
  o.add(r ? le("increment_correlation", r->value, kWhiteness) : missing("increment_correlation"));
  o.add(le("runtime_seconds", rep.wall_seconds, kRuntime3));
  return o;
}

// ---------------------------------------------------------------------------
// 4. Solver verification.

NoiseSpec noise_spec(double sigma, double t_support, std::uint64_t seed) {
  NoiseSpec s;
  s.alpha = 0.75;
  s.dim = 1;
  s.sigma = sigma;
  s.master_seed = seed;
  s.t_support = t_support;
  return s;
}

/// Per-mode coefficient series of a one-dimensional gradient record.
std::vector<std::vector<Complex>> mode_series(const SpaceTimeField& grad) {
  Fft fft(grad.grid());
  std::vector<std::vector<Complex>> out(grad.snapshots(), std::vector<Complex>(fft.spectral_size()));
  for (std::size_t s = 0; s < grad.snapshots(); ++s) fft.forward(grad.values(s, 0), out[s]);
  return out;
}

Outcome criterion4(const fs::path&) {
  Outcome o;
  const auto t0 = Clock::now();

  // Closed-form decay of every mode under the exact update, zero noise.
  {
    const auto g = GridSpec::make(1, 64, 0.0078125, 0.25, 4);
    const NoisePath path(noise_spec(0.0, 1.0, 1), g);
    SolveConfig sc;
    sc.grid = g;
    sc.noise = &path;
    const SpectralGrid modes(g);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    sc.initial_modes.resize(modes.size());
    for (std::size_t i = 1; i < modes.size(); ++i) sc.initial_modes[i] = {gauss(rng), modes.self_conjugate(i) ? 0.0 : gauss(rng)};
    const double a = 0.8;
    const auto t = solve_linear_constant(sc, Matrix2::diagonal(a, 0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double m = modes.mode(i)[0];
      const double mu = 4.0 * std::numbers::pi * std::numbers::pi * m * m * a;
      worst = std::max(worst, std::abs(t.final_modes[i] - sc.initial_modes[i] * std::exp(-mu * g.t_end)));
    }
    o.add(le("exact_vs_closed_form", worst, kClosedFormDecay));
  }

  // IMEX (A = identity) against the exact update on one noise path at the
  // default resolution and step, mode by mode over the second half of the run.
  {
    const auto g = GridSpec::make(1, 256, 0.0625, 0.25, 16);
    const NoisePath path(noise_spec(1.0, 1.0, 5), g);
    SolveConfig sc;
    sc.grid = g;
    sc.noise = &path;
    sc.record_state = false;
    sc.A = Nonlinearity::sine(1, 0.0);
    sc.scheme = Scheme::imex;
    const auto imex = mode_series(solve_nonlinear(sc).gradient);
    const auto exact = mode_series(solve_linear_constant(sc, Matrix2::identity()).gradient);
    const std::size_t modes = exact.front().size();
    double worst = 0.0;
    std::size_t passing = 0, band = 0;
    bool contiguous = true;
    for (std::size_t k = 1; k < modes; ++k) {
      double num2 = 0.0, den2 = 0.0;
      for (std::size_t s = exact.size() / 2; s < exact.size(); ++s) {
        num2 += std::norm(imex[s][k] - exact[s][k]);
        den2 += std::norm(exact[s][k]);
      }
      if (den2 == 0.0) continue;
      const double rel = std::sqrt(num2 / den2);
      worst = std::max(worst, rel);
      if (rel <= kImexPerMode) {
        ++passing;
        if (contiguous) band = k;
      } else {
        contiguous = false;
      }
    }
    std::printf("    imex per-mode: %zu of %zu modes within %.2g; contiguous band |m| <= %zu\n", passing, modes - 1,
                kImexPerMode, band);
    o.add(le("imex_vs_exact_per_mode_max", worst, kImexPerMode));
  }

  // IMEX self-refinement on a smooth deterministic nonlinear problem.
  {
    const int n = 64;
    const double t_end = 256.0 / (n * n);
    const std::vector<double> cfls{0.25, 0.125, 0.0625, 0.03125};
    const auto finest = GridSpec::make(1, n, t_end, cfls.back(), 1);
    const NoisePath path(noise_spec(0.0, 1.0, 1), finest);
    std::vector<std::vector<Complex>> finals;
    for (double cfl : cfls) {
      SolveConfig sc;
      sc.grid = GridSpec::make(1, n, t_end, cfl, 1);
      sc.noise = &path;
      sc.record_state = false;
      sc.A = Nonlinearity::sine(1, 0.5);
      sc.scheme = Scheme::imex;
      sc.initial_modes.assign(static_cast<std::size_t>(n / 2 + 1), Complex{});
      sc.initial_modes[1] = {0.15, 0.05};
      sc.initial_modes[2] = {-0.04, 0.02};
      finals.push_back(solve_nonlinear(sc).final_modes);
    }
    auto dist = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
      return std::sqrt(s);
    };
    double order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 2 < finals.size(); ++k) {
      const double e1 = dist(finals[k], finals[k + 1]);
      const double e2 = dist(finals[k + 1], finals[k + 2]);
      order = std::min(order, std::log2(e1 / e2));
    }
    o.add(ge("imex_refinement_order", order, kImexOrder));
  }
  o.add(le("runtime_seconds", seconds_since(t0), kRuntime4));
  return o;
}

// ---------------------------------------------------------------------------
// 5. Lemma suites.

/// Minimax line fit by enumerating triples.
double line_fit_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      for (std::size_t k = j + 1; k < x.size(); ++k) {
        std::array<std::pair<double, double>, 3> p{{{x[i], y[i]}, {x[j], y[j]}, {x[k], y[k]}}};
        std::sort(p.begin(), p.end());
        const double span = p[2].first - p[0].first;
        if (span <= 0.0) continue;
        const double chord = p[0].second + (p[2].second - p[0].second) * (p[1].first - p[0].first) / span;
        best = std::max(best, 0.5 * std::abs(p[1].second - chord));
      }
    }
  }
  return best;
}

/// sup over l, 0 < |y| <= l of (max - min)/2 of grad delta_y f over B_l, scaled by l^{-2 alpha}.
double increment_oracle(const SpaceTimeField& grad, const SpaceTimePoint& z, const std::vector<double>& radii,
                        double alpha) {
  const GridSpec& g = grad.grid();
  const long s = grad.nearest_snapshot(z.t);
  double out = 0.0;
  for (double l : radii) {
    const int reach = static_cast<int>(std::floor(l * g.n + 1e-9));
    for (int k = -reach; k <= reach; ++k) {
      if (k == 0) continue;
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < g.nodes(); ++i) {
        if (!(torus_distance(g.node_position(i), z.x, 1) < l)) continue;
        const double v = grad.at(static_cast<std::size_t>(s), 0, g.node_index(static_cast<int>(i) + k)) -
                         grad.at(static_cast<std::size_t>(s), 0, i);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      out = std::max(out, 0.5 * (hi - lo) / std::pow(l, 2.0 * alpha));
    }
  }
  return out;
}

double affine_oracle(const SpaceTimeField& grad, const SpaceTimePoint& z, const std::vector<double>& radii,
                     double alpha) {
  const GridSpec& g = grad.grid();
  const long s = grad.nearest_snapshot(z.t);
  double out = 0.0;
  for (double r : radii) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      const Vec2 off = torus_offset(g.node_position(i), z.x, 1);
      if (!(std::abs(off[0]) < r)) continue;
      x.push_back(off[0]);
      y.push_back(grad.at(static_cast<std::size_t>(s), 0, i));
    }
    out = std::max(out, line_fit_oracle(x, y) / std::pow(r, 2.0 * alpha));
  }
  return out;
}

/// sup over every pair of recorded samples of |f(z) - f(z')| / d(z, z')^alpha.
double holder_oracle(const SpaceTimeField& f, double alpha) {
  const GridSpec& g = f.grid();
  double out = 0.0;
  const std::size_t m = f.snapshots() * g.nodes();
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t sa = a / g.nodes(), ia = a % g.nodes();
    const SpaceTimePoint za{f.time(static_cast<long>(sa)), g.node_position(ia)};
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t sb = b / g.nodes(), ib = b % g.nodes();
      const double d = cc_distance(za, {f.time(static_cast<long>(sb)), g.node_position(ib)}, 1);
      out = std::max(out, std::abs(f.at(sa, 0, ia) - f.at(sb, 0, ib)) / std::pow(d, alpha));
    }
  }
  return out;
}

double relative_gap(double estimate, double oracle) {
  // Both sides at rounding level count as agreeing zeros.
  if (std::max(std::abs(estimate), std::abs(oracle)) <= 1e-12) return 0.0;
  if (oracle == 0.0) return INFINITY;
  return std::abs(estimate - oracle) / oracle;
}

Outcome criterion5(const fs::path& root) {
  Outcome o;
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.experiment = "lemmas";
  cfg.lemmas.n = 32;
  cfg.seeds = {1, 2, 3, 4};
  const auto rep = run_into(cfg, root / "c5");
  for (const char* name : {"spatial_fit_constant", "spacetime_fit_constant", "increment_fit_constant"}) {
    const Check* c = rep.find(name);
    o.add(c ? le(name, c->value, kConstantCap) : missing(name));
  }
  if (const Check* c = rep.find("coefficient_holder_ratio")) o.add(le("coefficient_holder_ratio", c->value, kCoefficientHolderRatio));
  if (const Check* c = rep.find("commutator_constant")) o.add(le("commutator_constant", c->value, kConstantCap));
  for (const char* name : {"spatial_fit_refinement", "spacetime_fit_refinement", "increment_fit_refinement", "coefficient_holder_refinement", "commutator_refinement"}) {
    const Check* c = rep.find(name);
    o.add(c ? le(name, c->value, kRefinement) : missing(name));
  }
  if (const Check* c = rep.find("affine_entries_lhs")) o.add(le("affine_entries_lhs", c->value, kExactRemainder));

  // Independent brute-force oracles on the corpus at n = 32.
  const auto params = cfg.regularity_params(1);
  double gap_affine = 0.0, gap_increment = 0.0, gap_holder = 0.0;
  for (const auto& e : lemma_corpus(1, cfg.noise.alpha, cfg.lemmas.fields)) {
    const auto s = sample_entry(e, 1, 32, params.r_max);
    const auto radii = params.radii(s.f.grid());
    gap_affine = std::max(gap_affine, relative_gap(affine_constant(s.grad, s.z, params),
                                                   affine_oracle(s.grad, s.z, radii, params.alpha)));
    gap_increment = std::max(gap_increment, relative_gap(increment_constant_N(s.grad, s.z, params),
                                                         increment_oracle(s.grad, s.z, radii, params.alpha)));
    gap_holder = std::max(gap_holder, relative_gap(holder_seminorm(s.grad, params.alpha, std::nullopt,
                                                                   params.pair_budget, params.seed),
                                                   holder_oracle(s.grad, params.alpha)));
  }
  o.add(le("oracle_affine_constant", gap_affine, kOracleRelative));
  o.add(le("oracle_increment_constant", gap_increment, kOracleRelative));
  o.add(le("oracle_holder_seminorm", gap_holder, kOracleRelative));
  o.add(le("runtime_seconds", seconds_since(t0), kRuntime5));
  return o;
}

// ---------------------------------------------------------------------------
// 6. Min-max fitting.

/// Minimizes a convex function of `dim` parameters by grid search, shrinking
/// the window around the best node each round.
double grid_search(int dim, std::vector<double> center, double half_width,
                   const std::function<double(const std::vector<double>&)>& f) {
  const int pts = dim == 1 ? 401 : 81;
  double best = f(center);
  for (int round = 0; round < 300 && half_width > 1e-14; ++round) {
    std::vector<double> best_p = center;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    const double h = 2.0 * half_width / (pts - 1);
    for (;;) {
      std::vector<double> p(static_cast<std::size_t>(dim));
      for (std::size_t a = 0; a < p.size(); ++a) p[a] = center[a] - half_width + h * idx[a];
      const double v = f(p);
      if (v < best) {
        best = v;
        best_p = p;
      }
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == pts) idx[a++] = 0;
      if (a == idx.size()) break;
    }
    center = best_p;
    // A unimodal function of one variable has its minimum within a node of the best one.
    half_width = dim == 1 ? 2.0 * h : 0.85 * half_width;
  }
  return best;
}

Outcome criterion6(const fs::path&) {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(4, 9);

  double lp_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    std::vector<ScalarSample> s(static_cast<std::size_t>(count(rng)));
    for (auto& p : s) {
      p.offset = {u(rng), dim == 2 ? u(rng) : 0.0};
      p.value = u(rng) + 0.5 * p.offset[0] * p.offset[0];
    }
    const auto fit = affine_fit_scalar(s, dim);
    // For fixed slopes the best offset centres the residual range.
    auto objective = [&](const std::vector<double>& slope) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& p : s) {
        double v = p.value;
        for (std::size_t a = 0; a < slope.size(); ++a) v -= slope[a] * p.offset[a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return 0.5 * (hi - lo);
    };
    const double searched = grid_search(dim, std::vector<double>(static_cast<std::size_t>(dim), 0.0), 8.0, objective);
    if (fit.residual > searched + kLpGridSearch) std::printf("    lp above grid search: %.9g vs %.9g\n", fit.residual, searched);
    lp_gap = std::max(lp_gap, std::abs(fit.residual - searched));
  }
  o.add(le("lp_vs_grid_search", lp_gap, kLpGridSearch));

  double cheb_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    std::vector<Vec2> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = {u(rng), dim == 2 ? u(rng) : 0.0};
    const auto c = chebyshev_center(pts, dim, static_cast<std::uint64_t>(trial));
    auto radius_at = [&](double x0, double x1) {
      double m = 0.0;
      for (const auto& p : pts) m = std::max(m, std::hypot(p[0] - x0, p[1] - x1));
      return m;
    };
    // Outer grid search over the first coordinate; the second is minimized
    // exactly for each node by ternary search.
    auto objective = [&](const std::vector<double>& x) {
      if (dim == 1) return radius_at(x[0], 0.0);
      double lo = -1.5, hi = 1.5;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
        if (radius_at(x[0], a) < radius_at(x[0], b)) {
          hi = b;
        } else {
          lo = a;
        }
      }
      return radius_at(x[0], 0.5 * (lo + hi));
    };
    const double searched = grid_search(1, {0.0}, 1.5, objective);
    if (c.radius > searched + 1e-9) std::printf("    centre above grid search: %.12g vs %.12g\n", c.radius, searched);
    cheb_gap = std::max(cheb_gap, std::abs(c.radius - searched));
  }
  o.add(le("chebyshev_vs_grid_search", cheb_gap, kChebyshevGridSearch));

  std::vector<ScalarSample> bench;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i / 1000.0;
    bench.push_back({{x, 0.0}, x * x});
  }
  o.add(le("x_squared_benchmark_error", std::abs(affine_fit_scalar(bench, 1).residual - 0.5), kBenchmark));
  return o;
}

// ---------------------------------------------------------------------------
// 7. Regularity stability.

Outcome criterion7(const fs::path& root) {
  Outcome o;
  ExperimentConfig cfg;
  cfg.experiment = "apriori-sweep";
  cfg.seeds = {1, 2, 3, 4};
  const auto rep = run_into(cfg, root / "c7");
  const Check* v = rep.find("grad_v_refinement_change");
  o.add(v ? le("grad_v_refinement_change", v->value, kRegularityRefinement) : missing("grad_v_refinement_change"));
  const auto h = load_headline(root);
  o.add(le("frozen_holder_sup_ratio", h.report["metrics"]["max_frozen_holder_ratio"].get<double>(), kFrozenHolderFactor));
  return o;
}

// ---------------------------------------------------------------------------
// 8. Reproducibility.

std::map<std::string, std::string> snapshot_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).string();
    if (rel == "timing.json") continue;
    out[rel] = slurp(e.path());
  }
  return out;
}

Outcome criterion8(const fs::path& root) {
  Outcome o;
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c;
    c.experiment = "noise-diag";
    c.grid.n = 64;
    c.noise_diag.samples = 500;
    c.seeds = {3, 4};
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.experiment = "theorem1";
    c.grid.n = 128;
    c.grid.t_end = 0.25;
    c.grid.snap_stride = 4;
    c.theorem1.t_min = 0.1;
    c.theorem1.basepoints = 3;
    c.output.trajectories = true;
    c.output.trajectory_stride = 64;
    c.seeds = {2, 5};
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.experiment = "lemmas";
    c.lemmas.n = 16;
    c.lemmas.fields = 2;
    c.lemmas.sim_n = 32;
    c.seeds = {1};
    configs.push_back(c);
  }
  std::size_t compared = 0, differing = 0;
  for (auto cfg : configs) {
    cfg.output.dir = (root / "c8").string();
    const auto dir = output_directory(cfg);
    fs::remove_all(dir);
    const auto first_report = run_experiment(cfg);
    const auto first = snapshot_outputs(dir);
    fs::remove_all(dir);
    const auto second_report = run_experiment(cfg);
    const auto second = snapshot_outputs(dir);
    ++compared;
    if (first_report.body().dump() != second_report.body().dump()) ++differing;
    for (const auto& [name, bytes] : first) {
      ++compared;
      const auto it = second.find(name);
      if (it == second.end() || it->second != bytes) {
        ++differing;
        std::printf("    %s/%s differs\n", cfg.experiment.c_str(), name.c_str());
      }
    }
    if (second.size() != first.size()) ++differing;
  }
  std::printf("    %zu outputs compared\n", compared);
  o.add(le("differing_outputs", static_cast<double>(differing), 0.0));
  o.add(ge("compared_outputs", static_cast<double>(compared), 10.0));
  return o;
}

// ---------------------------------------------------------------------------

const std::map<int, std::pair<std::string, std::function<Outcome(const fs::path&)>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome(const fs::path&)>>> table{
      {1, {"linear degeneracy", criterion1}},      {2, {"headline scaling", criterion2}},
      {3, {"noise statistics", criterion3}},       {4, {"solver verification", criterion4}},
      {5, {"lemma suites", criterion5}},           {6, {"min-max fitting", criterion6}},
      {7, {"regularity stability", criterion7}},   {8, {"reproducibility", criterion8}},
  };
  return table;
}

bool evaluate(int k, const fs::path& root) {
  const auto& [title, fn] = criteria().at(k);
  Outcome o;
  try {
    o = fn(root);
  } catch (const std::exception& e) {
    o.items.push_back({std::string("error: ") + e.what(), false, 0.0, "", 0.0});
  }
  for (const auto& i : o.items) {
    std::printf("    %-4s %-36s %.6g %s %.6g\n", i.pass ? "ok" : "FAIL", i.name.c_str(), i.value, i.relation.c_str(),
                i.threshold);
  }
  std::printf("criterion %d (%s): %s\n", k, title.c_str(), o.pass() ? "PASS" : "FAIL");
  std::fflush(stdout);
  return o.pass();
}

int usage() {
  std::fprintf(stderr, "usage: acceptance (run-headline | 1..8 | all) DIR\n");
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) return usage();
  const std::string mode = argv[1];
  const fs::path root = argv[2];
  try {
    if (mode == "run-headline") {
      const auto rep = run_experiment(headline_config(root));
      std::printf("headline run: %.1f s, report in %s\n", rep.wall_seconds,
                  output_directory(headline_config(root)).string().c_str());
      return 0;
    }
    if (mode == "all") {
      bool ok = true;
      for (const auto& [k, entry] : criteria()) ok = evaluate(k, root) && ok;
      return ok ? 0 : 1;
    }
    const int k = std::stoi(mode);
    if (!criteria().count(k)) return usage();
    return evaluate(k, root) ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
