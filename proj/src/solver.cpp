#include "mspde/solver.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "mspde/kernels.hpp"

namespace mspde {

namespace {

struct SnapshotRange {
  std::size_t first = 0;
  std::size_t count = 0;

  bool contains(std::size_t s) const { return s >= first && s < first + count; }
};

SnapshotRange snapshot_range(const GridSpec& g, const RecordWindow& w) {
  const std::size_t last_available = g.snapshot_count() - 1;
  const double h = g.snapshot_dt();
  const double from = std::max(0.0, w.from);
  const double to = w.to < 0.0 ? g.t_end : std::min(w.to, g.t_end);
  if (to < from) throw std::invalid_argument("record window is empty");
  const auto first = static_cast<std::size_t>(std::ceil(from / h - 1e-9));
  auto last = static_cast<std::size_t>(std::floor(to / h + 1e-9));
  last = std::min(last, last_available);
  if (last < first) throw std::invalid_argument("record window contains no snapshot time");
  return {first, last - first + 1};
}

std::uint64_t hash_increment(std::span<const Complex> dw, std::uint64_t h) { return fnv1a(dw, h); }

void check_finite(std::span<const Complex> state, std::size_t step, double dt) {
  double acc = 0.0;
  for (const auto& c : state) acc += std::abs(c.real()) + std::abs(c.imag());
  if (!std::isfinite(acc)) throw SolverDivergence(step, static_cast<double>(step) * dt);
}

/// Recording buffers for one trajectory.
struct Recorder {
  SnapshotRange range;
  bool record_state = true;
  Trajectory traj;

  Recorder(const GridSpec& g, const RecordWindow& w, bool state) : range(snapshot_range(g, w)), record_state(state) {
    const double h = g.snapshot_dt();
    const double t0 = static_cast<double>(range.first) * h;
    if (record_state) traj.state.emplace(g, 1, t0, h, range.count);
    traj.gradient = SpaceTimeField(g, g.dim, t0, h, range.count);
  }

  void record(const SpectralGrid& modes, Fft& fft, std::span<const Complex> state, std::size_t snapshot,
              std::vector<double>& scratch) {
    if (!range.contains(snapshot)) return;
    const std::size_t s = snapshot - range.first;
    if (record_state) {
      fft.inverse(state, scratch);
      auto dst = traj.state->values(s, 0);
      std::copy(scratch.begin(), scratch.end(), dst.begin());
    }
    gradient_from_modes(modes, fft, state, traj.gradient, s);
  }
};

std::vector<double> decay_factors(const SpectralGrid& modes, const Matrix2& a, double dt) {
  std::vector<double> d(modes.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(-modes.symbol(i, a) * dt);
  return d;
}

void initial_state(const SolveConfig& cfg, std::vector<Complex>& state) {
  if (cfg.initial_modes.empty()) return;
  if (cfg.initial_modes.size() != state.size()) throw std::invalid_argument("initial_modes has the wrong size");
  state = cfg.initial_modes;
}

void fill_provenance(Trajectory& t, const SolveConfig& cfg, std::string_view scheme) {
  t.seed = cfg.noise->spec().master_seed;
  t.scheme = std::string(scheme);
  t.cfl = cfg.cfl();
}

void check_elliptic(const Matrix2& a, int dim) {
  Matrix2 sym = a;
  if (dim == 2) sym(0, 1) = sym(1, 0) = 0.5 * (a(0, 1) + a(1, 0));
  if (!(min_eigenvalue_sym(sym, dim) > 0.0)) throw std::invalid_argument("coefficient matrix is not elliptic");
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "lawson") return Scheme::lawson;
  if (name == "imex") return Scheme::imex;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

std::string_view scheme_name(Scheme s) { return s == Scheme::lawson ? "lawson" : "imex"; }

SolverDivergence::SolverDivergence(std::size_t step, double t)
    : std::runtime_error("solver state became non-finite at step " + std::to_string(step) + " (t = " +
                         std::to_string(t) + "); reduce cfl"),
      step_(step),
      t_(t) {}

std::size_t SolveConfig::noise_substeps() const {
  if (noise == nullptr) throw std::invalid_argument("solve config has no noise path");
  const double ratio = grid.dt / noise->grid().dt;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio) {
    throw std::invalid_argument("solver dt must be an integer multiple of the noise step");
  }
  return k;
}

void SolveConfig::validate() const {
  grid.validate();
  if (noise == nullptr) throw std::invalid_argument("solve config has no noise path");
  const auto& ng = noise->grid();
  if (ng.dim != grid.dim || ng.n != grid.n) throw std::invalid_argument("noise path and solver grid differ");
  if (A.dim() != grid.dim) throw std::invalid_argument("nonlinearity dimension differs from the grid");
  if (cfl() > 0.25 * (1.0 + 1e-12)) throw std::invalid_argument("cfl must not exceed 1/4");
  (void)noise_substeps();
}

void gradient_from_modes(const SpectralGrid& modes, Fft& fft, std::span<const Complex> state, SpaceTimeField& out,
                         std::size_t s) {
  std::vector<Complex> d(state.size());
  for (int axis = 0; axis < modes.grid().dim; ++axis) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = modes.derivative_factor(i, axis) * state[i];
    fft.inverse(d, out.values(s, axis));
  }
}

Trajectory solve_nonlinear(const SolveConfig& cfg) {
  cfg.validate();
  const GridSpec& g = cfg.grid;
  const auto& k = kernels::active();
  SpectralGrid modes(g);
  Fft fft(g);
  const std::size_t m = modes.size();
  const std::size_t nodes = g.nodes();
  const std::size_t substeps = cfg.noise_substeps();
  const Matrix2 ref = cfg.A.reference();

  std::vector<double> factor(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double mu = modes.symbol(i, ref);
    factor[i] = cfg.scheme == Scheme::lawson ? std::exp(-mu * g.dt) : 1.0 / (1.0 + g.dt * mu);
  }
  std::vector<Complex> deriv(m * static_cast<std::size_t>(g.dim));
  for (int axis = 0; axis < g.dim; ++axis) {
    for (std::size_t i = 0; i < m; ++i) deriv[static_cast<std::size_t>(axis) * m + i] = modes.derivative_factor(i, axis);
  }
  std::vector<unsigned char> keep(m, 1);
  if (cfg.dealias) {
    for (std::size_t i = 0; i < m; ++i) keep[i] = modes.dealias_keep(i) ? 1 : 0;
  }

  std::vector<Complex> state(m), dw(m), forcing(m), tmp(m);
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(g.dim), std::vector<double>(nodes));
  std::vector<std::vector<double>> flux(static_cast<std::size_t>(g.dim), std::vector<double>(nodes));
  std::vector<double> scratch(nodes);
  initial_state(cfg, state);

  Recorder rec(g, cfg.window, cfg.record_state);
  fill_provenance(rec.traj, cfg, scheme_name(cfg.scheme));
  rec.record(modes, fft, state, 0, scratch);

  const bool linear = cfg.A.is_linear();
  const std::size_t steps = g.steps();
  const auto stride = static_cast<std::size_t>(g.snap_stride);
  std::uint64_t h = 1469598103934665603ULL;
  std::vector<std::uint64_t> hashes{h};
  for (std::size_t step = 0; step < steps; ++step) {
    cfg.noise->increment_modes(step, substeps, dw);
    h = hash_increment(dw, h);
    if (linear) {
      if (cfg.scheme == Scheme::lawson) {
        k.ou_step(state, factor, dw);
      } else {
        std::fill(forcing.begin(), forcing.end(), Complex{});
        k.imex_step(state, factor, forcing, g.dt, dw);
      }
    } else {
      // Explicit remainder div(A(grad u) - DA(0) grad u), evaluated pointwise.
      for (int axis = 0; axis < g.dim; ++axis) {
        const auto a = static_cast<std::size_t>(axis);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = deriv[a * m + i] * state[i];
        fft.inverse(tmp, grad[a]);
      }
      for (std::size_t x = 0; x < nodes; ++x) {
        Vec2 p{};
        for (std::size_t a = 0; a < grad.size(); ++a) p[a] = grad[a][x];
        const Vec2 r = cfg.A.remainder(p);
        for (std::size_t a = 0; a < flux.size(); ++a) flux[a][x] = r[a];
      }
      std::fill(forcing.begin(), forcing.end(), Complex{});
      for (int axis = 0; axis < g.dim; ++axis) {
        const auto a = static_cast<std::size_t>(axis);
        fft.forward(flux[a], tmp);
        for (std::size_t i = 0; i < m; ++i) forcing[i] += deriv[a * m + i] * tmp[i];
      }
      if (cfg.dealias) {
        for (std::size_t i = 0; i < m; ++i) {
          if (!keep[i]) forcing[i] = Complex{};
        }
      }
      if (cfg.scheme == Scheme::lawson) {
        k.lawson_step(state, factor, forcing, g.dt, dw);
      } else {
        k.imex_step(state, factor, forcing, g.dt, dw);
      }
      check_finite(state, step + 1, g.dt);
    }
    if ((step + 1) % stride == 0) {
      rec.record(modes, fft, state, (step + 1) / stride, scratch);
      hashes.push_back(h);
    }
  }
  check_finite(state, steps, g.dt);
  rec.traj.final_modes = state;
  rec.traj.noise_hash = h;
  rec.traj.snapshot_hashes = std::move(hashes);
  return std::move(rec.traj);
}

Trajectory solve_linear_constant(const SolveConfig& cfg, const Matrix2& a) {
  auto out = solve_anisotropic_batch(cfg, {FrozenCoefficient{{}, a}});
  return std::move(out.front());
}

Trajectory solve_linear_constant(const SolveConfig& cfg, const FrozenCoefficient& a) {
  return solve_linear_constant(cfg, a.a);
}

std::vector<Trajectory> solve_anisotropic_batch(const SolveConfig& cfg, const std::vector<FrozenCoefficient>& coefficients,
                                                const std::vector<RecordWindow>& windows) {
  cfg.validate();
  if (!windows.empty() && windows.size() != coefficients.size()) {
    throw std::invalid_argument("one record window per coefficient expected");
  }
  const GridSpec& g = cfg.grid;
  const auto& k = kernels::active();
  SpectralGrid modes(g);
  Fft fft(g);
  const std::size_t m = modes.size();
  const std::size_t substeps = cfg.noise_substeps();
  const std::size_t nb = coefficients.size();

  std::vector<std::vector<double>> decay;
  std::vector<std::vector<Complex>> states(nb, std::vector<Complex>(m));
  std::vector<Recorder> recs;
  decay.reserve(nb);
  recs.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    check_elliptic(coefficients[b].a, g.dim);
    decay.push_back(decay_factors(modes, coefficients[b].a, g.dt));
    initial_state(cfg, states[b]);
    recs.emplace_back(g, windows.empty() ? cfg.window : windows[b], cfg.record_state);
    fill_provenance(recs[b].traj, cfg, "exact-ou");
  }
  std::vector<double> scratch(g.nodes());
  for (std::size_t b = 0; b < nb; ++b) recs[b].record(modes, fft, states[b], 0, scratch);

  // Coefficients whose windows have closed need no further updates.
  std::size_t horizon = 0;
  for (const auto& r : recs) horizon = std::max(horizon, (r.range.first + r.range.count - 1) * static_cast<std::size_t>(g.snap_stride));
  const std::size_t steps = std::min(g.steps(), horizon);
  const auto stride = static_cast<std::size_t>(g.snap_stride);
  std::vector<Complex> dw(m);
  std::uint64_t h = 1469598103934665603ULL;
  std::vector<std::uint64_t> hashes{h};
  for (std::size_t step = 0; step < steps; ++step) {
    cfg.noise->increment_modes(step, substeps, dw);
    h = hash_increment(dw, h);
    const bool snap = (step + 1) % stride == 0;
    if (snap) hashes.push_back(h);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& r = recs[b].range;
      if ((step + 1) > (r.first + r.count - 1) * stride) continue;
      k.ou_step(states[b], decay[b], dw);
      if (snap) recs[b].record(modes, fft, states[b], (step + 1) / stride, scratch);
    }
  }
  std::vector<Trajectory> out;
  out.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    check_finite(states[b], steps, g.dt);
    recs[b].traj.final_modes = std::move(states[b]);
    recs[b].traj.noise_hash = h;
    recs[b].traj.snapshot_hashes = hashes;
    out.push_back(std::move(recs[b].traj));
  }
  return out;
}

}  // namespace mspde
