#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mspde/fft.hpp"
#include "mspde/field.hpp"
#include "mspde/grid.hpp"
#include "mspde/noise.hpp"
#include "mspde/nonlinearity.hpp"

namespace mspde {

/// Time stepping for the nonlinear equation.
///
/// lawson: u^ <- e^{-mu dt} (u^ + dt N^) + dW^
/// imex:   u^ <- (1 + dt mu)^{-1} (u^ + dt N^ + dW^)
/// with mu = 4 pi^2 m.DA(0)m and N = div(A(grad u) - DA(0) grad u).
enum class Scheme { lawson, imex };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme s);

/// Recording window [from, to] on the snapshot lattice; to < 0 means t_end.
struct RecordWindow {
  double from = 0.0;
  double to = -1.0;
};

struct SolveConfig {
  /// Step size and snapshot cadence. grid.dt must be an integer multiple of the
  /// noise path's base step; each solver step then consumes that many increments.
  GridSpec grid;
  const NoisePath* noise = nullptr;
  Nonlinearity A = Nonlinearity::sine(1, 0.0);
  Scheme scheme = Scheme::lawson;
  bool dealias = false;
  RecordWindow window{};
  bool record_state = true;
  /// Spectral initial state (half-spectrum); zero when empty.
  std::vector<Complex> initial_modes;

  double cfl() const { return grid.dt * grid.n * grid.n; }
  std::size_t noise_substeps() const;
  void validate() const;
};

struct Trajectory {
  std::optional<SpaceTimeField> state;
  SpaceTimeField gradient;
  std::vector<Complex> final_modes;
  /// FNV-1a over every consumed increment, in step order.
  std::uint64_t noise_hash = 0;
  /// Running hash after the steps leading to each snapshot index 0, 1, ...
  std::vector<std::uint64_t> snapshot_hashes;
  std::uint64_t seed = 0;
  std::string scheme;
  double cfl = 0.0;
};

/// Thrown when the state stops being finite.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(std::size_t step, double t);
  std::size_t step() const { return step_; }
  double time() const { return t_; }

 private:
  std::size_t step_;
  double t_;
};

Trajectory solve_nonlinear(const SolveConfig& cfg);

/// Exact per-mode exponential update with mu_k = 4 pi^2 m.sym(a)m.
Trajectory solve_linear_constant(const SolveConfig& cfg, const Matrix2& a);
Trajectory solve_linear_constant(const SolveConfig& cfg, const FrozenCoefficient& a);

/// One sweep over the noise updating all coefficients together. `windows`
/// (optional, one per coefficient) overrides cfg.window.
std::vector<Trajectory> solve_anisotropic_batch(const SolveConfig& cfg, const std::vector<FrozenCoefficient>& coefficients,
                                                const std::vector<RecordWindow>& windows = {});

/// Spectral gradient of a half-spectrum state, written into snapshot s.
void gradient_from_modes(const SpectralGrid& modes, Fft& fft, std::span<const Complex> state, SpaceTimeField& out,
                         std::size_t s);

}  // namespace mspde
