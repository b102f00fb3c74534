#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mspde/fft.hpp"
#include "mspde/field.hpp"
#include "mspde/grid.hpp"

namespace mspde {

/// Stationary, 1-periodic, white-in-time Gaussian forcing with spatial
/// spectrum K^(k) = sigma^2 (1 + |k|^2)^{-s/2}, s = 2 alpha + d.
struct NoiseSpec {
  double alpha = 0.75;
  int dim = 1;
  double sigma = 1.0;
  std::uint64_t master_seed = 0;
  double t_support = 1.0;

  double s() const { return 2.0 * alpha + dim; }
  void validate() const;
};

/// K^(k) for a wavevector k in (2 pi Z)^d given through |k|^2.
double spectral_density(const NoiseSpec& spec, double k_squared);

/// Square-root amplitudes a(k) = sigma (1 + |k|^2)^{-s/4} on the half-spectrum.
struct SpectrumTable {
  std::vector<std::array<int, 2>> modes;
  std::vector<double> k_squared;
  std::vector<double> amplitude;
};
SpectrumTable build_spectrum(const NoiseSpec& spec, const GridSpec& grid);

/// Analytic spatial covariance K(x) = sum_k K^(k) e^{ik.x} over resolved modes,
/// evaluated at a lattice lag along axis 1.
double analytic_covariance(const NoiseSpec& spec, const GridSpec& grid, int lag_steps);

/// The family of per-step increments dW_step, regenerated on demand.
///
/// Each step draws from its own engine seeded by a hash of (master_seed, step),
/// so any increment can be recomputed in any order with identical bits.
class NoisePath {
 public:
  NoisePath(NoiseSpec spec, GridSpec grid);

  const NoiseSpec& spec() const { return spec_; }
  const GridSpec& grid() const { return grid_; }
  const SpectrumTable& spectrum() const { return spectrum_; }
  std::size_t spectral_size() const { return spectrum_.amplitude.size(); }

  std::uint64_t substream_seed(std::size_t step) const;
  bool active(std::size_t step) const;

  /// Fourier coefficients of dW for one base step (mode variance dt K^(k)).
  void increment_modes(std::size_t step, std::span<Complex> out) const;
  /// Sum of `substeps` consecutive base increments starting at coarse_step*substeps.
  void increment_modes(std::size_t coarse_step, std::size_t substeps, std::span<Complex> out) const;
  /// Physical-space snapshot of one base increment.
  SpaceTimeField sample_increment(std::size_t step) const;

 private:
  NoiseSpec spec_;
  GridSpec grid_;
  SpectrumTable spectrum_;
  std::vector<std::size_t> conjugate_of_;  // partner index inside the half-spectrum, or npos
  std::vector<unsigned char> real_mode_;
};

struct CovarianceReport {
  std::size_t samples = 0;
  std::vector<int> lags;
  std::vector<double> analytic;
  std::vector<double> empirical;
  std::vector<double> empirical_negative_lag;
  std::vector<double> std_error;
  std::vector<double> relative_error;
  /// Spread of lag-0 covariance across anchor nodes, and its MC scale.
  double stationarity_spread = 0.0;
  double stationarity_std_error = 0.0;
  /// Correlation of increments of disjoint steps at the same node.
  double step_correlation = 0.0;
  double step_correlation_std_error = 0.0;
  double mean = 0.0;
  double mean_std_error = 0.0;
  /// Max imaginary residue of a complex inverse transform of one increment.
  double imaginary_residue = 0.0;
};

/// Monte Carlo check of the covariance structure using n_samples distinct steps.
CovarianceReport covariance_diagnostics(const NoisePath& path, std::size_t n_samples, int max_lag = 4);

/// FNV-1a hash of raw bytes, used to compare regenerated increments.
std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t fnv1a(std::span<const Complex> values, std::uint64_t h = 1469598103934665603ULL);

}  // namespace mspde
