#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mspde/grid.hpp"

namespace mspde {

using Complex = std::complex<double>;

/// Real <-> half-spectrum transforms on the periodic grid.
///
/// Coefficients are normalized so that f(x) = sum_k c_k exp(2 pi i m.x);
/// in 2-d the half-spectrum is stored row-major as n x (n/2 + 1) with the
/// last axis halved. Plans use FFTW_ESTIMATE so results are reproducible.
class Fft {
 public:
  explicit Fft(const GridSpec& grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  std::size_t real_size() const { return real_size_; }
  std::size_t spectral_size() const { return spectral_size_; }

  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::size_t real_size_ = 0;
  std::size_t spectral_size_ = 0;
};

/// Integer wavevectors m (k = 2 pi m) of the half-spectrum layout.
class SpectralGrid {
 public:
  explicit SpectralGrid(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return modes_.size(); }
  const std::array<int, 2>& mode(std::size_t i) const { return modes_[i]; }
  /// |k|^2 with k = 2 pi m.
  double k_squared(std::size_t i) const;
  /// 4 pi^2 m . sym(a) m.
  double symbol(std::size_t i, const Matrix2& a) const;
  /// i k_axis with the Nyquist entry along that axis set to zero.
  Complex derivative_factor(std::size_t i, int axis) const;
  /// True when m is its own conjugate partner on the grid.
  bool self_conjugate(std::size_t i) const;
  /// 2/3-rule mask for dealiasing.
  bool dealias_keep(std::size_t i) const;

 private:
  GridSpec grid_;
  std::vector<std::array<int, 2>> modes_;
};

}  // namespace mspde
