#include "mspde/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mspde {

namespace {
// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  double* real = nullptr;
  fftw_complex* spec = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

Fft::Fft(const GridSpec& grid) : plans_(std::make_unique<Plans>()) {
  const int n = grid.n;
  real_size_ = grid.nodes();
  spectral_size_ = grid.dim == 1 ? static_cast<std::size_t>(n / 2 + 1)
                                 : static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(real_size_);
  plans_->spec = fftw_alloc_complex(spectral_size_);
  if (grid.dim == 1) {
    plans_->r2c = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r_1d(n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  } else {
    plans_->r2c = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r_2d(n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  }
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const double> in, std::span<Complex> out) {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->r2c);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < spectral_size_; ++i) {
    out[i] = Complex(plans_->spec[i][0] * scale, plans_->spec[i][1] * scale);
  }
}

void Fft::inverse(std::span<const Complex> in, std::span<double> out) {
  for (std::size_t i = 0; i < spectral_size_; ++i) {
    plans_->spec[i][0] = in[i].real();
    plans_->spec[i][1] = in[i].imag();
  }
  fftw_execute(plans_->c2r);
  std::copy(plans_->real, plans_->real + real_size_, out.begin());
}

SpectralGrid::SpectralGrid(const GridSpec& grid) : grid_(grid) {
  const int n = grid.n;
  const int half = n / 2 + 1;
  if (grid.dim == 1) {
    for (int j = 0; j < half; ++j) modes_.push_back({j, 0});
  } else {
    for (int i = 0; i < n; ++i) {
      const int m0 = i <= n / 2 ? i : i - n;
      for (int j = 0; j < half; ++j) modes_.push_back({m0, j});
    }
  }
}

double SpectralGrid::k_squared(std::size_t i) const {
  const auto& m = modes_[i];
  const double c = 4.0 * std::numbers::pi * std::numbers::pi;
  return c * (static_cast<double>(m[0]) * m[0] + static_cast<double>(m[1]) * m[1]);
}

double SpectralGrid::symbol(std::size_t i, const Matrix2& a) const {
  const auto& m = modes_[i];
  const double c = 4.0 * std::numbers::pi * std::numbers::pi;
  const double m0 = m[0];
  if (grid_.dim == 1) return c * a(0, 0) * m0 * m0;
  const double m1 = m[1];
  const double off = 0.5 * (a(0, 1) + a(1, 0));
  return c * (a(0, 0) * m0 * m0 + 2.0 * off * m0 * m1 + a(1, 1) * m1 * m1);
}

Complex SpectralGrid::derivative_factor(std::size_t i, int axis) const {
  const int m = modes_[i][static_cast<std::size_t>(axis)];
  if (std::abs(m) == grid_.n / 2) return {0.0, 0.0};
  return {0.0, 2.0 * std::numbers::pi * m};
}

bool SpectralGrid::self_conjugate(std::size_t i) const {
  const auto& m = modes_[i];
  const int h = grid_.n / 2;
  const bool a0 = m[0] == 0 || std::abs(m[0]) == h;
  if (grid_.dim == 1) return a0;
  const bool a1 = m[1] == 0 || m[1] == h;
  return a0 && a1;
}

bool SpectralGrid::dealias_keep(std::size_t i) const {
  const auto& m = modes_[i];
  const int cut = grid_.n / 3;
  return std::abs(m[0]) <= cut && std::abs(m[1]) <= cut;
}

}  // namespace mspde
