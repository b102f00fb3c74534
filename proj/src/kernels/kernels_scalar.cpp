#include <algorithm>
#include <cmath>

#include "mspde/kernels.hpp"

namespace mspde::kernels::detail {

namespace {

void ou_step(std::span<Complex> state, std::span<const double> decay, std::span<const Complex> noise) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double d = decay[i];
    state[i] = Complex(d * state[i].real() + noise[i].real(), d * state[i].imag() + noise[i].imag());
  }
}

void lawson_step(std::span<Complex> state, std::span<const double> decay, std::span<const Complex> forcing, double dt,
                 std::span<const Complex> noise) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double d = decay[i];
    const double re = state[i].real() + dt * forcing[i].real();
    const double im = state[i].imag() + dt * forcing[i].imag();
    state[i] = Complex(d * re + noise[i].real(), d * im + noise[i].imag());
  }
}

void imex_step(std::span<Complex> state, std::span<const double> inv, std::span<const Complex> forcing, double dt,
               std::span<const Complex> noise) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double re = state[i].real() + dt * forcing[i].real() + noise[i].real();
    const double im = state[i].imag() + dt * forcing[i].imag() + noise[i].imag();
    state[i] = Complex(inv[i] * re, inv[i] * im);
  }
}

void scale_modes(std::span<Complex> out, std::span<const double> amp, double factor, std::span<const Complex> g) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = amp[i] * factor;
    out[i] = Complex(a * g[i].real(), a * g[i].imag());
  }
}

void accumulate(std::span<Complex> acc, std::span<const Complex> x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = Complex(acc[i].real() + x[i].real(), acc[i].imag() + x[i].imag());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Isa::scalar, ou_step, lawson_step, imex_step, scale_modes, accumulate, max_abs_diff};
  return t;
}

}  // namespace mspde::kernels::detail
