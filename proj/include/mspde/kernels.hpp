#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace mspde::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

/// Inner loops of the time steppers and estimators.
///
/// Every variant performs the same IEEE operations in the same order (no
/// fused multiply-add), so the SIMD paths are bitwise equal to the scalar
/// reference and results do not depend on the host CPU.
struct Table {
  Isa isa;
  /// state = decay * state + noise
  void (*ou_step)(std::span<Complex> state, std::span<const double> decay, std::span<const Complex> noise);
  /// state = decay * (state + dt * forcing) + noise
  void (*lawson_step)(std::span<Complex> state, std::span<const double> decay, std::span<const Complex> forcing,
                      double dt, std::span<const Complex> noise);
  /// state = inv * (state + dt * forcing + noise)
  void (*imex_step)(std::span<Complex> state, std::span<const double> inv, std::span<const Complex> forcing,
                    double dt, std::span<const Complex> noise);
  /// out = (amp * factor) * g
  void (*scale_modes)(std::span<Complex> out, std::span<const double> amp, double factor,
                      std::span<const Complex> g);
  /// acc += x
  void (*accumulate)(std::span<Complex> acc, std::span<const Complex> x);
  /// max_i |a_i - b_i|
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
};

const Table& table(Isa isa);
bool supported(Isa isa);
/// Best supported ISA unless MSPDE_SIMD=scalar is set in the environment.
const Table& active();
std::string_view name(Isa isa);

namespace detail {
const Table& scalar_table();
const Table& avx2_table();
}  // namespace detail

}  // namespace mspde::kernels
