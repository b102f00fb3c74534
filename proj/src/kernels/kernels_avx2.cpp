#include <algorithm>
#include <cmath>

#include "mspde/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define MSPDE_HAVE_X86 1
#endif

namespace mspde::kernels::detail {

#ifdef MSPDE_HAVE_X86

namespace {

// Two complex numbers per register; the per-mode real factor is duplicated
// into [d0, d0, d1, d1]. Only mul/add/sub/max are used (no FMA) so the
// rounding matches the scalar reference exactly.

__attribute__((target("avx2"))) inline __m256d dup_pairs(const double* p) {
  const __m128d d = _mm_loadu_pd(p);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(d), 0x50);
}

__attribute__((target("avx2"))) void ou_step(std::span<Complex> state, std::span<const double> decay,
                                             std::span<const Complex> noise) {
  double* s = reinterpret_cast<double*>(state.data());
  const double* w = reinterpret_cast<const double*>(noise.data());
  const std::size_t n = state.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = dup_pairs(decay.data() + i);
    __m256d v = _mm256_loadu_pd(s + 2 * i);
    v = _mm256_add_pd(_mm256_mul_pd(d, v), _mm256_loadu_pd(w + 2 * i));
    _mm256_storeu_pd(s + 2 * i, v);
  }
  for (; i < n; ++i) {
    const double d = decay[i];
    state[i] = Complex(d * state[i].real() + noise[i].real(), d * state[i].imag() + noise[i].imag());
  }
}

__attribute__((target("avx2"))) void lawson_step(std::span<Complex> state, std::span<const double> decay,
                                                 std::span<const Complex> forcing, double dt,
                                                 std::span<const Complex> noise) {
  double* s = reinterpret_cast<double*>(state.data());
  const double* f = reinterpret_cast<const double*>(forcing.data());
  const double* w = reinterpret_cast<const double*>(noise.data());
  const __m256d h = _mm256_set1_pd(dt);
  const std::size_t n = state.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = dup_pairs(decay.data() + i);
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(s + 2 * i), _mm256_mul_pd(h, _mm256_loadu_pd(f + 2 * i)));
    v = _mm256_add_pd(_mm256_mul_pd(d, v), _mm256_loadu_pd(w + 2 * i));
    _mm256_storeu_pd(s + 2 * i, v);
  }
  for (; i < n; ++i) {
    const double d = decay[i];
    const double re = state[i].real() + dt * forcing[i].real();
    const double im = state[i].imag() + dt * forcing[i].imag();
    state[i] = Complex(d * re + noise[i].real(), d * im + noise[i].imag());
  }
}

__attribute__((target("avx2"))) void imex_step(std::span<Complex> state, std::span<const double> inv,
                                               std::span<const Complex> forcing, double dt,
                                               std::span<const Complex> noise) {
  double* s = reinterpret_cast<double*>(state.data());
  const double* f = reinterpret_cast<const double*>(forcing.data());
  const double* w = reinterpret_cast<const double*>(noise.data());
  const __m256d h = _mm256_set1_pd(dt);
  const std::size_t n = state.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = dup_pairs(inv.data() + i);
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(s + 2 * i), _mm256_mul_pd(h, _mm256_loadu_pd(f + 2 * i)));
    v = _mm256_add_pd(v, _mm256_loadu_pd(w + 2 * i));
    _mm256_storeu_pd(s + 2 * i, _mm256_mul_pd(d, v));
  }
  for (; i < n; ++i) {
    const double re = state[i].real() + dt * forcing[i].real() + noise[i].real();
    const double im = state[i].imag() + dt * forcing[i].imag() + noise[i].imag();
    state[i] = Complex(inv[i] * re, inv[i] * im);
  }
}

__attribute__((target("avx2"))) void scale_modes(std::span<Complex> out, std::span<const double> amp, double factor,
                                                 std::span<const Complex> g) {
  double* o = reinterpret_cast<double*>(out.data());
  const double* x = reinterpret_cast<const double*>(g.data());
  const __m256d fac = _mm256_set1_pd(factor);
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_mul_pd(dup_pairs(amp.data() + i), fac);
    _mm256_storeu_pd(o + 2 * i, _mm256_mul_pd(a, _mm256_loadu_pd(x + 2 * i)));
  }
  for (; i < n; ++i) {
    const double a = amp[i] * factor;
    out[i] = Complex(a * g[i].real(), a * g[i].imag());
  }
}

__attribute__((target("avx2"))) void accumulate(std::span<Complex> acc, std::span<const Complex> x) {
  double* a = reinterpret_cast<double*>(acc.data());
  const double* b = reinterpret_cast<const double*>(x.data());
  const std::size_t n = 2 * acc.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) a[i] += b[i];
}

__attribute__((target("avx2"))) double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) best = std::max(best, std::abs(a[i] - b[i]));
  return best;
}

}  // namespace

const Table& avx2_table() {
  static const Table t{Isa::avx2, ou_step, lawson_step, imex_step, scale_modes, accumulate, max_abs_diff};
  return t;
}

#else

const Table& avx2_table() { return scalar_table(); }

#endif

}  // namespace mspde::kernels::detail
