#include "mspde/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mspde/kernels.hpp"

namespace mspde {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(q / (n - 1.0) / n);
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(alpha > 0.5) || !(alpha < 1.0)) throw std::invalid_argument("noise alpha must lie in (1/2, 1)");
  if (dim != 1 && dim != 2) throw std::invalid_argument("noise dimension must be 1 or 2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (!(t_support > 0.0)) throw std::invalid_argument("noise time support must be positive");
}

double spectral_density(const NoiseSpec& spec, double k_squared) {
  return spec.sigma * spec.sigma * std::pow(1.0 + k_squared, -0.5 * spec.s());
}

SpectrumTable build_spectrum(const NoiseSpec& spec, const GridSpec& grid) {
  spec.validate();
  if (spec.dim != grid.dim) throw std::invalid_argument("noise and grid dimensions differ");
  SpectralGrid modes(grid);
  SpectrumTable t;
  t.modes.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double k2 = modes.k_squared(i);
    t.modes.push_back(modes.mode(i));
    t.k_squared.push_back(k2);
    t.amplitude.push_back(spec.sigma * std::pow(1.0 + k2, -0.25 * spec.s()));
  }
  return t;
}

double analytic_covariance(const NoiseSpec& spec, const GridSpec& grid, int lag_steps) {
  // Sum over the full (not half) spectrum; each resolved mode counted once.
  const int n = grid.n;
  const double x = static_cast<double>(lag_steps) / n;
  double acc = 0.0;
  const int lo = -n / 2 + 1;
  const int hi = n / 2;
  const double c = 4.0 * std::numbers::pi * std::numbers::pi;
  for (int m0 = lo; m0 <= hi; ++m0) {
    const double phase = std::cos(2.0 * std::numbers::pi * m0 * x);
    if (grid.dim == 1) {
      acc += spectral_density(spec, c * m0 * m0) * phase;
    } else {
      for (int m1 = lo; m1 <= hi; ++m1) {
        acc += spectral_density(spec, c * (static_cast<double>(m0) * m0 + static_cast<double>(m1) * m1)) * phase;
      }
    }
  }
  return acc;
}

NoisePath::NoisePath(NoiseSpec spec, GridSpec grid)
    : spec_(spec), grid_(grid), spectrum_(build_spectrum(spec, grid)) {
  grid_.validate();
  SpectralGrid modes(grid_);
  conjugate_of_.assign(modes.size(), npos);
  real_mode_.assign(modes.size(), 0);
  const int n = grid_.n;
  const int half = n / 2;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    real_mode_[i] = modes.self_conjugate(i) ? 1 : 0;
    if (grid_.dim == 2) {
      const auto& m = modes.mode(i);
      // Columns m1 = 0 and m1 = n/2 hold both m0 and -m0; the negative row mirrors the positive one.
      if ((m[1] == 0 || m[1] == half) && m[0] < 0 && m[0] != -half) {
        const int row = -m[0];
        conjugate_of_[i] = static_cast<std::size_t>(row) * static_cast<std::size_t>(half + 1) + static_cast<std::size_t>(m[1]);
      }
    }
  }
}

std::uint64_t NoisePath::substream_seed(std::size_t step) const {
  return splitmix64(spec_.master_seed ^ splitmix64(static_cast<std::uint64_t>(step) + 0x632BE59BD9B4E019ULL));
}

bool NoisePath::active(std::size_t step) const {
  return static_cast<double>(step + 1) * grid_.dt <= spec_.t_support * (1.0 + 1e-12);
}

void NoisePath::increment_modes(std::size_t step, std::span<Complex> out) const {
  const std::size_t m = spectral_size();
  if (out.size() != m) throw std::invalid_argument("increment buffer has the wrong size");
  if (!active(step) || spec_.sigma == 0.0) {
    std::fill(out.begin(), out.end(), Complex{});
    return;
  }
  std::mt19937_64 engine(substream_seed(step));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  std::vector<Complex> g(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (conjugate_of_[i] != npos) continue;
    if (real_mode_[i]) {
      g[i] = Complex(normal(engine), 0.0);
    } else {
      const double re = normal(engine);
      const double im = normal(engine);
      g[i] = Complex(re * inv_sqrt2, im * inv_sqrt2);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (conjugate_of_[i] != npos) g[i] = std::conj(g[conjugate_of_[i]]);
  }
  kernels::active().scale_modes(out, spectrum_.amplitude, std::sqrt(grid_.dt), g);
}

void NoisePath::increment_modes(std::size_t coarse_step, std::size_t substeps, std::span<Complex> out) const {
  if (substeps == 1) {
    increment_modes(coarse_step, out);
    return;
  }
  std::vector<Complex> tmp(out.size());
  std::fill(out.begin(), out.end(), Complex{});
  for (std::size_t j = 0; j < substeps; ++j) {
    increment_modes(coarse_step * substeps + j, tmp);
    kernels::active().accumulate(out, tmp);
  }
}

SpaceTimeField NoisePath::sample_increment(std::size_t step) const {
  SpaceTimeField out(grid_, 1, static_cast<double>(step) * grid_.dt, grid_.dt, 1);
  std::vector<Complex> hat(spectral_size());
  increment_modes(step, hat);
  Fft fft(grid_);
  fft.inverse(hat, out.values(0, 0));
  return out;
}

namespace {

// Complex inverse transform of the Hermitian extension; the imaginary part
// measures how well the half-spectrum encodes a real field.
double imaginary_residue(const NoisePath& path, std::span<const Complex> hat) {
  const auto& grid = path.grid();
  const int n = grid.n;
  const int half = n / 2 + 1;
  const std::size_t total = grid.nodes();
  fftw_complex* buf = fftw_alloc_complex(total);
  std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * total, 0.0);
  auto put = [&](std::size_t idx, Complex v) {
    buf[idx][0] = v.real();
    buf[idx][1] = v.imag();
  };
  if (grid.dim == 1) {
    for (int j = 0; j < half; ++j) {
      put(static_cast<std::size_t>(j), hat[static_cast<std::size_t>(j)]);
      if (j != 0 && j != n / 2) put(static_cast<std::size_t>(n - j), std::conj(hat[static_cast<std::size_t>(j)]));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < half; ++j) {
        const Complex v = hat[static_cast<std::size_t>(i) * static_cast<std::size_t>(half) + static_cast<std::size_t>(j)];
        put(static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j), v);
        if (j != 0 && j != n / 2) {
          const int ci = (n - i) % n;
          put(static_cast<std::size_t>(ci) * static_cast<std::size_t>(n) + static_cast<std::size_t>(n - j), std::conj(v));
        }
      }
    }
  }
  fftw_plan plan = grid.dim == 1 ? fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)
                                 : fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  double worst = 0.0;
  for (std::size_t i = 0; i < total; ++i) worst = std::max(worst, std::abs(buf[i][1]));
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return worst;
}

}  // namespace

CovarianceReport covariance_diagnostics(const NoisePath& path, std::size_t n_samples, int max_lag) {
  if (n_samples < 2) throw std::invalid_argument("covariance diagnostics need at least two samples");
  const auto& grid = path.grid();
  const double dt = grid.dt;
  const std::size_t nodes = grid.nodes();
  Fft fft(grid);
  std::vector<Complex> hat(path.spectral_size());
  std::vector<double> prev(nodes), cur(nodes);

  CovarianceReport rep;
  rep.samples = n_samples;
  for (int l = 0; l <= max_lag; ++l) rep.lags.push_back(l);
  const std::size_t nl = rep.lags.size();
  std::vector<std::vector<double>> per_sample(nl, std::vector<double>(n_samples));
  std::vector<std::vector<double>> per_sample_neg(nl, std::vector<double>(n_samples));
  std::vector<double> means(n_samples);
  std::vector<double> anchor_sum(nodes, 0.0), anchor_sq(nodes, 0.0);
  std::vector<double> pair_stat;
  double cross = 0.0, norm_a = 0.0, norm_b = 0.0;

  for (std::size_t s = 0; s < n_samples; ++s) {
    path.increment_modes(s, hat);
    if (s == 0) rep.imaginary_residue = imaginary_residue(path, hat);
    fft.inverse(hat, cur);
    double m = 0.0;
    for (double v : cur) m += v;
    means[s] = m / static_cast<double>(nodes) / std::sqrt(dt);
    for (std::size_t li = 0; li < nl; ++li) {
      const LatticeShift fwd{{rep.lags[li], 0}};
      const LatticeShift back{{-rep.lags[li], 0}};
      double acc = 0.0, acc_neg = 0.0;
      for (std::size_t x = 0; x < nodes; ++x) {
        acc += cur[x] * cur[shifted_node(grid, x, fwd)];
        acc_neg += cur[x] * cur[shifted_node(grid, x, back)];
      }
      per_sample[li][s] = acc / static_cast<double>(nodes) / dt;
      per_sample_neg[li][s] = acc_neg / static_cast<double>(nodes) / dt;
    }
    for (std::size_t x = 0; x < nodes; ++x) {
      const double c = cur[x] * cur[x] / dt;
      anchor_sum[x] += c;
      anchor_sq[x] += c * c;
    }
    if (s % 2 == 1) {
      double c = 0.0;
      for (std::size_t x = 0; x < nodes; ++x) {
        c += prev[x] * cur[x];
        norm_a += prev[x] * prev[x];
        norm_b += cur[x] * cur[x];
      }
      cross += c;
      pair_stat.push_back(c);
    }
    std::swap(prev, cur);
  }

  for (std::size_t li = 0; li < nl; ++li) {
    const double a = analytic_covariance(path.spec(), grid, rep.lags[li]);
    const double e = mean_of(per_sample[li]);
    rep.analytic.push_back(a);
    rep.empirical.push_back(e);
    rep.empirical_negative_lag.push_back(mean_of(per_sample_neg[li]));
    rep.std_error.push_back(std_error_of(per_sample[li]));
    rep.relative_error.push_back(a != 0.0 ? std::abs(e - a) / std::abs(a) : std::abs(e));
  }

  const double ns = static_cast<double>(n_samples);
  double anchor_mean = 0.0;
  for (double v : anchor_sum) anchor_mean += v / ns;
  anchor_mean /= static_cast<double>(nodes);
  double spread = 0.0, se = 0.0;
  for (std::size_t x = 0; x < nodes; ++x) {
    const double m = anchor_sum[x] / ns;
    const double var = std::max(0.0, anchor_sq[x] / ns - m * m);
    spread = std::max(spread, std::abs(m - anchor_mean));
    se += std::sqrt(var / ns);
  }
  rep.stationarity_spread = spread;
  rep.stationarity_std_error = se / static_cast<double>(nodes);

  rep.step_correlation = (norm_a > 0.0 && norm_b > 0.0) ? cross / std::sqrt(norm_a * norm_b) : 0.0;
  rep.step_correlation_std_error = pair_stat.size() > 1 ? 1.0 / std::sqrt(static_cast<double>(pair_stat.size())) : 1.0;
  rep.mean = mean_of(means);
  rep.mean_std_error = std_error_of(means);
  return rep;
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(std::span<const Complex> values, std::uint64_t h) {
  return fnv1a(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(values.data()),
                                              values.size() * sizeof(Complex)),
               h);
}

}  // namespace mspde
