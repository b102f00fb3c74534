#include "mspde/harness/corpus.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mspde::harness {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Mode {
  std::array<int, 2> k;
  double a, b, c, e;
};

}  // namespace

std::vector<CorpusEntry> lemma_corpus(int dim, double alpha, int random_fields) {
  std::vector<CorpusEntry> out;
  const double second = dim == 2 ? 1.0 : 0.0;

  out.push_back({"affine",
                 [=](double, const Vec2& x) { return 0.3 + 0.7 * x[0] - 0.4 * second * x[1]; },
                 [=](double, const Vec2&) { return Vec2{0.7, -0.4 * second}; }, true});

  out.push_back({"quadratic",
                 [=](double, const Vec2& x) {
                   return 0.5 * x[0] * x[0] + 0.2 * x[0] + second * (0.25 * x[1] * x[1] + 0.3 * x[0] * x[1]);
                 },
                 [=](double, const Vec2& x) {
                   return Vec2{x[0] + 0.2 + second * 0.3 * x[1], second * (0.5 * x[1] + 0.3 * x[0])};
                 },
                 true});

  const double p = 1.0 + 2.0 * alpha;
  const double eps2 = 0.05 * 0.05;
  out.push_back({"smoothed-cusp",
                 [=](double t, const Vec2& x) {
                   return (1.0 + t) * std::pow(eps2 + x[0] * x[0] + x[1] * x[1], 0.5 * p) / p;
                 },
                 [=](double t, const Vec2& x) {
                   const double w = (1.0 + t) * std::pow(eps2 + x[0] * x[0] + x[1] * x[1], 0.5 * p - 1.0);
                   return Vec2{w * x[0], w * x[1]};
                 },
                 false});

  for (int r = 0; r < random_fields; ++r) {
    std::mt19937_64 rng(0x5EED0000ULL + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> gauss;
    std::vector<Mode> modes;
    const int kmax = dim == 1 ? 4 : 3;
    for (int k1 = 0; k1 <= kmax; ++k1) {
      for (int k2 = dim == 2 ? -kmax : 0; k2 <= (dim == 2 ? kmax : 0); ++k2) {
        if (k1 == 0 && k2 <= 0) continue;
        if (k1 * k1 + k2 * k2 > kmax * kmax) continue;
        const double scale = 1.0 / static_cast<double>(k1 * k1 + k2 * k2);
        const double a = gauss(rng), b = gauss(rng), c = gauss(rng), e = gauss(rng);
        modes.push_back({{k1, k2}, scale * a, scale * b, c, e});
      }
    }
    auto f = [modes](double t, const Vec2& x) {
      double acc = 0.0;
      for (const auto& m : modes) {
        const double ph = kTwoPi * (m.k[0] * x[0] + m.k[1] * x[1]);
        acc += (m.a * std::cos(ph) + m.b * std::sin(ph)) * (m.c + m.e * t);
      }
      return acc;
    };
    auto grad = [modes](double t, const Vec2& x) {
      Vec2 g{};
      for (const auto& m : modes) {
        const double ph = kTwoPi * (m.k[0] * x[0] + m.k[1] * x[1]);
        const double d = (-m.a * std::sin(ph) + m.b * std::cos(ph)) * (m.c + m.e * t) * kTwoPi;
        g[0] += d * m.k[0];
        g[1] += d * m.k[1];
      }
      return g;
    };
    out.push_back({"random-" + std::to_string(r), f, grad, false});
  }

  out.push_back({"t-sine", [](double t, const Vec2& x) { return t * std::sin(kTwoPi * x[0]); },
                 [](double t, const Vec2& x) { return Vec2{kTwoPi * t * std::cos(kTwoPi * x[0]), 0.0}; }, false});
  return out;
}

SampledEntry sample_entry(const CorpusEntry& e, int dim, int n, double r_max) {
  const double dx = 1.0 / n;
  const double step = dx * dx;
  const auto extra = static_cast<std::size_t>(std::llround(r_max * r_max / step)) + 4;
  const double t_base = static_cast<double>(extra) * step;
  const GridSpec g = GridSpec::make(dim, n, t_base, 0.25, 4);
  SampledEntry out;
  out.z = {t_base, {0.5, dim == 2 ? 0.5 : 0.0}};
  out.f = SpaceTimeField(g, 1, 0.0, step, extra + 1);
  out.grad = SpaceTimeField(g, dim, 0.0, step, extra + 1);
  for (std::size_t s = 0; s <= extra; ++s) {
    const double t = out.f.time(static_cast<long>(s));
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      const Vec2 xi = torus_offset(g.node_position(i), out.z.x, dim);
      out.f.at(s, 0, i) = e.f(t, xi);
      const Vec2 gr = e.grad(t, xi);
      for (int c = 0; c < dim; ++c) out.grad.at(s, c, i) = gr[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

}  // namespace mspde::harness
