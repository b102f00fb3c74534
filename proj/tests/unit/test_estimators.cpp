#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mspde/harness/corpus.hpp"
#include "mspde/regularity/estimators.hpp"

using namespace mspde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Scalar field and gradient of f = sin(2 pi x) cos(4 pi x) (1 + t) on n nodes,
/// snapshots every dx^2 up to t = 1/16 + 4 dx^2.
struct Sample {
  SpaceTimeField f, grad;
  SpaceTimePoint z;
};

Sample smooth_sample(int n) {
  harness::CorpusEntry e{"s",
                         [](double t, const Vec2& x) { return std::sin(kTwoPi * x[0]) * std::cos(2 * kTwoPi * x[0]) * (1 + t); },
                         [](double t, const Vec2& x) {
                           return Vec2{kTwoPi * (1 + t) *
                                           (std::cos(kTwoPi * x[0]) * std::cos(2 * kTwoPi * x[0]) -
                                            2 * std::sin(kTwoPi * x[0]) * std::sin(2 * kTwoPi * x[0])),
                                       0.0};
                         },
                         false};
  auto s = harness::sample_entry(e, 1, n, 0.25);
  return {s.f, s.grad, s.z};
}

/// Minimax line fit in 1-d by enumerating triples (the Haar condition holds).
double line_fit_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      for (std::size_t k = j + 1; k < x.size(); ++k) {
        // Sort the triple by abscissa; the equioscillating error is the
        // deviation of the middle point from the chord, halved.
        std::array<std::pair<double, double>, 3> p{{{x[i], y[i]}, {x[j], y[j]}, {x[k], y[k]}}};
        std::sort(p.begin(), p.end());
        const double span = p[2].first - p[0].first;
        if (span <= 0.0) continue;
        const double chord = p[0].second + (p[2].second - p[0].second) * (p[1].first - p[0].first) / span;
        best = std::max(best, 0.5 * std::abs(p[1].second - chord));
      }
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("locate requires lattice points") {
    const auto s = smooth_sample(32);
    const auto p = locate(s.f, s.z);
    CHECK(p.snapshot == static_cast<long>(s.f.snapshots()) - 1);
    CHECK(p.node == 16);
    CHECK_THROWS(locate(s.f, {s.z.t, {0.51, 0.0}}));
    CHECK_THROWS(locate(s.f, {s.z.t * 0.99999, s.z.x}));
  }

  TEST_CASE("shifts within a radius") {
    const auto g = GridSpec::make(2, 32, 0.125, 0.25, 1);
    std::size_t expect = 0;
    for (int i = -8; i <= 8; ++i) {
      for (int j = -8; j <= 8; ++j) expect += (i || j) && i * i + j * j <= 64;
    }
    CHECK(shifts_within(g, 0.25, 100000, 1).size() == expect);
    const auto few = shifts_within(g, 0.25, 20, 1);
    CHECK(few.size() == 20);
    auto has = [&](int i, int j) {
      return std::any_of(few.begin(), few.end(), [&](const LatticeShift& s) { return s.steps == std::array<int, 2>{i, j}; });
    };
    CHECK(has(8, 0));
    CHECK(has(0, -8));
    CHECK(has(-5, 5));
  }

  TEST_CASE("increment constant matches a brute-force evaluation") {
    const auto s = smooth_sample(32);
    RegularityParams p;
    p.shift_budget = 1000;
    const GridSpec& g = s.f.grid();
    const auto base = locate(s.grad, s.z);
    double oracle = 0.0;
    for (double l : p.radii(g)) {
      const int reach = static_cast<int>(std::floor(l * g.n + 1e-9));
      for (int k = -reach; k <= reach; ++k) {
        if (k == 0) continue;
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < g.nodes(); ++i) {
          if (torus_distance(g.node_position(i), s.z.x, 1) >= l) continue;
          const double v = s.grad.at(static_cast<std::size_t>(base.snapshot), 0, g.node_index(static_cast<int>(i) + k)) -
                           s.grad.at(static_cast<std::size_t>(base.snapshot), 0, i);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        oracle = std::max(oracle, 0.5 * (hi - lo) / std::pow(l, 1.5));
      }
    }
    CHECK(increment_constant_N(s.grad, s.z, p) == doctest::Approx(oracle).epsilon(1e-12));
  }

  TEST_CASE("affine constant matches the triple oracle") {
    const auto s = smooth_sample(32);
    RegularityParams p;
    const GridSpec& g = s.f.grid();
    const auto base = locate(s.grad, s.z);
    double oracle = 0.0;
    for (double r : p.radii(g)) {
      std::vector<double> x, y;
      for (const auto& b : ball_nodes(g, s.z.x, r)) {
        x.push_back(b.offset[0]);
        y.push_back(s.grad.at(static_cast<std::size_t>(base.snapshot), 0, b.node));
      }
      oracle = std::max(oracle, line_fit_oracle(x, y) / std::pow(r, 1.5));
    }
    CHECK(affine_constant(s.grad, s.z, p) == doctest::Approx(oracle).epsilon(1e-9));
  }

  TEST_CASE("affine and quadratic fields give zero left-hand sides") {
    const auto corpus = harness::lemma_corpus(1, 0.75, 0);
    RegularityParams p;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto s = harness::sample_entry(corpus[k], 1, 32, 0.25);
      CHECK(affine_constant(s.grad, s.z, p) < 1e-12);
      CHECK(affine_constant(s.grad, s.z, p, Extent::space_time) < 1e-12);
      CHECK(increment_constant_N(s.grad, s.z, p) < 1e-12);
      const auto pr = increment_fit_pair(s.f, s.grad, s.z, LatticeShift{{3, 0}}, 0.125);
      CHECK(pr.lhs < 1e-12);
    }
  }

  TEST_CASE("time terms vanish for time-independent fields") {
    const auto corpus = harness::lemma_corpus(1, 0.75, 1);
    const auto s = harness::sample_entry(corpus[1], 1, 32, 0.25);
    CHECK(spacetime_fit_time_terms(s.f, s.z, RegularityParams{}) < 1e-10);
    const auto moving = smooth_sample(32);
    CHECK(spacetime_fit_time_terms(moving.f, moving.z, RegularityParams{}) > 0.0);
  }

  TEST_CASE("space-time estimates dominate the spatial ones") {
    const auto s = smooth_sample(64);
    RegularityParams p;
    CHECK(affine_constant(s.grad, s.z, p, Extent::space_time) >= affine_constant(s.grad, s.z, p));
    CHECK(increment_constant_N(s.grad, s.z, p, Extent::space_time) >= increment_constant_N(s.grad, s.z, p));
  }

  TEST_CASE("increment_fit pair is bounded on a smooth field") {
    const auto s = smooth_sample(64);
    for (int k : {1, 4, 8}) {
      const auto pr = increment_fit_pair(s.f, s.grad, s.z, LatticeShift{{k, 0}}, 0.125);
      CHECK(pr.lhs > 0.0);
      CHECK(pr.lhs <= 10.0 * pr.rhs);
    }
    CHECK_THROWS(increment_fit_pair(s.f, s.grad, s.z, LatticeShift{{9, 0}}, 0.125));
  }

  TEST_CASE("g vanishes for linear fluxes and for y = 0") {
    const auto s = smooth_sample(32);
    const auto lin = Nonlinearity::linear(1, Matrix2{{0.7, 0, 0, 0}});
    const auto g1 = compute_g(lin, s.grad, LatticeShift{{3, 0}}, s.z);
    for (double v : g1.raw()) CHECK(v == 0.0);
    const auto g0 = compute_g(Nonlinearity::sine(1, 0.5), s.grad, LatticeShift{}, s.z);
    for (double v : g0.raw()) CHECK(v == 0.0);
    const auto g2 = compute_g(Nonlinearity::sine(1, 0.5), s.grad, LatticeShift{{3, 0}}, s.z);
    double m = 0.0;
    for (double v : g2.raw()) m = std::max(m, std::abs(v));
    CHECK(m > 0.0);
  }
}
