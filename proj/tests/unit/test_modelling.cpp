#include <doctest.h>

#include <cmath>
#include <functional>

#include "mspde/regularity/modelling.hpp"

using namespace mspde;

namespace {

/// One-component gradient field on n nodes, snapshots every 1/1024 on [0, 80/1024].
SpaceTimeField gradient_field(int n, const std::function<double(double, double)>& g) {
  const auto grid = GridSpec::make(1, n, 0.125, 0.25, 4);
  SpaceTimeField f(grid, 1, 0.0, 1.0 / 1024.0, 81);
  for (std::size_t s = 0; s < f.snapshots(); ++s) {
    for (std::size_t i = 0; i < f.nodes(); ++i) {
      f.at(s, 0, i) = g(f.time(static_cast<long>(s)), grid.node_position(i)[0]);
    }
  }
  return f;
}

const SpaceTimePoint kBase{80.0 / 1024.0, {0.5, 0.0}};

std::vector<double> radii(int n) { return dyadic_radii(4.0 / n, 0.25); }

}  // namespace

TEST_SUITE("modelling") {
  TEST_CASE("log-log slope of a power law") {
    const std::vector<double> r{0.01, 0.02, 0.04, 0.08};
    std::vector<double> v;
    for (double x : r) v.push_back(3.0 * std::pow(x, 1.7));
    CHECK(loglog_slope(r, v).value() == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_FALSE(loglog_slope(std::vector<double>(r.begin(), r.begin() + 3), std::vector<double>(v.begin(), v.begin() + 3)));
    v[1] = 0.0;
    CHECK_FALSE(loglog_slope(r, v));
    CHECK_THROWS(loglog_slope(r, std::vector<double>{1.0}));
  }

  TEST_CASE("identical fields are modelled exactly") {
    const auto f = gradient_field(256, [](double t, double x) { return std::sin(6.0 * x + t) + x * x; });
    RemainderOptions opt;
    opt.radii = radii(256);
    const auto rep = modelling_remainder(f, f, kBase, opt);
    CHECK(rep.exact);
    CHECK(rep.M_z == 0.0);
    CHECK_FALSE(rep.slope);
    CHECK(rep.b_recovery_distance < 1e-12);
  }

  TEST_CASE("quadratic remainder has slope two") {
    const auto v = gradient_field(256, [](double t, double x) { return std::cos(3.0 * x) * (1.0 + t); });
    const auto u = gradient_field(256, [](double t, double x) { return std::cos(3.0 * x) * (1.0 + t) + 5.0 * (x - 0.5) * (x - 0.5); });
    RemainderOptions opt;
    opt.radii = radii(256);
    const auto rep = modelling_remainder(u, v, kBase, opt);
    CHECK_FALSE(rep.exact);
    REQUIRE(rep.slope);
    CHECK(*rep.slope == doctest::Approx(2.0).epsilon(0.08));
    // Pinned at b = 0, the symmetric quadratic is best matched by B = 0.
    const double edge = 0.25 - 1.0 / 256.0;
    CHECK(rep.pinned.back().residual == doctest::Approx(5.0 * edge * edge).epsilon(1e-9));
  }

  TEST_CASE("baseline slope tracks a Holder profile") {
    const double beta = 0.5;
    const auto f = gradient_field(256, [&](double, double x) { return std::pow(std::abs(x - 0.5), beta); });
    const auto res = baseline_remainder(f, kBase, radii(256));
    REQUIRE(res.slope);
    CHECK(std::abs(*res.slope - beta) < 0.1);
    CHECK_FALSE(res.degenerate);
  }

  TEST_CASE("constant gradients make the baseline degenerate") {
    const auto f = gradient_field(128, [](double, double) { return 2.0; });
    const auto res = baseline_remainder(f, kBase, radii(128));
    CHECK(res.degenerate);
    for (double r : res.remainder) CHECK(r == 0.0);
  }

  TEST_CASE("at least four radii are required") {
    const auto f = gradient_field(64, [](double, double x) { return x; });
    RemainderOptions opt;
    opt.radii = {0.0625, 0.125, 0.25};
    CHECK_THROWS_AS(modelling_remainder(f, f, kBase, opt), std::invalid_argument);
    CHECK_THROWS_AS(baseline_remainder(f, kBase, opt.radii), std::invalid_argument);
  }
}
