#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mspde/grid.hpp"

using namespace mspde;

TEST_SUITE("grid") {
  TEST_CASE("make derives dt from the cfl number") {
    const auto g = GridSpec::make(1, 64, 0.5, 0.25, 4);
    CHECK(g.dt == doctest::Approx(0.25 / 4096.0));
    CHECK(g.steps() == 8192);
    CHECK(g.snapshot_count() == 8192 / 4 + 1);
    CHECK(g.nodes() == 64);
    CHECK(GridSpec::make(2, 16, 0.125, 0.25, 1).nodes() == 256);
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(GridSpec::make(3, 64, 1.0, 0.25, 1), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 100, 1.0, 0.25, 1), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 64, 1.0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 64, -1.0, 0.25, 1), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 64, 0.1, 0.25, 1), std::invalid_argument);
    // snapshots coarser than the smallest cylinder
    CHECK_THROWS_AS(GridSpec::make(1, 64, 1.0, 0.25, 1024), std::invalid_argument);
  }

  TEST_CASE("node indexing wraps periodically") {
    const auto g = GridSpec::make(2, 8, 0.125, 0.25, 1);
    CHECK(g.node_index(-1, 9) == g.node_index(7, 1));
    const Vec2 p = g.node_position(g.node_index(3, 5));
    CHECK(p[0] == doctest::Approx(3.0 / 8));
    CHECK(p[1] == doctest::Approx(5.0 / 8));
    const LatticeShift y{{-2, 3}};
    CHECK(shifted_node(g, g.node_index(1, 6), y) == g.node_index(7, 1));
  }

  TEST_CASE("torus distance takes the shortest image") {
    CHECK(torus_distance({0.05, 0.0}, {0.95, 0.0}, 1) == doctest::Approx(0.1));
    CHECK(torus_distance({0.1, 0.9}, {0.9, 0.1}, 2) == doctest::Approx(std::sqrt(0.08)));
    const Vec2 off = torus_offset({0.05, 0.0}, {0.95, 0.0}, 1);
    CHECK(off[0] == doctest::Approx(0.1));
  }

  TEST_CASE("parabolic distance") {
    const SpaceTimePoint a{0.25, {0.1, 0.0}}, b{0.21, {0.2, 0.0}};
    CHECK(cc_distance(a, b, 1) == doctest::Approx(0.2 + 0.1));
    CHECK(cc_distance(a, a, 1) == 0.0);
  }

  TEST_CASE("lattice shifts") {
    const auto g = GridSpec::make(1, 16, 0.125, 0.25, 1);
    CHECK(lattice_shift(g, {3.0 / 16, 0.0}).steps[0] == 3);
    CHECK_THROWS_AS(lattice_shift(g, {0.1, 0.0}), std::invalid_argument);
    CHECK(LatticeShift{{3, 0}}.length(g) == doctest::Approx(3.0 / 16));
  }

  TEST_CASE("ball nodes match a brute-force scan") {
    for (int dim : {1, 2}) {
      const auto g = GridSpec::make(dim, 32, 0.125, 0.25, 1);
      const Vec2 c{0.5, dim == 2 ? 0.25 : 0.0};
      for (double r : {0.04, 0.125, 0.25}) {
        std::size_t expect = 0;
        for (std::size_t i = 0; i < g.nodes(); ++i) expect += torus_distance(g.node_position(i), c, dim) < r;
        const auto ball = ball_nodes(g, c, r);
        CHECK(ball.size() == expect);
        for (const auto& b : ball) CHECK(std::hypot(b.offset[0], b.offset[1]) < r);
      }
    }
  }

  TEST_CASE("dyadic radii") {
    const auto r = dyadic_radii(1.0 / 64, 0.25);
    REQUIRE(r.size() == 5);
    CHECK(r.front() == doctest::Approx(1.0 / 64));
    CHECK(r.back() == doctest::Approx(0.25));
  }

  TEST_CASE("cylinders must stay below half the period") {
    CHECK_THROWS(ParabolicCylinder{{1.0, {0.5, 0.0}}, 0.5}.validate());
    CHECK_NOTHROW(ParabolicCylinder{{1.0, {0.5, 0.0}}, 0.25}.validate());
  }
}
