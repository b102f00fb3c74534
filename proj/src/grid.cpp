#include "mspde/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mspde {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double wrap_component(double d) {
  d -= std::floor(d);
  return d > 0.5 ? d - 1.0 : d;
}

int wrap_index(long i, int n) {
  long m = i % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

}  // namespace

GridSpec GridSpec::make(int dim, int n, double t_end, double cfl, int snap_stride) {
  if (!(cfl > 0.0) || cfl > 0.25) {
    throw std::invalid_argument("cfl must lie in (0, 1/4], got " + std::to_string(cfl));
  }
  GridSpec g;
  g.dim = dim;
  g.n = n;
  g.t_end = t_end;
  g.dt = cfl / (static_cast<double>(n) * n);
  g.snap_stride = snap_stride;
  g.validate();
  return g;
}

std::size_t GridSpec::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

Vec2 GridSpec::node_position(std::size_t node) const {
  if (dim == 1) return {static_cast<double>(node) * dx(), 0.0};
  const auto nn = static_cast<std::size_t>(n);
  return {static_cast<double>(node / nn) * dx(), static_cast<double>(node % nn) * dx()};
}

std::size_t GridSpec::node_index(int i0, int i1) const {
  const int a = wrap_index(i0, n);
  if (dim == 1) return static_cast<std::size_t>(a);
  return static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(wrap_index(i1, n));
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (!is_power_of_two(n) || n < 8) throw std::invalid_argument("grid n must be a power of two >= 8");
  if (!(dt > 0.0)) throw std::invalid_argument("grid dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("grid t_end must be positive");
  const double ratio = t_end / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw std::invalid_argument("grid t_end must be a whole number of steps dt");
  }
  if (snap_stride < 1) throw std::invalid_argument("snap_stride must be >= 1");
  const double r_min = min_radius();
  if (snapshot_dt() > r_min * r_min * (1.0 + 1e-12)) {
    throw std::invalid_argument("snapshot cadence does not resolve the finest cylinder (snap_stride*dt > (4dx)^2)");
  }
}

double LatticeShift::length(const GridSpec& grid) const {
  const Vec2 y = to_vector(grid);
  return std::hypot(y[0], y[1]);
}

LatticeShift lattice_shift(const GridSpec& grid, const Vec2& y) {
  LatticeShift s;
  for (int a = 0; a < 2; ++a) {
    if (a >= grid.dim) {
      if (y[static_cast<std::size_t>(a)] != 0.0) throw std::invalid_argument("shift has components beyond the grid dimension");
      continue;
    }
    const double steps = y[static_cast<std::size_t>(a)] * grid.n;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9) {
      throw std::invalid_argument("shift is not a lattice vector");
    }
    s.steps[static_cast<std::size_t>(a)] = static_cast<int>(rounded);
  }
  return s;
}

std::size_t shifted_node(const GridSpec& grid, std::size_t node, const LatticeShift& shift) {
  if (grid.dim == 1) {
    return static_cast<std::size_t>(wrap_index(static_cast<long>(node) + shift.steps[0], grid.n));
  }
  const auto nn = static_cast<std::size_t>(grid.n);
  const long i0 = static_cast<long>(node / nn) + shift.steps[0];
  const long i1 = static_cast<long>(node % nn) + shift.steps[1];
  return grid.node_index(wrap_index(i0, grid.n), wrap_index(i1, grid.n));
}

Vec2 torus_offset(const Vec2& a, const Vec2& b, int dim) {
  Vec2 d{};
  for (int i = 0; i < dim; ++i) {
    d[static_cast<std::size_t>(i)] = wrap_component(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
  }
  return d;
}

double torus_distance(const Vec2& a, const Vec2& b, int dim) {
  const Vec2 d = torus_offset(a, b, dim);
  return std::hypot(d[0], d[1]);
}

double cc_distance(const SpaceTimePoint& z1, const SpaceTimePoint& z2, int dim) {
  return std::sqrt(std::abs(z1.t - z2.t)) + torus_distance(z1.x, z2.x, dim);
}

void ParabolicCylinder::validate() const {
  if (!(r > 0.0) || r >= 0.5) throw std::invalid_argument("cylinder radius must lie in (0, 1/2)");
}

std::vector<BallNode> ball_nodes(const GridSpec& grid, const Vec2& center, double r) {
  std::vector<BallNode> out;
  const double tol = 1e-12;
  const int reach = static_cast<int>(std::ceil(r * grid.n)) + 1;
  // Enumerate the chart around the nearest node so offsets are the periodic representatives.
  const int c0 = static_cast<int>(std::lround(center[0] * grid.n));
  const int c1 = grid.dim == 2 ? static_cast<int>(std::lround(center[1] * grid.n)) : 0;
  const int span1 = grid.dim == 2 ? reach : 0;
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -span1; j <= span1; ++j) {
      const Vec2 pos{(c0 + i) * grid.dx(), grid.dim == 2 ? (c1 + j) * grid.dx() : 0.0};
      Vec2 off{pos[0] - center[0], pos[1] - center[1]};
      if (grid.dim == 1) off[1] = 0.0;
      if (std::hypot(off[0], off[1]) < r - tol) {
        out.push_back({grid.node_index(c0 + i, c1 + j), off});
      }
    }
  }
  return out;
}

std::vector<double> dyadic_radii(double r_min, double r_max) {
  std::vector<double> radii;
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
  return radii;
}

}  // namespace mspde
