#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mspde {

/// A point of the torus [0,1)^d. Unused trailing coordinates are zero.
using Vec2 = std::array<double, 2>;

/// Row-major 2x2 matrix; in d = 1 only entry (0,0) is meaningful.
struct Matrix2 {
  std::array<double, 4> v{};

  double& operator()(int i, int j) { return v[static_cast<std::size_t>(2 * i + j)]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(2 * i + j)]; }

  static Matrix2 identity() { return Matrix2{{1.0, 0.0, 0.0, 1.0}}; }
  static Matrix2 diagonal(double a, double b) { return Matrix2{{a, 0.0, 0.0, b}}; }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

struct SpaceTimePoint {
  double t = 0.0;
  Vec2 x{};
};

/// Discretization of [0, t_end] x [0,1)^d with n nodes per axis.
struct GridSpec {
  int dim = 1;
  int n = 256;
  double t_end = 1.0;
  double dt = 0.0;
  int snap_stride = 16;

  /// Builds a grid with dt = cfl * dx^2 and checks every invariant.
  static GridSpec make(int dim, int n, double t_end, double cfl, int snap_stride);

  double dx() const { return 1.0 / n; }
  std::size_t nodes() const { return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
  std::size_t steps() const;
  double snapshot_dt() const { return dt * snap_stride; }
  std::size_t snapshot_count() const { return steps() / static_cast<std::size_t>(snap_stride) + 1; }
  double min_radius() const { return 4.0 * dx(); }

  Vec2 node_position(std::size_t node) const;
  std::size_t node_index(int i0, int i1 = 0) const;

  /// Throws std::invalid_argument on violation.
  void validate() const;
};

/// Shift by integer multiples of dx along each axis.
struct LatticeShift {
  std::array<int, 2> steps{};

  bool is_zero() const { return steps[0] == 0 && steps[1] == 0; }
  Vec2 to_vector(const GridSpec& grid) const { return {steps[0] * grid.dx(), steps[1] * grid.dx()}; }
  double length(const GridSpec& grid) const;
  friend bool operator==(const LatticeShift&, const LatticeShift&) = default;
};

/// Snaps y to the lattice; throws std::invalid_argument if y is not a lattice vector.
LatticeShift lattice_shift(const GridSpec& grid, const Vec2& y);

/// Node reached from `node` after shifting by `shift` with periodic wrap.
std::size_t shifted_node(const GridSpec& grid, std::size_t node, const LatticeShift& shift);

/// Shortest periodic representative of a - b on the unit torus, per axis.
Vec2 torus_offset(const Vec2& a, const Vec2& b, int dim);
double torus_distance(const Vec2& a, const Vec2& b, int dim);

/// Parabolic distance |t - t'|^{1/2} + |x - x'| with the torus metric in space.
double cc_distance(const SpaceTimePoint& z1, const SpaceTimePoint& z2, int dim);

/// P_r(z) = (t' - r^2, t'] x B_r(x').
struct ParabolicCylinder {
  SpaceTimePoint base;
  double r = 0.0;

  void validate() const;
};

/// Grid nodes strictly inside B_r(x'), with their chart offsets x - x'.
struct BallNode {
  std::size_t node;
  Vec2 offset;
};
std::vector<BallNode> ball_nodes(const GridSpec& grid, const Vec2& center, double r);

/// Dyadic radii r_min * 2^j inside [r_min, r_max].
std::vector<double> dyadic_radii(double r_min, double r_max);

}  // namespace mspde
