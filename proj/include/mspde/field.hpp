#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mspde/grid.hpp"

namespace mspde {

/// Real values on the space grid at equally spaced snapshot times t0 + s*step.
///
/// Snapshots with negative index are implicit zeros as long as their time is
/// <= 0 (all fields vanish for t <= 0); reading a negative index with positive
/// time is an error, since that part of the trajectory was never recorded.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(GridSpec grid, int components, double t0, double time_step, std::size_t snapshots);

  /// Single-snapshot field at time t, filled from a function of position.
  static SpaceTimeField from_function(const GridSpec& grid, double t, const std::function<double(const Vec2&)>& f);

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t snapshots() const { return snapshots_; }
  std::size_t nodes() const { return nodes_; }
  double t0() const { return t0_; }
  double time_step() const { return time_step_; }
  double time(long s) const { return t0_ + static_cast<double>(s) * time_step_; }

  std::span<double> values(std::size_t s, int c);
  std::span<const double> values(std::size_t s, int c) const;
  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  double at(std::size_t s, int c, std::size_t node) const { return data_[offset(s, c) + node]; }
  double& at(std::size_t s, int c, std::size_t node) { return data_[offset(s, c) + node]; }

  /// Value at a possibly negative snapshot index, honouring the zero extension.
  double value(long s, int c, std::size_t node) const;

  /// Snapshot index whose time is closest to t (may be negative).
  long nearest_snapshot(double t) const;

  bool same_layout(const SpaceTimeField& other) const;

  SpaceTimeField& operator-=(const SpaceTimeField& other);
  friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }

 private:
  std::size_t offset(std::size_t s, int c) const {
    return (s * static_cast<std::size_t>(components_) + static_cast<std::size_t>(c)) * nodes_;
  }

  GridSpec grid_{};
  int components_ = 0;
  double t0_ = 0.0;
  double time_step_ = 1.0;
  std::size_t snapshots_ = 0;
  std::size_t nodes_ = 0;
  std::vector<double> data_;
};

/// Snapshots [first, first + count) as a field of their own.
SpaceTimeField snapshot_slice(const SpaceTimeField& f, std::size_t first, std::size_t count);

/// delta_y f(t, x) = f(t, x + y) - f(t, x), with periodic wrap.
SpaceTimeField increment(const SpaceTimeField& f, const LatticeShift& y);
SpaceTimeField increment(const SpaceTimeField& f, const Vec2& y);

/// Fourier differentiation of every snapshot of a scalar field.
SpaceTimeField spectral_gradient(const SpaceTimeField& f);

/// A sample location inside a parabolic cylinder.
struct CylinderSample {
  long snapshot;
  std::size_t node;
  Vec2 offset;
  double t;
};

/// All grid nodes within torus distance < r of x' at every snapshot time in
/// (t' - r^2, t']. Throws std::runtime_error if no snapshot falls in the slab
/// or the slab reaches unrecorded times.
std::vector<CylinderSample> cylinder_samples(const SpaceTimeField& f, const ParabolicCylinder& p);

/// Snapshot indices in (t' - r^2, t'], newest first.
std::vector<long> slab_snapshots(const SpaceTimeField& f, double t_base, double r);

/// Max over the cylinder of |f - c| (Euclidean over components).
double sup_deviation(const SpaceTimeField& f, const std::vector<CylinderSample>& samples, std::span<const double> c);

}  // namespace mspde
