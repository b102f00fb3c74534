#include "mspde/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mspde/fft.hpp"

namespace mspde {

SpaceTimeField::SpaceTimeField(GridSpec grid, int components, double t0, double time_step, std::size_t snapshots)
    : grid_(grid),
      components_(components),
      t0_(t0),
      time_step_(time_step),
      snapshots_(snapshots),
      nodes_(grid.nodes()),
      data_(snapshots * static_cast<std::size_t>(components) * grid.nodes(), 0.0) {
  if (components < 1) throw std::invalid_argument("field needs at least one component");
  if (!(time_step > 0.0)) throw std::invalid_argument("snapshot spacing must be positive");
}

SpaceTimeField SpaceTimeField::from_function(const GridSpec& grid, double t,
                                             const std::function<double(const Vec2&)>& f) {
  SpaceTimeField out(grid, 1, t, grid.snapshot_dt(), 1);
  auto v = out.values(0, 0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node_position(i));
  return out;
}

std::span<double> SpaceTimeField::values(std::size_t s, int c) {
  return std::span<double>(data_).subspan(offset(s, c), nodes_);
}

std::span<const double> SpaceTimeField::values(std::size_t s, int c) const {
  return std::span<const double>(data_).subspan(offset(s, c), nodes_);
}

double SpaceTimeField::value(long s, int c, std::size_t node) const {
  if (s >= 0) {
    if (static_cast<std::size_t>(s) >= snapshots_) throw std::out_of_range("snapshot index past the recorded range");
    return at(static_cast<std::size_t>(s), c, node);
  }
  if (time(s) <= 1e-12 * time_step_) return 0.0;
  throw std::out_of_range("snapshot precedes the recorded window");
}

long SpaceTimeField::nearest_snapshot(double t) const { return std::lround((t - t0_) / time_step_); }

bool SpaceTimeField::same_layout(const SpaceTimeField& other) const {
  return grid_.dim == other.grid_.dim && grid_.n == other.grid_.n && components_ == other.components_ &&
         snapshots_ == other.snapshots_ && std::abs(t0_ - other.t0_) <= 1e-12 &&
         std::abs(time_step_ - other.time_step_) <= 1e-15;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& other) {
  if (!same_layout(other)) throw std::invalid_argument("field layouts differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

SpaceTimeField snapshot_slice(const SpaceTimeField& f, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > f.snapshots()) throw std::out_of_range("snapshot slice exceeds the recorded field");
  SpaceTimeField out(f.grid(), f.components(), f.time(static_cast<long>(first)), f.time_step(), count);
  const std::size_t block = static_cast<std::size_t>(f.components()) * f.nodes();
  std::copy_n(f.raw().begin() + static_cast<std::ptrdiff_t>(first * block), count * block, out.raw().begin());
  return out;
}

SpaceTimeField increment(const SpaceTimeField& f, const LatticeShift& y) {
  SpaceTimeField out(f.grid(), f.components(), f.t0(), f.time_step(), f.snapshots());
  const auto& g = f.grid();
  std::vector<std::size_t> partner(f.nodes());
  for (std::size_t i = 0; i < partner.size(); ++i) partner[i] = shifted_node(g, i, y);
  for (std::size_t s = 0; s < f.snapshots(); ++s) {
    for (int c = 0; c < f.components(); ++c) {
      auto src = f.values(s, c);
      auto dst = out.values(s, c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[partner[i]] - src[i];
    }
  }
  return out;
}

SpaceTimeField increment(const SpaceTimeField& f, const Vec2& y) { return increment(f, lattice_shift(f.grid(), y)); }

SpaceTimeField spectral_gradient(const SpaceTimeField& f) {
  if (f.components() != 1) throw std::invalid_argument("spectral_gradient expects a scalar field");
  const auto& g = f.grid();
  SpaceTimeField out(g, g.dim, f.t0(), f.time_step(), f.snapshots());
  Fft fft(g);
  SpectralGrid modes(g);
  std::vector<Complex> hat(fft.spectral_size());
  std::vector<Complex> d(fft.spectral_size());
  for (std::size_t s = 0; s < f.snapshots(); ++s) {
    fft.forward(f.values(s, 0), hat);
    for (int axis = 0; axis < g.dim; ++axis) {
      for (std::size_t i = 0; i < hat.size(); ++i) d[i] = modes.derivative_factor(i, axis) * hat[i];
      fft.inverse(d, out.values(s, axis));
    }
  }
  return out;
}

std::vector<long> slab_snapshots(const SpaceTimeField& f, double t_base, double r) {
  const long top = f.nearest_snapshot(t_base);
  if (std::abs(f.time(top) - t_base) > 1e-9 * std::max(1.0, f.time_step())) {
    throw std::invalid_argument("cylinder base time is not on the snapshot lattice");
  }
  if (top >= static_cast<long>(f.snapshots())) throw std::out_of_range("cylinder base time beyond recorded snapshots");
  std::vector<long> out;
  const double floor_t = t_base - r * r;
  const double tol = 1e-9 * f.time_step();
  for (long s = top;; --s) {
    const double ts = f.time(s);
    if (ts <= floor_t + tol) break;
    if (s < 0 && ts > tol) {
      throw std::runtime_error("cylinder reaches before the recorded window; insufficient snapshot coverage");
    }
    out.push_back(s);
  }
  if (out.empty()) throw std::runtime_error("cylinder slab contains no snapshot; snapshot cadence too coarse");
  return out;
}

std::vector<CylinderSample> cylinder_samples(const SpaceTimeField& f, const ParabolicCylinder& p) {
  p.validate();
  const auto slab = slab_snapshots(f, p.base.t, p.r);
  const auto ball = ball_nodes(f.grid(), p.base.x, p.r);
  if (ball.empty()) throw std::runtime_error("cylinder contains no grid node");
  std::vector<CylinderSample> out;
  out.reserve(slab.size() * ball.size());
  for (long s : slab) {
    for (const auto& b : ball) out.push_back({s, b.node, b.offset, f.time(s)});
  }
  return out;
}

double sup_deviation(const SpaceTimeField& f, const std::vector<CylinderSample>& samples, std::span<const double> c) {
  double best = 0.0;
  for (const auto& smp : samples) {
    double acc = 0.0;
    for (int k = 0; k < f.components(); ++k) {
      const double d = f.value(smp.snapshot, k, smp.node) - c[static_cast<std::size_t>(k)];
      acc += d * d;
    }
    best = std::max(best, std::sqrt(acc));
  }
  return best;
}

}  // namespace mspde
