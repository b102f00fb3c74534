#include "mspde/mollifier.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

double Mollifier::profile(const Vec2& x) {
  const double q = x[0] * x[0] + x[1] * x[1];
  if (q >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - q));
}

Mollifier::Mollifier(const GridSpec& grid, double r) : grid_(grid), r_(r) {
  if (r < 2.0 * grid.dx() * (1.0 - 1e-12)) throw std::invalid_argument("mollifier scale below grid resolution (r < 2 dx)");
  if (r >= 0.5) throw std::invalid_argument("mollifier scale must be < 1/2");
  const int d = grid.dim;
  taps_.assign(static_cast<std::size_t>(d + 1), {});
  const int reach = static_cast<int>(std::ceil(r * grid.n));
  const int reach1 = d == 2 ? reach : 0;

  // psi_r: f_r(x) = sum_y psi_r(y) f(x - y), so the tap reads x + (-y).
  double mass = 0.0;
  std::vector<double> moment(static_cast<std::size_t>(d), 0.0);
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -reach1; j <= reach1; ++j) {
      const Vec2 xi{i * grid.dx() / r, j * grid.dx() / r};
      const double p = profile(xi);
      if (p == 0.0) continue;
      taps_[0].push_back({LatticeShift{{-i, -j}}, p});
      mass += p;
      // d_a psi(xi) = psi(xi) * (-2 xi_a / (1 - |xi|^2)^2)
      const double q = xi[0] * xi[0] + xi[1] * xi[1];
      const double g = -2.0 * p / ((1.0 - q) * (1.0 - q));
      for (int a = 0; a < d; ++a) {
        const double w = g * xi[static_cast<std::size_t>(a)];
        taps_[static_cast<std::size_t>(a + 1)].push_back({LatticeShift{{-i, -j}}, w});
        moment[static_cast<std::size_t>(a)] -= w * (a == 0 ? i : j) * grid.dx();
      }
    }
  }
  for (auto& t : taps_[0]) t.weight /= mass;
  for (int a = 0; a < d; ++a) {
    // Continuum kernel satisfies -int y_a (d_a psi)_r(y) dy = r.
    const double scale = r / moment[static_cast<std::size_t>(a)];
    for (auto& t : taps_[static_cast<std::size_t>(a + 1)]) t.weight *= scale;
  }
}

double mollify_at(const SpaceTimeField& f, const Mollifier& m, int which, long snapshot, int c, std::size_t node) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (const auto& t : m.taps(which)) acc += t.weight * f.value(snapshot, c, shifted_node(g, node, t.shift));
  return acc;
}

namespace {

SpaceTimeField convolve(const SpaceTimeField& f, const Mollifier& m, int which) {
  SpaceTimeField out(f.grid(), f.components(), f.t0(), f.time_step(), f.snapshots());
  const auto& g = f.grid();
  const auto& taps = m.taps(which);
  std::vector<std::vector<std::size_t>> partner(taps.size(), std::vector<std::size_t>(f.nodes()));
  for (std::size_t k = 0; k < taps.size(); ++k) {
    for (std::size_t i = 0; i < f.nodes(); ++i) partner[k][i] = shifted_node(g, i, taps[k].shift);
  }
  for (std::size_t s = 0; s < f.snapshots(); ++s) {
    for (int c = 0; c < f.components(); ++c) {
      auto src = f.values(s, c);
      auto dst = out.values(s, c);
      for (std::size_t i = 0; i < dst.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k].weight * src[partner[k][i]];
        dst[i] = acc;
      }
    }
  }
  return out;
}

}  // namespace

SpaceTimeField mollify(const SpaceTimeField& f, double r) { return convolve(f, Mollifier(f.grid(), r), 0); }

SpaceTimeField mollify_deriv(const SpaceTimeField& f, double r, int axis) {
  if (axis < 1 || axis > f.grid().dim) throw std::invalid_argument("mollify_deriv axis must be in 1..d");
  return convolve(f, Mollifier(f.grid(), r), axis);
}

}  // namespace mspde
