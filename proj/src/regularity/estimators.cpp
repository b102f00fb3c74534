#include "mspde/regularity/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mspde/mollifier.hpp"
#include "mspde/regularity/minimax.hpp"

namespace mspde {

LatticePoint locate(const SpaceTimeField& f, const SpaceTimePoint& z) {
  const GridSpec& g = f.grid();
  LatticePoint p;
  p.snapshot = f.nearest_snapshot(z.t);
  if (std::abs(f.time(p.snapshot) - z.t) > 1e-9 * std::max(1.0, f.time_step())) {
    throw std::invalid_argument("basepoint time is not a snapshot time");
  }
  if (p.snapshot < 0 || p.snapshot >= static_cast<long>(f.snapshots())) {
    throw std::out_of_range("basepoint time outside the recorded snapshots");
  }
  std::array<int, 2> idx{};
  for (int a = 0; a < g.dim; ++a) {
    const double v = z.x[static_cast<std::size_t>(a)] * g.n;
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw std::invalid_argument("basepoint position is not a grid node");
    idx[static_cast<std::size_t>(a)] = static_cast<int>(((static_cast<long>(r) % g.n) + g.n) % g.n);
  }
  p.node = g.node_index(idx[0], idx[1]);
  return p;
}

std::vector<LatticeShift> shifts_within(const GridSpec& g, double l, std::size_t budget, std::uint64_t seed) {
  const double lim = l * g.n * (1.0 + 1e-12);
  const int reach = static_cast<int>(std::floor(lim));
  std::vector<LatticeShift> all;
  const int jr = g.dim == 2 ? reach : 0;
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -jr; j <= jr; ++j) {
      if (i == 0 && j == 0) continue;
      if (std::hypot(i, j) <= lim) all.push_back({{i, j}});
    }
  }
  if (all.size() <= budget) return all;
  std::vector<LatticeShift> keep;
  std::vector<LatticeShift> rest;
  const int diag = static_cast<int>(std::floor(lim / std::sqrt(2.0)));
  auto extreme = [&](const LatticeShift& s) {
    const int a = std::abs(s.steps[0]), b = std::abs(s.steps[1]);
    return (a == reach && b == 0) || (a == 0 && b == reach) || (g.dim == 2 && a == diag && b == diag);
  };
  for (const auto& s : all) (extreme(s) ? keep : rest).push_back(s);
  std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(reach) * 0x9E3779B97F4A7C15ULL));
  std::shuffle(rest.begin(), rest.end(), rng);
  const std::size_t extra = budget > keep.size() ? budget - keep.size() : 0;
  keep.insert(keep.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(std::min(extra, rest.size())));
  std::sort(keep.begin(), keep.end(), [](const LatticeShift& a, const LatticeShift& b) { return a.steps < b.steps; });
  return keep;
}

namespace {

/// Snapshot indices of the region at scale r: {s'} or the slab of P_r(z).
std::vector<long> region_snapshots(const SpaceTimeField& f, const SpaceTimePoint& z, double r, Extent e) {
  if (e == Extent::space) return {locate(f, z).snapshot};
  auto slab = slab_snapshots(f, z.t, r);
  if (slab.back() < 0) throw std::runtime_error("cylinder reaches before the recorded window");
  return slab;
}

Vec2 vec_at(const SpaceTimeField& f, long s, std::size_t node) {
  Vec2 v{};
  for (int c = 0; c < f.components(); ++c) v[static_cast<std::size_t>(c)] = f.at(static_cast<std::size_t>(s), c, node);
  return v;
}

}  // namespace

double increment_constant_N(const SpaceTimeField& grad_f, const SpaceTimePoint& z, const RegularityParams& params,
                            Extent extent) {
  params.validate();
  const GridSpec& g = grad_f.grid();
  if (grad_f.components() != g.dim) throw std::invalid_argument("increment_constant_N expects a gradient field");
  double best = 0.0;
  std::vector<Vec2> pts;
  for (double l : params.radii(g)) {
    const auto snaps = region_snapshots(grad_f, z, l, extent);
    const auto ball = ball_nodes(g, z.x, l);
    for (const auto& y : shifts_within(g, l, params.shift_budget, params.seed)) {
      pts.clear();
      for (long s : snaps) {
        for (const auto& b : ball) {
          const Vec2 hi = vec_at(grad_f, s, shifted_node(g, b.node, y));
          const Vec2 lo = vec_at(grad_f, s, b.node);
          pts.push_back({hi[0] - lo[0], hi[1] - lo[1]});
        }
      }
      const double rad = chebyshev_center(pts, g.dim, params.seed).radius;
      best = std::max(best, rad / std::pow(l, 2.0 * params.alpha));
    }
  }
  return best;
}

double affine_constant(const SpaceTimeField& grad_f, const SpaceTimePoint& z, const RegularityParams& params,
                       Extent extent) {
  params.validate();
  const GridSpec& g = grad_f.grid();
  if (grad_f.components() != g.dim) throw std::invalid_argument("affine_constant expects a gradient field");
  double best = 0.0;
  std::vector<FitSample> samples;
  for (double r : params.radii(g)) {
    samples.clear();
    for (long s : region_snapshots(grad_f, z, r, extent)) {
      for (const auto& b : ball_nodes(g, z.x, r)) samples.push_back({b.offset, vec_at(grad_f, s, b.node), 1.0});
    }
    const auto fit = affine_fit_minmax(samples, g.dim, z.x);
    best = std::max(best, fit.residual / std::pow(r, 2.0 * params.alpha));
  }
  return best;
}

double spacetime_fit_time_terms(const SpaceTimeField& f, const SpaceTimePoint& z, const RegularityParams& params) {
  params.validate();
  const GridSpec& g = f.grid();
  if (f.components() != 1) throw std::invalid_argument("spacetime_fit_time_terms expects a scalar field");
  const long last = static_cast<long>(f.snapshots()) - 1;
  if (last < 2) throw std::invalid_argument("spacetime_fit_time_terms needs at least three snapshots");
  const std::size_t nodes = f.nodes();
  double total = 0.0;
  for (int which = 0; which <= g.dim; ++which) {
    double sup_r = 0.0;
    for (double r : params.radii(g)) {
      const auto slab = slab_snapshots(f, z.t, r);
      if (slab.size() < 3) throw std::runtime_error("spacetime_fit_time_terms: fewer than three snapshots in a slab");
      if (slab.back() < 0) throw std::runtime_error("spacetime_fit_time_terms: slab reaches before the recorded window");
      const Mollifier moll(g, r);
      // Mollified field on slab snapshots plus one neighbour on each side.
      const long lo = std::max(0L, slab.back() - 1);
      const long hi = std::min(last, slab.front() + 1);
      std::vector<std::vector<double>> m(static_cast<std::size_t>(hi - lo + 1), std::vector<double>(nodes));
      for (long s = lo; s <= hi; ++s) {
        for (std::size_t i = 0; i < nodes; ++i) m[static_cast<std::size_t>(s - lo)][i] = mollify_at(f, moll, which, s, 0, i);
      }
      auto dt_at = [&](long s, std::size_t i) {
        const long a = std::max(lo, s - 1), b = std::min(hi, s + 1);
        return (m[static_cast<std::size_t>(b - lo)][i] - m[static_cast<std::size_t>(a - lo)][i]) /
               (f.time(b) - f.time(a));
      };
      const auto ball = ball_nodes(g, z.x, r);
      double sup_y = 0.0;
      for (const auto& y : shifts_within(g, r, params.shift_budget, params.seed)) {
        for (long s : slab) {
          for (const auto& b : ball) {
            const double v = dt_at(s, shifted_node(g, b.node, y)) - dt_at(s, b.node);
            sup_y = std::max(sup_y, std::abs(v));
          }
        }
      }
      sup_r = std::max(sup_r, std::pow(r, 1.0 - 2.0 * params.alpha) * sup_y);
    }
    total += sup_r;
  }
  return total;
}

IncrementFitPair increment_fit_pair(const SpaceTimeField& f, const SpaceTimeField& grad_f, const SpaceTimePoint& z,
                     const LatticeShift& y, double l) {
  const GridSpec& g = f.grid();
  if (f.components() != 1 || grad_f.components() != g.dim) throw std::invalid_argument("increment_fit_pair: field shapes");
  const double ylen = y.length(g);
  if (ylen > l * (1.0 + 1e-12)) throw std::invalid_argument("increment_fit_pair requires |y| <= l");
  IncrementFitPair out;
  std::vector<ScalarSample> lhs;
  for (const auto& c : cylinder_samples(f, {z, l})) {
    const double v = f.value(c.snapshot, 0, shifted_node(g, c.node, y)) - f.value(c.snapshot, 0, c.node);
    lhs.push_back({c.offset, v});
  }
  out.lhs = affine_fit_scalar(lhs, g.dim).residual;
  std::vector<FitSample> rhs;
  for (const auto& c : cylinder_samples(grad_f, {z, 2.0 * l})) {
    Vec2 v{};
    for (int k = 0; k < g.dim; ++k) v[static_cast<std::size_t>(k)] = grad_f.value(c.snapshot, k, c.node);
    rhs.push_back({c.offset, v, 1.0});
  }
  out.rhs = ylen * affine_fit_minmax(rhs, g.dim, z.x).residual;
  return out;
}

SpaceTimeField compute_g(const Nonlinearity& a, const SpaceTimeField& grad_u, const LatticeShift& y,
                         const SpaceTimePoint& z) {
  const GridSpec& g = grad_u.grid();
  const int d = g.dim;
  const LatticePoint base = locate(grad_u, z);
  const Matrix2 az = a.jac(vec_at(grad_u, base.snapshot, base.node));
  const SpaceTimeField ay = a_y(a, grad_u, y);
  SpaceTimeField out(g, d, grad_u.t0(), grad_u.time_step(), grad_u.snapshots());
  for (std::size_t s = 0; s < grad_u.snapshots(); ++s) {
    for (std::size_t i = 0; i < grad_u.nodes(); ++i) {
      const std::size_t j = shifted_node(g, i, y);
      for (int r = 0; r < d; ++r) {
        double acc = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = ay.at(s, r * d + c, i) - az(r, c);
          acc += diff * (grad_u.at(s, c, j) - grad_u.at(s, c, i));
        }
        out.at(s, r, i) = acc;
      }
    }
  }
  return out;
}

}  // namespace mspde
