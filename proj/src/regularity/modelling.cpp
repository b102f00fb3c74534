#include "mspde/regularity/modelling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mspde/regularity/estimators.hpp"

namespace mspde {

std::optional<double> loglog_slope(std::span<const double> radii, std::span<const double> values,
                                   std::size_t min_points) {
  if (radii.size() != values.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  if (radii.size() < std::max<std::size_t>(2, min_points)) return std::nullopt;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(values[i] > 0.0) || !(radii[i] > 0.0)) return std::nullopt;
    sx += std::log(radii[i]);
    sy += std::log(values[i]);
  }
  const double n = static_cast<double>(radii.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double dx = std::log(radii[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

std::size_t index_at(const SpaceTimeField& f, double t) {
  const long s = f.nearest_snapshot(t);
  if (s < 0 || s >= static_cast<long>(f.snapshots()) || std::abs(f.time(s) - t) > 1e-9 * f.time_step()) {
    throw std::out_of_range("model field does not cover the cylinder at t = " + std::to_string(t));
  }
  return static_cast<std::size_t>(s);
}

Vec2 vec_at(const SpaceTimeField& f, std::size_t s, std::size_t node) {
  Vec2 v{};
  for (int c = 0; c < f.components(); ++c) v[static_cast<std::size_t>(c)] = f.at(s, c, node);
  return v;
}

double max_entry_diff(const Matrix2& a, const Matrix2& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

}  // namespace

BasepointReport modelling_remainder(const SpaceTimeField& grad_u, const SpaceTimeField& grad_v_a,
                                    const SpaceTimePoint& z, const RemainderOptions& opt) {
  const GridSpec& g = grad_u.grid();
  const int d = g.dim;
  if (grad_u.components() != d || grad_v_a.components() != d) throw std::invalid_argument("gradient fields expected");
  if (std::abs(grad_u.time_step() - grad_v_a.time_step()) > 1e-15 * grad_u.time_step() || grad_v_a.grid().n != g.n) {
    throw std::invalid_argument("model field uses a different grid or snapshot spacing");
  }
  if (opt.radii.size() < 4) throw std::invalid_argument("modelling remainder needs at least four radii");
  std::vector<double> radii = opt.radii;
  std::sort(radii.begin(), radii.end());

  BasepointReport rep;
  rep.z = z;
  const LatticePoint base = locate(grad_u, z);
  const std::size_t sv = index_at(grad_v_a, z.t);
  rep.grad_u = vec_at(grad_u, static_cast<std::size_t>(base.snapshot), base.node);
  const Vec2 gv = vec_at(grad_v_a, sv, base.node);
  for (std::size_t c = 0; c < 2; ++c) rep.grad_w[c] = rep.grad_u[c] - gv[c];

  // Samples of grad w on the largest cylinder, tagged with the smallest radius containing them.
  const double rmax = radii.back();
  const auto slab = slab_snapshots(grad_u, z.t, rmax);
  const auto ball = ball_nodes(g, z.x, rmax);
  struct Tagged {
    FitSample s;
    std::size_t level;
  };
  std::vector<Tagged> all;
  all.reserve(slab.size() * ball.size());
  for (long s : slab) {
    if (s < 0) throw std::runtime_error("cylinder reaches before the recorded window");
    const double t = grad_u.time(s);
    const std::size_t s2 = index_at(grad_v_a, t);
    const double lag = z.t - t;
    for (const auto& b : ball) {
      const double dist = std::hypot(b.offset[0], b.offset[1]);
      std::size_t level = radii.size();
      for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        if (dist < r && lag < r * r - 1e-9 * grad_u.time_step()) {
          level = k;
          break;
        }
      }
      if (level == radii.size()) continue;
      const Vec2 gu = vec_at(grad_u, static_cast<std::size_t>(s), b.node);
      const Vec2 gva = vec_at(grad_v_a, s2, b.node);
      all.push_back({{b.offset, {gu[0] - gva[0], gu[1] - gva[1]}, 1.0}, level});
    }
  }

  std::vector<FitSample> samples;
  bool exact = true;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    samples.clear();
    for (const auto& t : all) {
      if (t.level <= k) samples.push_back(t.s);
    }
    const double scale = std::pow(radii[k], -2.0 * opt.alpha);
    const auto pinned = affine_fit_minmax(samples, d, z.x, {true, rep.grad_w});
    const auto free = affine_fit_minmax(samples, d, z.x, {true, std::nullopt});
    rep.pinned.push_back({radii[k], pinned.residual, scale * pinned.residual, pinned.model, samples.size(), pinned.degenerate});
    rep.free_b.push_back({radii[k], free.residual, scale * free.residual, free.model, samples.size(), free.degenerate});
    rep.M_z = std::max(rep.M_z, scale * pinned.residual);
    exact = exact && pinned.residual <= opt.exact_tolerance;
  }
  rep.exact = exact;

  std::vector<double> res, fres;
  for (const auto& e : rep.pinned) res.push_back(e.residual);
  for (const auto& e : rep.free_b) fres.push_back(e.residual);
  if (!exact) {
    rep.slope = loglog_slope(radii, res);
    rep.free_slope = loglog_slope(radii, fres);
  }

  // One B across all radii: weight each sample by r^{-2 alpha} of its smallest cylinder.
  samples.clear();
  for (const auto& t : all) {
    FitSample s = t.s;
    s.weight = std::pow(radii[t.level], -2.0 * opt.alpha);
    samples.push_back(s);
  }
  const auto joint = affine_fit_minmax(samples, d, z.x, {true, rep.grad_w});
  rep.M_z_joint = joint.residual;
  rep.joint_model = joint.model;

  const auto& first = rep.free_b.front();
  rep.b_recovery_distance = std::hypot(first.model.b[0] - rep.grad_w[0], first.model.b[1] - rep.grad_w[1]);
  rep.b_recovery_residual = first.residual;
  for (const auto& e : rep.free_b) {
    const double drift = max_entry_diff(e.model.B, first.model.B);
    rep.B_drift.push_back(drift);
    rep.B_drift_constant = std::max(rep.B_drift_constant, drift / std::pow(e.r, 2.0 * opt.alpha - 1.0));
  }
  return rep;
}

BaselineResult baseline_remainder(const SpaceTimeField& grad_u, const SpaceTimePoint& z,
                                  const std::vector<double>& radii) {
  if (radii.size() < 4) throw std::invalid_argument("baseline remainder needs at least four radii");
  BaselineResult out;
  out.radii = radii;
  std::sort(out.radii.begin(), out.radii.end());
  const LatticePoint base = locate(grad_u, z);
  std::vector<double> c(static_cast<std::size_t>(grad_u.components()));
  for (int k = 0; k < grad_u.components(); ++k) {
    c[static_cast<std::size_t>(k)] = grad_u.at(static_cast<std::size_t>(base.snapshot), k, base.node);
  }
  for (double r : out.radii) out.remainder.push_back(sup_deviation(grad_u, cylinder_samples(grad_u, {z, r}), c));
  out.slope = loglog_slope(out.radii, out.remainder);
  out.degenerate = !out.slope.has_value();
  return out;
}

}  // namespace mspde
