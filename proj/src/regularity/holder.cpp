#include "mspde/regularity/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mspde {

std::vector<double> RegularityParams::radii(const GridSpec& grid) const {
  const double lo = r_min > 0.0 ? r_min : grid.min_radius();
  return dyadic_radii(lo, r_max);
}

void RegularityParams::validate() const {
  if (!(alpha > 0.5) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (1/2, 1)");
  if (!(r_max > 0.0) || r_max > 0.25) throw std::invalid_argument("r_max must lie in (0, 1/4]");
  if (r_min < 0.0 || (r_min > 0.0 && r_min > r_max)) throw std::invalid_argument("r_min must lie in [0, r_max]");
  if (pair_budget < 1) throw std::invalid_argument("pair_budget must be positive");
  if (shift_budget < 1) throw std::invalid_argument("shift_budget must be positive");
}

namespace {

struct Region {
  std::size_t s_lo = 0;
  std::size_t count = 0;
  std::vector<unsigned char> mask;
  std::vector<std::size_t> nodes;
};

class PairScorer {
 public:
  PairScorer(const SpaceTimeField& f, double alpha) : f_(f), alpha_(alpha), dim_(f.grid().dim) {}

  double diff2(std::size_t s1, std::size_t i1, std::size_t s2, std::size_t i2) const {
    double acc = 0.0;
    for (int c = 0; c < f_.components(); ++c) {
      const double d = f_.at(s2, c, i2) - f_.at(s1, c, i1);
      acc += d * d;
    }
    return acc;
  }

  double distance(std::size_t s1, std::size_t i1, std::size_t s2, std::size_t i2) const {
    const double dt = std::abs(f_.time(static_cast<long>(s2)) - f_.time(static_cast<long>(s1)));
    return std::sqrt(dt) + torus_distance(f_.grid().node_position(i1), f_.grid().node_position(i2), dim_);
  }

  double score(std::size_t s1, std::size_t i1, std::size_t s2, std::size_t i2) const {
    const double acc = diff2(s1, i1, s2, i2);
    if (acc == 0.0) return 0.0;
    const double dist = distance(s1, i1, s2, i2);
    if (dist <= 0.0) return 0.0;
    return std::sqrt(acc) / std::pow(dist, alpha_);
  }

  double alpha() const { return alpha_; }

 private:
  const SpaceTimeField& f_;
  double alpha_;
  int dim_;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 1, 2, 3, 4, 6, 8, 12, ... up to `limit`.
std::vector<std::size_t> ladder(std::size_t limit) {
  std::vector<std::size_t> out;
  for (std::size_t p = 1; p <= limit; p *= 2) {
    out.push_back(p);
    if (p >= 2 && 3 * p / 2 <= limit) out.push_back(3 * p / 2);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LatticeShift> spatial_offsets(const GridSpec& g, bool with_negative) {
  std::vector<std::array<int, 2>> dirs;
  if (g.dim == 1) {
    dirs = {{1, 0}};
  } else {
    dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  }
  std::vector<LatticeShift> out;
  for (std::size_t step : ladder(static_cast<std::size_t>(g.n / 2))) {
    const int len = static_cast<int>(step);
    for (const auto& d : dirs) {
      out.push_back({{d[0] * len, d[1] * len}});
      if (with_negative) out.push_back({{-d[0] * len, -d[1] * len}});
    }
  }
  return out;
}

HolderEstimate estimate(const SpaceTimeField& f, double alpha, const Region& reg, std::size_t budget,
                        std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Holder exponent must be positive");
  const std::size_t m = reg.count * reg.nodes.size();
  if (m < 2) throw std::invalid_argument("Holder seminorm needs at least two samples in the region");
  const PairScorer scorer(f, alpha);
  HolderEstimate out;
  const double total_pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  if (total_pairs <= static_cast<double>(budget)) {
    out.exhaustive = true;
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t sa = reg.s_lo + a / reg.nodes.size();
      const std::size_t ia = reg.nodes[a % reg.nodes.size()];
      for (std::size_t b = a + 1; b < m; ++b) {
        const std::size_t sb = reg.s_lo + b / reg.nodes.size();
        const std::size_t ib = reg.nodes[b % reg.nodes.size()];
        out.value = std::max(out.value, scorer.score(sa, ia, sb, ib));
        ++out.pairs;
      }
    }
    return out;
  }

  const GridSpec& g = f.grid();
  std::vector<std::size_t> lags{0};
  if (reg.count > 1) {
    for (std::size_t tau : ladder(reg.count - 1)) lags.push_back(tau);
  }
  std::uint64_t stratum = 0;
  for (std::size_t tau : lags) {
    auto offsets = spatial_offsets(g, tau > 0);
    if (tau > 0) offsets.insert(offsets.begin(), LatticeShift{});
    for (const auto& e : offsets) {
      ++stratum;
      std::vector<std::pair<std::size_t, std::size_t>> anchors;  // (node, partner)
      for (std::size_t i : reg.nodes) {
        const std::size_t j = shifted_node(g, i, e);
        if (reg.mask[j]) anchors.emplace_back(i, j);
      }
      const std::size_t times = reg.count - tau;
      if (anchors.empty() || times == 0) continue;
      const std::size_t count = times * anchors.size();
      // Every pair of a stratum is at the same parabolic distance.
      const double dist = scorer.distance(reg.s_lo, anchors[0].first, reg.s_lo + tau, anchors[0].second);
      if (dist <= 0.0) continue;
      double best = 0.0;
      if (count <= budget) {
        for (std::size_t s = 0; s < times; ++s) {
          for (const auto& [i, j] : anchors) best = std::max(best, scorer.diff2(reg.s_lo + s, i, reg.s_lo + s + tau, j));
        }
        out.pairs += count;
      } else {
        std::mt19937_64 rng(mix(seed ^ mix(stratum)));
        std::uniform_int_distribution<std::size_t> pick(0, count - 1);
        for (std::size_t k = 0; k < budget; ++k) {
          const std::size_t q = pick(rng);
          const std::size_t s = q / anchors.size();
          const auto& [i, j] = anchors[q % anchors.size()];
          best = std::max(best, scorer.diff2(reg.s_lo + s, i, reg.s_lo + s + tau, j));
        }
        out.pairs += budget;
      }
      if (best > 0.0) out.value = std::max(out.value, std::sqrt(best) / std::pow(dist, scorer.alpha()));
    }
  }
  return out;
}

Region full_region(const SpaceTimeField& f, std::size_t first, std::size_t count) {
  if (first + count > f.snapshots()) throw std::out_of_range("snapshot window exceeds the recorded field");
  Region r;
  r.s_lo = first;
  r.count = count;
  r.mask.assign(f.nodes(), 1);
  r.nodes.resize(f.nodes());
  for (std::size_t i = 0; i < f.nodes(); ++i) r.nodes[i] = i;
  return r;
}

Region cylinder_region(const SpaceTimeField& f, const ParabolicCylinder& p) {
  p.validate();
  const auto slab = slab_snapshots(f, p.base.t, p.r);
  if (slab.back() < 0) throw std::runtime_error("Holder region reaches before the recorded window");
  Region r;
  r.s_lo = static_cast<std::size_t>(slab.back());
  r.count = slab.size();
  r.mask.assign(f.nodes(), 0);
  for (const auto& b : ball_nodes(f.grid(), p.base.x, p.r)) {
    r.mask[b.node] = 1;
    r.nodes.push_back(b.node);
  }
  std::sort(r.nodes.begin(), r.nodes.end());
  return r;
}

}  // namespace

HolderEstimate holder_estimate(const SpaceTimeField& f, double alpha, const std::optional<ParabolicCylinder>& region,
                               std::size_t pair_budget, std::uint64_t seed) {
  const Region reg = region ? cylinder_region(f, *region) : full_region(f, 0, f.snapshots());
  return estimate(f, alpha, reg, pair_budget, seed);
}

double holder_seminorm(const SpaceTimeField& f, double alpha, const std::optional<ParabolicCylinder>& region,
                       std::size_t pair_budget, std::uint64_t seed) {
  return holder_estimate(f, alpha, region, pair_budget, seed).value;
}

HolderEstimate holder_estimate_window(const SpaceTimeField& f, double alpha, std::size_t first, std::size_t count,
                                      std::size_t pair_budget, std::uint64_t seed) {
  return estimate(f, alpha, full_region(f, first, count), pair_budget, seed);
}

}  // namespace mspde
