#include "mspde/regularity/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mspde {

namespace {

// ---- dense two-phase simplex, Bland's rule -------------------------------

/// min c.x subject to A x = b, x >= 0, b >= 0. Returns the simplex
/// multipliers pi (so that c - A^T pi >= 0 at the optimum).
struct SimplexResult {
  bool ok = false;
  Eigen::VectorXd pi;
  double value = 0.0;
};

SimplexResult simplex_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const auto rows = a.rows();
  const auto n = a.cols();
  const auto width = n + rows + 1;  // structural, artificial, rhs
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows, width);
  t.leftCols(n) = a;
  t.block(0, n, rows, rows) = Eigen::MatrixXd::Identity(rows, rows);
  t.col(width - 1) = b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double eps = 1e-11;
  auto pivot = [&](Eigen::Index r, Eigen::Index col) {
    const double piv = t(r, col);
    t.row(r) /= piv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double f = t(i, col);
      if (i != r && f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = col;
  };
  auto run = [&](const Eigen::VectorXd& cost, Eigen::Index allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::VectorXd cb(rows);
      for (Eigen::Index i = 0; i < rows; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        const double red = cost(j) - cb.dot(t.col(j));
        if (red < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (t(i, enter) > eps) {
          const double ratio = t(i, width - 1) / t(i, enter);
          if (ratio < best - 1e-15 ||
              (ratio <= best + 1e-15 && leave >= 0 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    return false;
  };

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(width - 1);
  phase1.segment(n, rows).setOnes();
  if (!run(phase1, width - 1)) return {};
  // Drive remaining artificials out of the basis.
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n) continue;
    if (std::abs(t(i, width - 1)) > 1e-9) return {};  // infeasible
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col < 0) return {};  // redundant row
    pivot(i, col);
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(width - 1);
  cost.head(n) = c;
  if (!run(cost, n)) return {};

  Eigen::MatrixXd bm(rows, rows);
  Eigen::VectorXd cb(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    bm.col(i) = a.col(basis[static_cast<std::size_t>(i)]);
    cb(i) = c(basis[static_cast<std::size_t>(i)]);
  }
  SimplexResult res;
  res.pi = bm.transpose().fullPivLu().solve(cb);
  res.value = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) res.value += cb(i) * t(i, width - 1);
  res.ok = true;
  return res;
}

/// Chebyshev fit on a subset of rows via the dual LP.
std::optional<Eigen::VectorXd> linf_on_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                            const std::vector<Eigen::Index>& rows) {
  const auto p = a.cols();
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd eq(p + 1, 2 * m);
  Eigen::VectorXd cost(2 * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto r = rows[static_cast<std::size_t>(j)];
    eq.block(0, j, p, 1) = a.row(r).transpose();
    eq.block(0, m + j, p, 1) = -a.row(r).transpose();
    eq(p, j) = 1.0;
    eq(p, m + j) = 1.0;
    cost(j) = -y(r);
    cost(m + j) = y(r);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
  rhs(p) = 1.0;
  const auto res = simplex_min(eq, rhs, cost);
  if (!res.ok) return std::nullopt;
  return Eigen::VectorXd(-res.pi.head(p));
}

Eigen::Index rank_of(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  return qr.rank();
}

double max_abs_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& theta) {
  return (a * theta - y).cwiseAbs().maxCoeff();
}

}  // namespace

LinfFit linf_regression(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& y_in) {
  const auto m = a_in.rows();
  const auto p = a_in.cols();
  if (y_in.size() != m) throw std::invalid_argument("linf_regression: size mismatch");
  if (m < p + 1) throw std::invalid_argument("linf_regression: need more rows than parameters");
  LinfFit out;
  if (p == 0) {
    out.theta = Eigen::VectorXd(0);
    out.residual = y_in.cwiseAbs().maxCoeff();
    return out;
  }

  // Column and value scaling for a well-conditioned tableau.
  Eigen::VectorXd colscale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double s = a_in.col(j).cwiseAbs().maxCoeff();
    colscale(j) = s > 0.0 ? s : 1.0;
  }
  const double yscale_raw = y_in.cwiseAbs().maxCoeff();
  const double yscale = yscale_raw > 0.0 ? yscale_raw : 1.0;
  const Eigen::MatrixXd a = a_in * colscale.cwiseInverse().asDiagonal();
  const Eigen::VectorXd y = y_in / yscale;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-10);
  const Eigen::VectorXd ls = cod.solve(y);
  auto finish = [&](const Eigen::VectorXd& theta_scaled, bool degenerate) {
    out.theta = theta_scaled.cwiseQuotient(colscale) * yscale;
    out.residual = max_abs_residual(a_in, y_in, out.theta);
    out.degenerate = degenerate;
    return out;
  };
  if (cod.rank() < p) return finish(ls, true);

  const Eigen::VectorXd lsres = (a * ls - y).cwiseAbs();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return lsres(i) > lsres(j); });
  const auto initial = std::min<Eigen::Index>(m, 3 * (p + 1));
  std::vector<Eigen::Index> work(order.begin(), order.begin() + initial);
  std::vector<unsigned char> in(static_cast<std::size_t>(m), 0);
  for (auto r : work) in[static_cast<std::size_t>(r)] = 1;
  auto subset_rank = [&] {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(work.size()), p);
    for (std::size_t k = 0; k < work.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = a.row(work[k]);
    return rank_of(sub);
  };
  // Spread extra rows until the working design has full rank.
  for (Eigen::Index stride = std::max<Eigen::Index>(1, m / (4 * (p + 1))); subset_rank() < p;) {
    bool added = false;
    for (Eigen::Index r = 0; r < m; r += stride) {
      if (!in[static_cast<std::size_t>(r)]) {
        in[static_cast<std::size_t>(r)] = 1;
        work.push_back(r);
        added = true;
      }
    }
    if (stride == 1 && !added) break;
    stride = std::max<Eigen::Index>(1, stride / 2);
  }

  Eigen::VectorXd theta = ls;
  for (int iter = 0; iter < 200; ++iter) {
    const auto sol = linf_on_rows(a, y, work);
    if (!sol) return finish(ls, true);
    theta = *sol;
    const Eigen::VectorXd res = (a * theta - y).cwiseAbs();
    double work_max = 0.0;
    for (auto r : work) work_max = std::max(work_max, res(r));
    std::vector<Eigen::Index> viol;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (!in[static_cast<std::size_t>(r)] && res(r) > work_max * (1.0 + 1e-10) + 1e-14) viol.push_back(r);
    }
    if (viol.empty()) return finish(theta, false);
    std::stable_sort(viol.begin(), viol.end(), [&](Eigen::Index i, Eigen::Index j) { return res(i) > res(j); });
    viol.resize(std::min<std::size_t>(viol.size(), static_cast<std::size_t>(2 * (p + 1))));
    for (auto r : viol) {
      in[static_cast<std::size_t>(r)] = 1;
      work.push_back(r);
    }
  }
  throw std::runtime_error("linf_regression: constraint generation did not converge");
}

Vec2 AffineModel::operator()(const Vec2& x, int dim) const {
  Vec2 out{};
  for (int i = 0; i < dim; ++i) {
    double acc = b[static_cast<std::size_t>(i)];
    for (int j = 0; j < dim; ++j) acc += B(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::size_t affine_parameter_count(int dim, bool symmetric, bool pinned_b) {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t nb = symmetric ? d * (d + 1) / 2 : d * d;
  return nb + (pinned_b ? 0 : d);
}

AffineFit affine_fit_minmax(std::span<const FitSample> samples, int dim, const Vec2& basepoint,
                            const AffineFitOptions& opt) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("affine fit supports d = 1, 2");
  const auto d = static_cast<Eigen::Index>(dim);
  const bool pinned = opt.pinned_b.has_value();
  const auto p = static_cast<Eigen::Index>(affine_parameter_count(dim, opt.symmetric, pinned));
  const auto nb = p - (pinned ? 0 : d);
  const auto rows = static_cast<Eigen::Index>(samples.size()) * d;
  if (rows < p + 1 || samples.size() < affine_parameter_count(dim, true, false) + 1) {
    throw std::invalid_argument("affine fit needs at least d(d+1)/2 + d + 1 samples");
  }
  // Index of B(i, j) inside the parameter vector.
  auto bidx = [&](Eigen::Index i, Eigen::Index j) -> Eigen::Index {
    if (dim == 1) return 0;
    if (!opt.symmetric) return 2 * i + j;
    if (i == j) return i == 0 ? 0 : 2;
    return 1;
  };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, p);
  Eigen::VectorXd y(rows);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& smp = samples[s];
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index r = static_cast<Eigen::Index>(s) * d + c;
      for (Eigen::Index j = 0; j < d; ++j) a(r, bidx(c, j)) += smp.weight * smp.offset[static_cast<std::size_t>(j)];
      double target = smp.value[static_cast<std::size_t>(c)];
      if (pinned) {
        target -= (*opt.pinned_b)[static_cast<std::size_t>(c)];
      } else {
        a(r, nb + c) = smp.weight;
      }
      y(r) = smp.weight * target;
    }
  }
  const LinfFit fit = linf_regression(a, y);
  AffineFit out;
  out.model.basepoint = basepoint;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.model.B(static_cast<int>(i), static_cast<int>(j)) = fit.theta(bidx(i, j));
    out.model.b[static_cast<std::size_t>(i)] = pinned ? (*opt.pinned_b)[static_cast<std::size_t>(i)] : fit.theta(nb + i);
  }
  out.residual = fit.residual;
  out.degenerate = fit.degenerate;
  return out;
}

ScalarAffineFit affine_fit_scalar(std::span<const ScalarSample> samples, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("affine fit supports d = 1, 2");
  const auto d = static_cast<Eigen::Index>(dim);
  const auto m = static_cast<Eigen::Index>(samples.size());
  if (m < d + 2) throw std::invalid_argument("scalar affine fit needs at least d + 2 samples");
  Eigen::MatrixXd a(m, d + 1);
  Eigen::VectorXd y(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index j = 0; j < d; ++j) a(s, j) = samples[static_cast<std::size_t>(s)].offset[static_cast<std::size_t>(j)];
    a(s, d) = 1.0;
    y(s) = samples[static_cast<std::size_t>(s)].value;
  }
  const LinfFit fit = linf_regression(a, y);
  ScalarAffineFit out;
  for (Eigen::Index j = 0; j < d; ++j) out.slope[static_cast<std::size_t>(j)] = fit.theta(j);
  out.offset = fit.theta(d);
  out.residual = fit.residual;
  out.degenerate = fit.degenerate;
  return out;
}

namespace {

struct Circle {
  Vec2 c;
  double r;
};

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

bool inside(const Circle& c, const Vec2& p) { return dist(c.c, p) <= c.r * (1.0 + 1e-12) + 1e-300; }

Circle from2(const Vec2& a, const Vec2& b) {
  return {{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}, 0.5 * dist(a, b)};
}

Circle from3(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double bx = b[0] - a[0], by = b[1] - a[1];
  const double cx = c[0] - a[0], cy = c[1] - a[1];
  const double det = 2.0 * (bx * cy - by * cx);
  const double scale = std::max({bx * bx + by * by, cx * cx + cy * cy, 1e-300});
  if (std::abs(det) <= 1e-14 * scale) {
    // Collinear: the widest pair spans the others.
    Circle best = from2(a, b);
    for (const Circle& cand : {from2(a, c), from2(b, c)}) {
      if (cand.r > best.r) best = cand;
    }
    return best;
  }
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / det;
  const double uy = (bx * c2 - cx * b2) / det;
  return {{a[0] + ux, a[1] + uy}, std::hypot(ux, uy)};
}

}  // namespace

ChebyshevCenter chebyshev_center(std::span<const Vec2> points, int dim, std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("chebyshev_center needs at least one point");
  ChebyshevCenter out;
  if (dim == 1) {
    double lo = points[0][0], hi = points[0][0];
    for (const auto& p : points) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    out.center = {0.5 * (lo + hi), 0.0};
    out.radius = 0.5 * (hi - lo);
    return out;
  }
  if (dim != 2) throw std::invalid_argument("chebyshev_center supports d = 1, 2");
  std::vector<Vec2> p(points.begin(), points.end());
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (inside(c, p[i])) continue;
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, p[j])) continue;
      c = from2(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!inside(c, p[k])) c = from3(p[i], p[j], p[k]);
      }
    }
  }
  out.center = c.c;
  for (const auto& q : p) out.radius = std::max(out.radius, dist(c.c, q));
  return out;
}

}  // namespace mspde
