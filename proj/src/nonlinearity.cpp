#include "mspde/nonlinearity.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mspde {

Nonlinearity Nonlinearity::sine(int dim, double kappa) {
  if (!(kappa >= 0.0) || !(kappa < 1.0)) throw std::invalid_argument("sine family requires kappa in [0, 1)");
  if (dim != 1 && dim != 2) throw std::invalid_argument("nonlinearity dimension must be 1 or 2");
  Nonlinearity a;
  a.kind_ = FamilyKind::sine;
  a.dim_ = dim;
  a.kappa_ = kappa;
  a.lambda_ = (1.0 - kappa) / (1.0 + kappa);
  a.Lipschitz_ = kappa / (1.0 + kappa);
  return a;
}

Nonlinearity Nonlinearity::linear(int dim, const Matrix2& m) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("nonlinearity dimension must be 1 or 2");
  Matrix2 mm = m;
  if (dim == 1) {
    mm = Matrix2{{m(0, 0), 0.0, 0.0, 0.0}};
  } else if (m(0, 1) != m(1, 0)) {
    throw std::invalid_argument("linear-anisotropic matrix must be symmetric");
  }
  Nonlinearity a;
  a.kind_ = FamilyKind::linear_anisotropic;
  a.dim_ = dim;
  a.matrix_ = mm;
  a.lambda_ = min_eigenvalue_sym(mm, dim);
  a.Lipschitz_ = 0.0;
  return a;
}

std::string Nonlinearity::name() const {
  std::ostringstream os;
  if (kind_ == FamilyKind::sine) {
    os << "sine(kappa=" << kappa_ << ")";
  } else {
    os << "linear-anisotropic";
  }
  return os.str();
}

Vec2 Nonlinearity::eval(const Vec2& p) const {
  Vec2 out{};
  if (kind_ == FamilyKind::sine) {
    for (int i = 0; i < dim_; ++i) {
      const auto k = static_cast<std::size_t>(i);
      out[k] = (p[k] + kappa_ * std::sin(p[k])) / (1.0 + kappa_);
    }
  } else {
    for (int i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim_; ++j) acc += matrix_(i, j) * p[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
  }
  return out;
}

Matrix2 Nonlinearity::jac(const Vec2& p) const {
  if (kind_ == FamilyKind::linear_anisotropic) return matrix_;
  Matrix2 m;
  for (int i = 0; i < dim_; ++i) m(i, i) = (1.0 + kappa_ * std::cos(p[static_cast<std::size_t>(i)])) / (1.0 + kappa_);
  return m;
}

Matrix2 Nonlinearity::reference() const {
  if (kind_ == FamilyKind::linear_anisotropic) return matrix_;
  Matrix2 m;
  for (int i = 0; i < dim_; ++i) m(i, i) = 1.0;
  return m;
}

Vec2 Nonlinearity::remainder(const Vec2& p) const {
  if (kind_ == FamilyKind::linear_anisotropic) return {0.0, 0.0};
  Vec2 out{};
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    // (p + kappa sin p)/(1+kappa) - p = kappa (sin p - p)/(1+kappa)
    out[k] = kappa_ * (std::sin(p[k]) - p[k]) / (1.0 + kappa_);
  }
  return out;
}

Nonlinearity builtin_family(std::string_view kind, int dim, double kappa, const Matrix2& m) {
  if (kind == "sine") return Nonlinearity::sine(dim, kappa);
  if (kind == "linear-anisotropic" || kind == "linear") return Nonlinearity::linear(dim, m);
  throw std::invalid_argument("unknown nonlinearity family: " + std::string(kind));
}

double min_eigenvalue_sym(const Matrix2& m, int dim) {
  if (dim == 1) return m(0, 0);
  const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  return mean - rad;
}

double operator_norm(const Matrix2& m, int dim) {
  if (dim == 1) return std::abs(m(0, 0));
  // Largest singular value of a general 2x2 matrix.
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
  return std::sqrt(0.5 * (s1 + disc));
}

ValidationReport validate(const Nonlinearity& a, std::size_t probes, std::uint64_t seed, double box) {
  if (probes < 1) throw std::invalid_argument("validation needs at least one probe");
  const int d = a.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  auto draw = [&] {
    Vec2 p{};
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = u(rng);
    return p;
  };
  ValidationReport rep;
  rep.min_rayleigh = 1e300;
  const double tol = 1e-12;
  for (std::size_t k = 0; k < probes; ++k) {
    const Vec2 p = k == 0 ? Vec2{} : draw();
    const Vec2 q = draw();
    const Matrix2 jp = a.jac(p);
    const double ray = min_eigenvalue_sym(jp, d);
    const double op = operator_norm(jp, d);
    Matrix2 diff;
    const Matrix2 jq = a.jac(q);
    for (std::size_t i = 0; i < 4; ++i) diff.v[i] = jp.v[i] - jq.v[i];
    const double dist = std::hypot(p[0] - q[0], p[1] - q[1]);
    const double lip = dist > 0.0 ? operator_norm(diff, d) / dist : 0.0;
    if (ray < rep.min_rayleigh) rep.min_rayleigh = ray;
    if (op > rep.max_operator_norm) rep.max_operator_norm = op;
    if (lip > rep.max_lipschitz_quotient) rep.max_lipschitz_quotient = lip;
    if (!rep.witness) {
      if (ray < a.lambda() - tol) {
        rep.witness = p;
        rep.message = "ellipticity eta.DA eta >= lambda |eta|^2 violated";
      } else if (op > 1.0 + tol) {
        rep.witness = p;
        rep.message = "boundedness |DA eta| <= |eta| violated";
      } else if (lip > a.Lambda() + tol) {
        rep.witness = p;
        rep.witness_partner = q;
        rep.message = "Lipschitz bound |DA(p) - DA(q)| <= Lambda |p - q| violated";
      }
    }
  }
  if (!(a.lambda() > 0.0) && !rep.witness) {
    rep.message = "declared ellipticity constant must be positive";
    rep.witness = Vec2{};
  }
  rep.pass = !rep.witness.has_value();
  if (rep.pass) rep.message = "ok";
  return rep;
}

FrozenCoefficient freeze(const Nonlinearity& a, const Vec2& grad_u_at_z, const SpaceTimePoint& z) {
  return FrozenCoefficient{z, a.jac(grad_u_at_z)};
}

Matrix2 averaged_jacobian(const Nonlinearity& a, const Vec2& p, const Vec2& q) {
  if (a.is_linear()) return a.matrix();
  if (p == q) return a.jac(p);
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  Matrix2 acc;
  // Nodes on [-1, 1] mapped to theta = (1 + x)/2, weight w/2; the rule stores x >= 0 only.
  auto add = [&](double theta, double weight) {
    Vec2 g{};
    for (std::size_t i = 0; i < 2; ++i) g[i] = theta * q[i] + (1.0 - theta) * p[i];
    const Matrix2 j = a.jac(g);
    for (std::size_t i = 0; i < 4; ++i) acc.v[i] += 0.5 * weight * j.v[i];
  };
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) {
      add(0.5, w[k]);
    } else {
      add(0.5 * (1.0 + x[k]), w[k]);
      add(0.5 * (1.0 - x[k]), w[k]);
    }
  }
  return acc;
}

SpaceTimeField a_y(const Nonlinearity& a, const SpaceTimeField& grad_u, const LatticeShift& y) {
  const int d = a.dim();
  if (grad_u.components() != d) throw std::invalid_argument("a_y expects a gradient field with d components");
  const auto& g = grad_u.grid();
  SpaceTimeField out(g, d * d, grad_u.t0(), grad_u.time_step(), grad_u.snapshots());
  std::vector<std::size_t> partner(grad_u.nodes());
  for (std::size_t i = 0; i < partner.size(); ++i) partner[i] = shifted_node(g, i, y);
  for (std::size_t s = 0; s < grad_u.snapshots(); ++s) {
    for (std::size_t i = 0; i < grad_u.nodes(); ++i) {
      Vec2 p{}, q{};
      for (int c = 0; c < d; ++c) {
        p[static_cast<std::size_t>(c)] = grad_u.at(s, c, i);
        q[static_cast<std::size_t>(c)] = grad_u.at(s, c, partner[i]);
      }
      const Matrix2 m = y.is_zero() ? a.jac(p) : averaged_jacobian(a, p, q);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) out.at(s, r * d + c, i) = m(r, c);
      }
    }
  }
  return out;
}

}  // namespace mspde
