#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"

namespace mspde {

enum class FamilyKind { sine, linear_anisotropic };

/// An elliptic flux A: R^d -> R^d with analytic Jacobian DA.
///
/// Declared constants: lambda (ellipticity), Lambda (Lipschitz constant of DA);
/// |DA(p) eta| <= |eta| is the normalization. `validate` certifies them on probes.
class Nonlinearity {
 public:
  /// A(p)_i = (p_i + kappa sin p_i) / (1 + kappa), kappa in [0, 1).
  static Nonlinearity sine(int dim, double kappa);
  /// A(p) = M p with M symmetric.
  static Nonlinearity linear(int dim, const Matrix2& m);

  FamilyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  const Matrix2& matrix() const { return matrix_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lipschitz_; }
  bool is_linear() const { return kind_ == FamilyKind::linear_anisotropic; }
  std::string name() const;

  Vec2 eval(const Vec2& p) const;
  Matrix2 jac(const Vec2& p) const;

  /// Constant matrix treated implicitly by the solver: DA(0).
  Matrix2 reference() const;
  /// A(p) - reference() p; identically zero for linear fluxes.
  Vec2 remainder(const Vec2& p) const;

 private:
  FamilyKind kind_ = FamilyKind::sine;
  int dim_ = 1;
  double kappa_ = 0.0;
  Matrix2 matrix_ = Matrix2::identity();
  double lambda_ = 1.0;
  double Lipschitz_ = 0.0;
};

/// Selects a family by name ("sine" or "linear-anisotropic").
Nonlinearity builtin_family(std::string_view kind, int dim, double kappa, const Matrix2& m = Matrix2::identity());

struct ValidationReport {
  bool pass = false;
  double min_rayleigh = 0.0;
  double max_operator_norm = 0.0;
  double max_lipschitz_quotient = 0.0;
  std::optional<Vec2> witness;
  std::optional<Vec2> witness_partner;
  std::string message;
};

/// Probes the assumptions on random gradients in [-box, box]^d.
ValidationReport validate(const Nonlinearity& a, std::size_t probes, std::uint64_t seed = 1, double box = 5.0);

/// Symmetric 2x2 / 1x1 helpers.
double min_eigenvalue_sym(const Matrix2& m, int dim);
double operator_norm(const Matrix2& m, int dim);

struct FrozenCoefficient {
  SpaceTimePoint z;
  Matrix2 a;
};

/// a(t', x') = DA(grad u(t', x')).
FrozenCoefficient freeze(const Nonlinearity& a, const Vec2& grad_u_at_z, const SpaceTimePoint& z = {});

/// a_y(t,x) = int_0^1 DA(theta grad u(t,x+y) + (1-theta) grad u(t,x)) dtheta,
/// by 8-point Gauss-Legendre. Output has d*d components (row-major).
SpaceTimeField a_y(const Nonlinearity& a, const SpaceTimeField& grad_u, const LatticeShift& y);

/// The same average for one pair of gradients.
Matrix2 averaged_jacobian(const Nonlinearity& a, const Vec2& p, const Vec2& q);

}  // namespace mspde
