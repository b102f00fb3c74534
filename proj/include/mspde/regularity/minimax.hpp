#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mspde/grid.hpp"

namespace mspde {

struct ChebyshevCenter {
  Vec2 center{};
  double radius = 0.0;
};

/// Minimum enclosing ball. d = 1: midpoint of [min, max]; d = 2: Welzl's
/// algorithm on a seeded shuffle.
ChebyshevCenter chebyshev_center(std::span<const Vec2> points, int dim, std::uint64_t seed = 0);

struct LinfFit {
  Eigen::VectorXd theta;
  double residual = 0.0;
  bool degenerate = false;
};

/// min_theta max_i |a_i . theta - y_i| by a dense simplex on the dual LP,
/// with rows added on demand starting from the largest least-squares
/// residuals. Rank-deficient designs fall back to least squares and set
/// `degenerate`.
LinfFit linf_regression(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

/// x -> B (x - x') + b with B symmetric.
struct AffineModel {
  Vec2 basepoint{};
  Matrix2 B{};
  Vec2 b{};

  Vec2 operator()(const Vec2& x_minus_basepoint, int dim) const;
};

/// A vector sample (one value per component) at chart offset x - x'.
struct FitSample {
  Vec2 offset{};
  Vec2 value{};
  double weight = 1.0;
};

struct AffineFitOptions {
  bool symmetric = true;
  /// Fixes b instead of fitting it.
  std::optional<Vec2> pinned_b;
};

struct AffineFit {
  AffineModel model;
  double residual = 0.0;
  bool degenerate = false;
};

/// min over (B, b) of max over samples and components of weight * |value - B offset - b|.
AffineFit affine_fit_minmax(std::span<const FitSample> samples, int dim, const Vec2& basepoint,
                            const AffineFitOptions& opt = {});

/// Scalar affine model x -> slope . (x - x') + offset.
struct ScalarAffineFit {
  Vec2 slope{};
  double offset = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

struct ScalarSample {
  Vec2 offset{};
  double value = 0.0;
};

ScalarAffineFit affine_fit_scalar(std::span<const ScalarSample> samples, int dim);

/// Number of free parameters of the vector fit.
std::size_t affine_parameter_count(int dim, bool symmetric, bool pinned_b);

}  // namespace mspde
