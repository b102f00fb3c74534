#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"
#include "mspde/regularity/minimax.hpp"

namespace mspde {

struct RadiusEntry {
  double r = 0.0;
  double residual = 0.0;
  /// r^{-2 alpha} * residual
  double scaled = 0.0;
  AffineModel model;
  std::size_t samples = 0;
  bool degenerate = false;
};

/// Ordinary least squares of log(value) against log(r). Empty when fewer than
/// `min_points` points are given or any value is not positive.
std::optional<double> loglog_slope(std::span<const double> radii, std::span<const double> values,
                                   std::size_t min_points = 4);

struct RemainderOptions {
  double alpha = 0.75;
  std::vector<double> radii;
  /// Residuals at or below this are treated as exact zeros.
  double exact_tolerance = 1e-9;
};

struct BasepointReport {
  SpaceTimePoint z;
  Vec2 grad_u{};
  Vec2 grad_w{};
  /// b pinned to grad w(z); source of the reported slope.
  std::vector<RadiusEntry> pinned;
  /// b fitted freely; used for the b-recovery and B-stability checks.
  std::vector<RadiusEntry> free_b;
  std::optional<double> slope;
  std::optional<double> free_slope;
  /// max_r r^{-2 alpha} residual(r), each r with its own B.
  double M_z = 0.0;
  /// inf_B max_r r^{-2 alpha} |grad w - B_x'| over P_r(z): one B for all radii.
  double M_z_joint = 0.0;
  AffineModel joint_model;
  /// |b_free(r_min) - grad w(z)| and the free residual at r_min.
  double b_recovery_distance = 0.0;
  double b_recovery_residual = 0.0;
  /// max entry of |B_free(r) - B_free(r_min)| per radius, and the smallest C
  /// with drift(r) <= C r^{2 alpha - 1}.
  std::vector<double> B_drift;
  double B_drift_constant = 0.0;
  /// Every residual is at or below the exact tolerance.
  bool exact = false;
};

/// Remainder of the model grad v_{a(z)} for grad u on P_r(z) at each radius.
/// The fields may start at different times but must share grid and snapshot spacing.
BasepointReport modelling_remainder(const SpaceTimeField& grad_u, const SpaceTimeField& grad_v_a,
                                    const SpaceTimePoint& z, const RemainderOptions& opt);

struct BaselineResult {
  std::vector<double> radii;
  /// sup over P_r(z) of |grad u - grad u(z)|
  std::vector<double> remainder;
  std::optional<double> slope;
  bool degenerate = false;
};

BaselineResult baseline_remainder(const SpaceTimeField& grad_u, const SpaceTimePoint& z, const std::vector<double>& radii);

}  // namespace mspde
