#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"

namespace mspde {

struct RegularityParams {
  double alpha = 0.75;
  double r_min = 0.0;  ///< 0 selects 4 dx
  double r_max = 0.25;
  std::size_t pair_budget = 100000;
  /// Cap on lattice shifts y examined per radius.
  std::size_t shift_budget = 64;
  std::uint64_t seed = 1;

  std::vector<double> radii(const GridSpec& grid) const;
  void validate() const;
};

struct HolderEstimate {
  double value = 0.0;
  std::size_t pairs = 0;
  bool exhaustive = false;
};

/// Parabolic Holder seminorm sup |f(z) - f(z')| / d(z, z')^alpha over samples,
/// Euclidean in the components.
///
/// Every pair is visited when the sample has at most pair_budget pairs.
/// Otherwise pairs are stratified by time lag (in snapshots) and lattice offset
/// along the axes and diagonals, both taken from 1, 2, 3, 4, 6, 8, 12, ...,
/// with up to pair_budget seeded anchors per stratum; the result is then a
/// lower bound of the discrete sup.
HolderEstimate holder_estimate(const SpaceTimeField& f, double alpha, const std::optional<ParabolicCylinder>& region = {},
                               std::size_t pair_budget = 100000, std::uint64_t seed = 1);

double holder_seminorm(const SpaceTimeField& f, double alpha, const std::optional<ParabolicCylinder>& region = {},
                       std::size_t pair_budget = 100000, std::uint64_t seed = 1);

/// Holder seminorm restricted to snapshots [first, first + count).
HolderEstimate holder_estimate_window(const SpaceTimeField& f, double alpha, std::size_t first, std::size_t count,
                                      std::size_t pair_budget = 100000, std::uint64_t seed = 1);

}  // namespace mspde
