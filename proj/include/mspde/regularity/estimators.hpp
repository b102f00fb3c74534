#pragma once

#include <cstdint>
#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"
#include "mspde/nonlinearity.hpp"
#include "mspde/regularity/holder.hpp"

namespace mspde {

/// Spatial ball at the basepoint time, or the full parabolic cylinder.
enum class Extent { space, space_time };

/// A basepoint resolved to the snapshot x node lattice of a field.
struct LatticePoint {
  long snapshot = 0;
  std::size_t node = 0;
};

/// Throws std::invalid_argument if z is not a snapshot time and grid node of f.
LatticePoint locate(const SpaceTimeField& f, const SpaceTimePoint& z);

/// Lattice shifts 0 < |y| <= l. When there are more than `budget`, the
/// extreme shifts along axes and diagonals are kept and the rest are drawn
/// with the given seed.
std::vector<LatticeShift> shifts_within(const GridSpec& grid, double l, std::size_t budget, std::uint64_t seed);

/// sup_l l^{-2 alpha} sup_{|y| <= l} inf_k |grad delta_y f - k| over B_l(x') or P_l(z),
/// with l on the dyadic radii and k the Chebyshev centre.
double increment_constant_N(const SpaceTimeField& grad_f, const SpaceTimePoint& z, const RegularityParams& params,
                            Extent extent = Extent::space);

/// sup_r r^{-2 alpha} inf_{B, b} |grad f - B(x - x') - b| over B_r(x') or P_r(z).
double affine_constant(const SpaceTimeField& grad_f, const SpaceTimePoint& z, const RegularityParams& params,
                       Extent extent = Extent::space);

/// sum_{i=0..d} sup_r r^{1 - 2 alpha} sup_{|y| <= r} |d_t (delta_y f)_{r,i}| over P_r(z).
/// d_t by centred differences between neighbouring snapshots (one-sided at
/// the ends of the record).
double spacetime_fit_time_terms(const SpaceTimeField& f, const SpaceTimePoint& z, const RegularityParams& params);

struct IncrementFitPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = inf_aff |delta_y f - aff| over P_l(z); rhs = |y| inf_B |grad f - B_x'| over P_2l(z).
IncrementFitPair increment_fit_pair(const SpaceTimeField& f, const SpaceTimeField& grad_f, const SpaceTimePoint& z,
                     const LatticeShift& y, double l);

/// g = (a_y - a(z)) grad delta_y u with a(z) = DA(grad u(z)).
SpaceTimeField compute_g(const Nonlinearity& a, const SpaceTimeField& grad_u, const LatticeShift& y,
                         const SpaceTimePoint& z);

}  // namespace mspde
