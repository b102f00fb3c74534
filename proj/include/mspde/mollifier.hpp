#pragma once

#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"

namespace mspde {

/// Discrete samples of the standard bump psi(x) = c exp(-1/(1-|x|^2)) at scale r.
///
/// f_r = f * psi_r and f_{r,i} = f * (d_i psi)_r with psi_r(x) = r^{-d} psi(x/r).
/// Note f_{r,i} = r d_i f_r. The sampled kernels are renormalized: psi_r to unit
/// mass, (d_i psi)_r so that affine functions are reproduced exactly
/// (f_{r,i} = r d_i f for affine f).
class Mollifier {
 public:
  struct Tap {
    LatticeShift shift;  ///< f is read at x + shift
    double weight;
  };

  Mollifier(const GridSpec& grid, double r);

  double r() const { return r_; }
  const GridSpec& grid() const { return grid_; }
  /// which == 0: psi_r; which == i in 1..d: (d_i psi)_r.
  const std::vector<Tap>& taps(int which) const { return taps_[static_cast<std::size_t>(which)]; }

  /// Unnormalized profile exp(-1/(1-|x|^2)) on the unit ball, zero outside.
  static double profile(const Vec2& x);

 private:
  GridSpec grid_;
  double r_;
  std::vector<std::vector<Tap>> taps_;
};

SpaceTimeField mollify(const SpaceTimeField& f, double r);
/// axis in 1..d, matching f_{r,i}.
SpaceTimeField mollify_deriv(const SpaceTimeField& f, double r, int axis);

/// Mollified value of component c at one node of one snapshot.
double mollify_at(const SpaceTimeField& f, const Mollifier& m, int which, long snapshot, int c, std::size_t node);

}  // namespace mspde
