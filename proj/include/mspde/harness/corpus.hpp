#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"

namespace mspde::harness {

/// A closed-form scalar field f(t, xi) on the chart xi = x - x' around the
/// corpus basepoint, with its analytic spatial gradient.
struct CorpusEntry {
  std::string name;
  std::function<double(double, const Vec2&)> f;
  std::function<Vec2(double, const Vec2&)> grad;
  /// Gradient is affine in space and constant in time.
  bool affine_gradient = false;
};

/// affine, quadratic, smoothed cusp, `random_fields` random trigonometric
/// fields and t sin(2 pi x_1), in that order.
std::vector<CorpusEntry> lemma_corpus(int dim, double alpha, int random_fields);

/// A corpus entry sampled at spacing dx in space and dx^2 in time on
/// [0, t_base], with the basepoint x' = (1/2, 1/2) at t_base = r_max^2 + 4 dx^2.
struct SampledEntry {
  SpaceTimeField f;
  SpaceTimeField grad;
  SpaceTimePoint z;
};
SampledEntry sample_entry(const CorpusEntry& e, int dim, int n, double r_max);

}  // namespace mspde::harness
