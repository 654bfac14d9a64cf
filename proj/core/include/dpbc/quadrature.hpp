#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dpbc/noise.hpp"

namespace dpbc {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
  double weight_sum() const;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);
/// Same rule mapped to [a, b] (weights scaled by (b - a) / 2).
QuadratureRule gauss_legendre(int n, double a, double b);

/// Interval carrying the component's mass: [a, b] for uniform noise and
/// [-k sigma, k sigma] for normal noise with k = truncation.
std::pair<double, double> noise_support(const NoiseComponent& c, double truncation);

/// Probability-weighted rule for one component: the support is split at the
/// given breakpoints (those strictly inside are used), each panel receives a
/// `nodes_per_panel` Gauss-Legendre rule weighted by the density, and the
/// weights are renormalised to sum to one.
QuadratureRule noise_rule(const NoiseComponent& c, int nodes_per_panel, double truncation,
                          std::span<const double> breakpoints = {});

}  // namespace dpbc
