#include "dpbc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dpbc/error.hpp"

namespace dpbc {

double QuadratureRule::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule r = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

std::pair<double, double> noise_support(const NoiseComponent& c, double truncation) {
  if (const auto* u = std::get_if<UniformNoise>(&c.distribution())) return {u->a, u->b};
  if (!(truncation > 0.0)) throw ConfigError("normal truncation must be positive");
  const double s = std::get<NormalNoise>(c.distribution()).sigma;
  return {-truncation * s, truncation * s};
}

QuadratureRule noise_rule(const NoiseComponent& c, int nodes_per_panel, double truncation,
                          std::span<const double> breakpoints) {
  const auto [lo, hi] = noise_support(c, truncation);
  std::vector<double> cuts{lo, hi};
  const double min_width = 1e-12 * (hi - lo);
  for (double b : breakpoints) {
    if (b > lo + min_width && b < hi - min_width) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= min_width; }),
             cuts.end());

  const QuadratureRule base = gauss_legendre(nodes_per_panel);
  QuadratureRule r;
  r.nodes.reserve(base.size() * (cuts.size() - 1));
  r.weights.reserve(r.nodes.capacity());
  const auto* normal = std::get_if<NormalNoise>(&c.distribution());
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < base.size(); ++i) {
      const double w = mid + half * base.nodes[i];
      double density;
      if (normal) {
        const double z = w / normal->sigma;
        density = std::exp(-0.5 * z * z) / (normal->sigma * std::sqrt(2.0 * std::numbers::pi));
      } else {
        density = 1.0 / (hi - lo);
      }
      r.nodes.push_back(w);
      r.weights.push_back(base.weights[i] * half * density);
    }
  }
  const double total = r.weight_sum();
  for (auto& w : r.weights) w /= total;
  return r;
}

}  // namespace dpbc
