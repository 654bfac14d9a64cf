#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "dpbc/system_model.hpp"

namespace dpbc {

/// Satisfaction estimate for a safety or reach-avoid specification.
struct MonteCarloResult {
  std::int64_t samples = 0;
  std::int64_t satisfied = 0;
  double estimate = 0.0;  // SA or RA
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;

  /// Interval for the complement (e.g. the unsafe probability 1 - SA).
  std::pair<double, double> complement_interval() const { return {1.0 - ci_high, 1.0 - ci_low}; }
};

/// Wilson score interval for k successes out of n trials.
std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double confidence);

/// Simulates `samples` trajectories of length model.horizon from x0. Work is
/// split into fixed-size shards whose RNG seeds derive from (seed, shard), so
/// the result does not depend on the thread count.
MonteCarloResult monte_carlo(const SystemModel& model, std::span<const double> x0, Task task,
                             std::int64_t samples, std::uint64_t seed, double confidence = 0.99);

}  // namespace dpbc
