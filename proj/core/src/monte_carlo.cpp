#include "dpbc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "dpbc/error.hpp"
#include "dpbc/parallel.hpp"

namespace dpbc {

namespace {

constexpr std::int64_t kShardSize = 1 << 16;

}  // namespace

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double confidence) {
  if (n <= 0) throw InvalidInputError("Wilson interval needs at least one trial");
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidInputError("confidence must be in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

MonteCarloResult monte_carlo(const SystemModel& model, std::span<const double> x0, Task task,
                             std::int64_t samples, std::uint64_t seed, double confidence) {
  if (samples < 1) throw InvalidInputError("Monte-Carlo needs at least one sample");
  const VarSpace& sp = model.space;
  if (static_cast<int>(x0.size()) != sp.state_dim) throw DimensionError("x0 has wrong dimension");
  const SemialgebraicSet& safe = model.region(RegionName::S);
  const SemialgebraicSet* goal = task == Task::ReachAvoid ? &model.region(RegionName::G) : nullptr;
  std::vector<CompiledPolynomial> dyn;
  for (const auto& f : model.dynamics) dyn.emplace_back(f);

  const auto shards = static_cast<int>((samples + kShardSize - 1) / kShardSize);
  std::vector<std::int64_t> hits(shards, 0);
  parallel_for(shards, [&](int s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    const std::int64_t begin = s * kShardSize;
    const std::int64_t end = std::min(samples, begin + kShardSize);
    const int n = sp.state_dim;
    std::vector<double> point(sp.size()), next(n);
    std::int64_t ok = 0;
    for (std::int64_t k = begin; k < end; ++k) {
      std::copy(x0.begin(), x0.end(), point.begin());
      bool satisfied = false;
      for (int t = 0;; ++t) {
        const std::span<const double> x(point.data(), n);
        if (goal && goal->contains(x)) {
          satisfied = true;
          break;
        }
        if (!safe.contains(x)) break;
        if (t == model.horizon) {
          satisfied = goal == nullptr;
          break;
        }
        model.noise.sample(rng, std::span<double>(point.data() + n, sp.noise_dim));
        for (int d = 0; d < n; ++d) next[d] = dyn[d](point);
        std::copy(next.begin(), next.end(), point.begin());
      }
      if (satisfied) ++ok;
    }
    hits[s] = ok;
  });

  MonteCarloResult r;
  r.samples = samples;
  for (auto h : hits) r.satisfied += h;
  r.estimate = static_cast<double>(r.satisfied) / static_cast<double>(samples);
  r.confidence = confidence;
  std::tie(r.ci_low, r.ci_high) = wilson_interval(r.satisfied, samples, confidence);
  return r;
}

}  // namespace dpbc
