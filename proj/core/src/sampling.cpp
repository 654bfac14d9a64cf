#include "dpbc/sampling.hpp"

#include <cmath>
#include <random>

#include "dpbc/error.hpp"

namespace dpbc {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

void PointSet::push_back(std::span<const double> p) {
  if (static_cast<int>(p.size()) != dim_) throw DimensionError("point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shift_(dim) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes))) {
    throw DimensionError("Halton sequence supports 1..12 dimensions");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : shift_) s = seed == 0 ? 0.0 : u(rng);
}

void HaltonSequence::point(std::uint64_t index, std::span<double> out) const {
  for (int d = 0; d < dim_; ++d) {
    double v = radical_inverse(index + 1, kPrimes[d]) + shift_[d];
    out[d] = v - std::floor(v);
  }
}

PointSet sample_box(const Box& box, int count, std::uint64_t seed) {
  const int n = box.dim();
  HaltonSequence seq(n, seed);
  PointSet pts(n);
  std::vector<double> u(n), x(n);
  for (int i = 0; i < count; ++i) {
    seq.point(static_cast<std::uint64_t>(i), u);
    for (int d = 0; d < n; ++d) x[d] = box.lower[d] + (box.upper[d] - box.lower[d]) * u[d];
    pts.push_back(x);
  }
  return pts;
}

PointSet sample_region(const SemialgebraicSet& set, const Box& box, int target,
                       std::uint64_t seed, int max_candidates) {
  const int n = box.dim();
  if (max_candidates <= 0) max_candidates = 50 * target;
  HaltonSequence seq(n, seed);
  PointSet pts(n);
  std::vector<double> u(n), x(n);
  for (int i = 0; i < max_candidates && pts.size() < target; ++i) {
    seq.point(static_cast<std::uint64_t>(i), u);
    for (int d = 0; d < n; ++d) x[d] = box.lower[d] + (box.upper[d] - box.lower[d]) * u[d];
    if (set.contains(x)) pts.push_back(x);
  }
  return pts;
}

}  // namespace dpbc
