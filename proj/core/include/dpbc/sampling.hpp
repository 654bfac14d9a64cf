#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpbc/system_model.hpp"

namespace dpbc {

/// Flat list of points of a fixed dimension.
class PointSet {
 public:
  explicit PointSet(int dim = 1) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return dim_ == 0 ? 0 : static_cast<int>(coords_.size()) / dim_; }
  bool empty() const { return coords_.empty(); }
  std::span<const double> operator[](int i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }
  void push_back(std::span<const double> p);

 private:
  int dim_;
  std::vector<double> coords_;
};

/// Halton sequence in [0,1)^dim with a seeded Cranley-Patterson rotation.
/// Deterministic for a given (dim, seed).
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  void point(std::uint64_t index, std::span<double> out) const;

 private:
  int dim_;
  std::vector<double> shift_;
};

PointSet sample_box(const Box& box, int count, std::uint64_t seed);

/// Up to `target` low-discrepancy points of `box` that lie in `set`; at most
/// `max_candidates` box points are tried (default 50 * target).
PointSet sample_region(const SemialgebraicSet& set, const Box& box, int target,
                       std::uint64_t seed, int max_candidates = 0);

}  // namespace dpbc
