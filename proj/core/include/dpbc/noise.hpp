#pragma once

#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dpbc/polynomial.hpp"

namespace dpbc {

struct UniformNoise {
  double a;
  double b;
};

struct NormalNoise {
  double sigma;  // zero mean
};

/// One scalar disturbance component. Construction validates the parameters,
/// so a NoiseComponent is always well formed.
class NoiseComponent {
 public:
  static NoiseComponent uniform(double a, double b);
  static NoiseComponent normal(double sigma);

  const std::variant<UniformNoise, NormalNoise>& distribution() const { return dist_; }
  bool is_uniform() const { return std::holds_alternative<UniformNoise>(dist_); }

  /// Raw moment E[z^k].
  double moment(int k) const;
  double sample(std::mt19937_64& rng) const;
  std::string describe() const;

 private:
  explicit NoiseComponent(std::variant<UniformNoise, NormalNoise> d) : dist_(d) {}
  std::variant<UniformNoise, NormalNoise> dist_;
};

/// Independent noise components, one per noise variable.
class NoiseVector {
 public:
  NoiseVector() = default;
  explicit NoiseVector(std::vector<NoiseComponent> components)
      : components_(std::move(components)) {}

  int size() const { return static_cast<int>(components_.size()); }
  const NoiseComponent& operator[](int i) const { return components_.at(i); }
  const std::vector<NoiseComponent>& components() const { return components_; }

  void sample(std::mt19937_64& rng, std::span<double> out) const;

 private:
  std::vector<NoiseComponent> components_;
};

double moment(const NoiseComponent& c, int k);

/// Product of per-component moments (components are independent).
double monomial_moment(const NoiseVector& nv, std::span<const int> exps);

/// Replaces every noise monomial w^b by E[w^b]. The result lives in the same
/// VarSpace but uses state variables only.
Polynomial expect(const Polynomial& p, const NoiseVector& nv);

}  // namespace dpbc
