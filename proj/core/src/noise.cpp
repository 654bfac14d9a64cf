#include "dpbc/noise.hpp"

#include <cmath>
#include <sstream>

#include "dpbc/error.hpp"

namespace dpbc {

NoiseComponent NoiseComponent::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
    throw InvalidInputError("uniform noise requires finite a < b");
  }
  return NoiseComponent(UniformNoise{a, b});
}

NoiseComponent NoiseComponent::normal(double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidInputError("normal noise requires sigma > 0");
  }
  return NoiseComponent(NormalNoise{sigma});
}

double NoiseComponent::moment(int k) const {
  if (k < 0) throw InvalidInputError("moment order must be non-negative");
  if (k == 0) return 1.0;
  if (const auto* u = std::get_if<UniformNoise>(&dist_)) {
    // (b^{k+1} - a^{k+1}) / ((k+1)(b-a)), summed as the geometric series
    // sum_{j=0}^{k} a^j b^{k-j} / (k+1) to avoid cancellation.
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += std::pow(u->a, j) * std::pow(u->b, k - j);
    return s / (k + 1);
  }
  const auto& n = std::get<NormalNoise>(dist_);
  if (k % 2 == 1) return 0.0;
  double double_factorial = 1.0;
  for (int i = k - 1; i > 1; i -= 2) double_factorial *= i;
  return double_factorial * std::pow(n.sigma, k);
}

double NoiseComponent::sample(std::mt19937_64& rng) const {
  if (const auto* u = std::get_if<UniformNoise>(&dist_)) {
    return std::uniform_real_distribution<double>(u->a, u->b)(rng);
  }
  return std::normal_distribution<double>(0.0, std::get<NormalNoise>(dist_).sigma)(rng);
}

std::string NoiseComponent::describe() const {
  std::ostringstream os;
  if (const auto* u = std::get_if<UniformNoise>(&dist_)) {
    os << "uniform[" << u->a << ", " << u->b << "]";
  } else {
    os << "normal(0, " << std::get<NormalNoise>(dist_).sigma << ")";
  }
  return os.str();
}

void NoiseVector::sample(std::mt19937_64& rng, std::span<double> out) const {
  for (int i = 0; i < size(); ++i) out[i] = components_[i].sample(rng);
}

double moment(const NoiseComponent& c, int k) { return c.moment(k); }

double monomial_moment(const NoiseVector& nv, std::span<const int> exps) {
  if (static_cast<int>(exps.size()) != nv.size()) {
    throw DimensionError("noise exponent vector length does not match noise dimension");
  }
  double r = 1.0;
  for (int i = 0; i < nv.size(); ++i) {
    if (exps[i] == 0) continue;
    const double mi = nv[i].moment(exps[i]);
    if (mi == 0.0) return 0.0;
    r *= mi;
  }
  return r;
}

Polynomial expect(const Polynomial& p, const NoiseVector& nv) {
  const VarSpace& sp = p.space();
  if (sp.noise_dim != nv.size()) {
    throw DimensionError("noise vector does not match the polynomial's noise dimension");
  }
  Polynomial::TermMap out;
  std::vector<int> noise_exps(sp.noise_dim);
  for (const auto& [m, c] : p.terms()) {
    for (int j = 0; j < sp.noise_dim; ++j) noise_exps[j] = m[sp.state_dim + j];
    const double mom = monomial_moment(nv, noise_exps);
    if (mom == 0.0) continue;
    std::vector<int> e(m.exponents());
    for (int j = 0; j < sp.noise_dim; ++j) e[sp.state_dim + j] = 0;
    out[Monomial(std::move(e))] += c * mom;
  }
  return Polynomial(sp, std::move(out));
}

}  // namespace dpbc
