#include "dpbc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dpbc/error.hpp"

namespace dpbc {

VarSpace::VarSpace(int n, int m) : state_dim(n), noise_dim(m) {
  if (n < 1) throw DimensionError("state dimension must be at least 1");
  if (m < 0) throw DimensionError("noise dimension must be non-negative");
}

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw InvalidInputError("monomial exponents must be non-negative");
    degree_ += e;
  }
}

Monomial Monomial::variable(int nvars, int var, int power) {
  std::vector<int> e(nvars, 0);
  e.at(var) = power;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (nvars() != other.nvars()) throw DimensionError("monomial variable count mismatch");
  std::vector<int> e(exps_);
  for (int i = 0; i < nvars(); ++i) e[i] += other.exps_[i];
  return Monomial(std::move(e));
}

bool Monomial::divides(const Monomial& other) const {
  if (nvars() != other.nvars()) return false;
  for (int i = 0; i < nvars(); ++i) {
    if (exps_[i] > other.exps_[i]) return false;
  }
  return true;
}

double Monomial::eval(std::span<const double> point) const {
  double v = 1.0;
  for (int i = 0; i < nvars(); ++i) {
    for (int k = 0; k < exps_[i]; ++k) v *= point[i];
  }
  return v;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  // Higher power of an earlier variable sorts first.
  for (std::size_t i = 0; i < std::min(a.exps_.size(), b.exps_.size()); ++i) {
    if (auto c = b.exps_[i] <=> a.exps_[i]; c != 0) return c;
  }
  return a.exps_.size() <=> b.exps_.size();
}

namespace {

void enumerate_degree(int var, int remaining, std::vector<int>& current,
                      const std::vector<bool>& active, std::vector<Monomial>& out) {
  const int nvars = static_cast<int>(current.size());
  if (var == nvars) {
    if (remaining == 0) out.emplace_back(current);
    return;
  }
  const int max_here = active[var] ? remaining : 0;
  for (int e = max_here; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(var + 1, remaining - e, current, active, out);
  }
  current[var] = 0;
}

}  // namespace

std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree,
                                             const std::vector<bool>& active) {
  if (static_cast<int>(active.size()) != nvars) {
    throw DimensionError("active-variable mask has wrong length");
  }
  std::vector<Monomial> out;
  std::vector<int> current(nvars, 0);
  for (int d = 0; d <= max_degree; ++d) enumerate_degree(0, d, current, active, out);
  return out;
}

std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree) {
  return monomials_up_to_degree(nvars, max_degree, std::vector<bool>(nvars, true));
}

Polynomial::Polynomial(VarSpace space) : space_(space) {}

Polynomial::Polynomial(VarSpace space, TermMap terms) : space_(space) {
  for (auto& [m, c] : terms) {
    if (m.nvars() != space_.size()) {
      throw DimensionError("monomial has " + std::to_string(m.nvars()) +
                           " exponents, variable space has " + std::to_string(space_.size()));
    }
    if (!std::isfinite(c)) throw InvalidInputError("polynomial coefficient is not finite");
    if (c != 0.0) terms_.emplace(m, c);
  }
}

Polynomial Polynomial::constant(VarSpace space, double c) {
  return monomial(space, Monomial::one(space.size()), c);
}

Polynomial Polynomial::variable(VarSpace space, int var) {
  if (var < 0 || var >= space.size()) throw DimensionError("variable index out of range");
  return monomial(space, Monomial::variable(space.size(), var));
}

Polynomial Polynomial::monomial(VarSpace space, const Monomial& m, double c) {
  TermMap t;
  t.emplace(m, c);
  return Polynomial(space, std::move(t));
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  // Graded order: the last term has maximal degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

int Polynomial::state_degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [m, c] : terms_) {
    int ds = 0;
    for (int i = 0; i < space_.state_dim; ++i) ds += m[i];
    d = std::max(d, ds);
  }
  return d;
}

bool Polynomial::uses_noise() const {
  for (const auto& [m, c] : terms_) {
    for (int i = space_.state_dim; i < space_.size(); ++i) {
      if (m[i] != 0) return true;
    }
  }
  return false;
}

void Polynomial::check_same_space(const Polynomial& q, const char* op) const {
  if (space_ != q.space_) {
    throw DimensionError(std::string(op) + ": operands live in different variable spaces");
  }
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  check_same_space(q, "add");
  TermMap t = terms_;
  for (const auto& [m, c] : q.terms_) {
    auto [it, inserted] = t.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) t.erase(it);
    }
  }
  Polynomial r(space_);
  r.terms_ = std::move(t);
  return r;
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator-(const Polynomial& q) const { return *this + (-q); }

Polynomial Polynomial::operator*(double c) const {
  Polynomial r(space_);
  if (c == 0.0) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), m, v * c);
  return r;
}

Polynomial Polynomial::operator+(double c) const { return *this + constant(space_, c); }

Polynomial Polynomial::operator*(const Polynomial& q) const {
  check_same_space(q, "mul");
  TermMap t;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : q.terms_) {
      t[ma * mb] += ca * cb;
    }
  }
  std::erase_if(t, [](const auto& kv) { return kv.second == 0.0; });
  Polynomial r(space_);
  r.terms_ = std::move(t);
  return r;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw InvalidInputError("negative polynomial power");
  Polynomial result = constant(space_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

double Polynomial::eval(std::span<const double> point) const {
  const auto len = static_cast<int>(point.size());
  if (len != space_.size()) {
    if (!(len == space_.state_dim && !uses_noise())) {
      throw DimensionError("evaluation point has length " + std::to_string(len) +
                           ", expected " + std::to_string(space_.size()));
    }
  }
  double s = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (int i = 0; i < m.nvars(); ++i) {
      const int e = m[i];
      if (e == 0) continue;
      v *= e == 1 ? point[i] : std::pow(point[i], e);
    }
    s += v;
  }
  return s;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subst) const {
  if (uses_noise()) {
    throw InvalidInputError("compose: outer polynomial must not contain noise variables");
  }
  if (static_cast<int>(subst.size()) != space_.state_dim) {
    throw DimensionError("compose: expected one substitute per state variable");
  }
  for (const auto& s : subst) check_same_space(s, "compose");

  // Cache powers of each substitute up to the largest exponent used.
  std::vector<std::vector<Polynomial>> powers(space_.state_dim);
  for (int i = 0; i < space_.state_dim; ++i) {
    int max_e = 0;
    for (const auto& [m, c] : terms_) max_e = std::max(max_e, m[i]);
    powers[i].reserve(max_e + 1);
    powers[i].push_back(constant(space_, 1.0));
    for (int e = 1; e <= max_e; ++e) powers[i].push_back(powers[i].back() * subst[i]);
  }

  TermMap acc;
  for (const auto& [m, c] : terms_) {
    Polynomial term = constant(space_, c);
    for (int i = 0; i < space_.state_dim; ++i) {
      if (m[i] > 0) term = term * powers[i][m[i]];
    }
    for (const auto& [tm, tc] : term.terms_) acc[tm] += tc;
  }
  return Polynomial(space_, std::move(acc)).pruned();
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    if (std::abs(c) >= tol) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

Polynomial Polynomial::leading_form() const {
  Polynomial r(space_);
  const int d = degree();
  for (const auto& [m, c] : terms_) {
    if (m.degree() == d) r.terms_.emplace(m, c);
  }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const double a = std::abs(c);
    const bool unit = m.degree() > 0 && a == 1.0;
    if (!unit) os << a;
    bool need_star = !unit;
    for (int i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (need_star) os << "*";
      need_star = true;
      if (space_.is_state(i)) os << "x" << i;
      else os << "w" << (i - space_.state_dim);
      if (m[i] > 1) os << "^" << m[i];
    }
  }
  return os.str();
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }
double eval(const Polynomial& p, std::span<const double> point) { return p.eval(point); }
Polynomial compose(const Polynomial& p, const std::vector<Polynomial>& subst) {
  return p.compose(subst);
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p)
    : nvars_(p.space().size()), max_exp_(p.space().size(), 0) {
  coefs_.reserve(p.size());
  exps_.reserve(p.size() * nvars_);
  for (const auto& [m, c] : p.terms()) {
    coefs_.push_back(c);
    for (int i = 0; i < nvars_; ++i) {
      exps_.push_back(m[i]);
      max_exp_[i] = std::max(max_exp_[i], m[i]);
    }
  }
}

double CompiledPolynomial::operator()(std::span<const double> point) const {
  // Small power tables per variable keep this allocation-free for low degrees.
  constexpr int kMaxCached = 16;
  double pw[8][kMaxCached + 1];
  const int cached_vars = std::min(nvars_, 8);
  for (int i = 0; i < cached_vars; ++i) {
    const double x = i < static_cast<int>(point.size()) ? point[i] : 0.0;
    pw[i][0] = 1.0;
    const int top = std::min(max_exp_[i], kMaxCached);
    for (int e = 1; e <= top; ++e) pw[i][e] = pw[i][e - 1] * x;
  }
  double s = 0.0;
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += nvars_) {
    double v = coefs_[t];
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (i < cached_vars && e[i] <= kMaxCached) v *= pw[i][e[i]];
      else v *= i < static_cast<int>(point.size()) ? std::pow(point[i], e[i]) : 0.0;
    }
    s += v;
  }
  return s;
}

}  // namespace dpbc
