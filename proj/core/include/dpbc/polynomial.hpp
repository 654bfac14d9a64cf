#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dpbc {

/// Layout of the variables a polynomial may use. Indices [0, state_dim) are
/// state variables x, indices [state_dim, state_dim + noise_dim) are noise
/// variables w.
struct VarSpace {
  int state_dim = 1;
  int noise_dim = 0;

  VarSpace() = default;
  VarSpace(int n, int m);

  int size() const { return state_dim + noise_dim; }
  bool is_state(int var) const { return var >= 0 && var < state_dim; }
  bool is_noise(int var) const { return var >= state_dim && var < size(); }

  friend bool operator==(const VarSpace&, const VarSpace&) = default;
};

/// Exponent vector over a VarSpace. Ordered graded-lexicographically: lower
/// total degree first, then by exponent of the first variable (higher first),
/// then the second, and so on. Enumeration order is 1, x, y, x^2, xy, y^2, ...
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial one(int nvars) { return Monomial(std::vector<int>(nvars, 0)); }
  static Monomial variable(int nvars, int var, int power = 1);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int var) const { return exps_[var]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  bool divides(const Monomial& other) const;

  /// Value of the monomial at a point (length >= nvars()).
  double eval(std::span<const double> point) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// All monomials in `nvars` variables of total degree <= max_degree, restricted
/// to the variables flagged in `active` (others get exponent zero). Returned in
/// graded-lex order.
std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree,
                                             const std::vector<bool>& active);
std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree);

/// Sparse multivariate polynomial with real coefficients. Value type; every
/// operation returns a new polynomial and never stores an exact-zero term.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double>;

  static constexpr double kCleanupTolerance = 1e-14;

  Polynomial() = default;
  explicit Polynomial(VarSpace space);
  Polynomial(VarSpace space, TermMap terms);

  static Polynomial constant(VarSpace space, double c);
  static Polynomial variable(VarSpace space, int var);
  static Polynomial monomial(VarSpace space, const Monomial& m, double c = 1.0);

  const VarSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  double coefficient(const Monomial& m) const;

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Maximum total degree in the state variables only.
  int state_degree() const;
  bool uses_noise() const;

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& q) const;
  Polynomial operator*(double c) const;
  friend Polynomial operator*(double c, const Polynomial& p) { return p * c; }
  Polynomial operator+(double c) const;
  Polynomial operator-(double c) const { return *this + (-c); }
  Polynomial pow(int k) const;

  /// Point of length n+m, or length n when the polynomial uses no noise.
  double eval(std::span<const double> point) const;

  /// p(subst_0, ..., subst_{n-1}). Requires p to be free of noise variables;
  /// substitutes may use state and noise variables of the same space.
  Polynomial compose(const std::vector<Polynomial>& subst) const;

  /// Drops terms with |coefficient| < tol.
  Polynomial pruned(double tol = kCleanupTolerance) const;

  /// Homogeneous part of maximal degree.
  Polynomial leading_form() const;

  std::string to_string() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void check_same_space(const Polynomial& q, const char* op) const;

  VarSpace space_;
  TermMap terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
double eval(const Polynomial& p, std::span<const double> point);
Polynomial compose(const Polynomial& p, const std::vector<Polynomial>& subst);

/// Flattened polynomial for hot evaluation loops (DP grids, Monte-Carlo).
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  double operator()(std::span<const double> point) const;

 private:
  int nvars_ = 0;
  std::vector<double> coefs_;
  std::vector<int> exps_;  // row-major, nvars_ per term
  std::vector<int> max_exp_;
};

}  // namespace dpbc
