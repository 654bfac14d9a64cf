#pragma once

#include <map>
#include <span>
#include <string>

#include "dpbc/polynomial.hpp"

namespace dpbc {

/// c0 + sum_k c_k u_k over indexed decision variables u.
struct AffineExpr {
  double constant = 0.0;
  std::map<int, double> coefs;

  static AffineExpr variable(int index, double c = 1.0);
  static AffineExpr scalar(double c) { return AffineExpr{c, {}}; }

  bool is_constant() const { return coefs.empty(); }
  double eval(std::span<const double> u) const;

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator*=(double c);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a += b * -1.0; }
  friend AffineExpr operator*(AffineExpr a, double c) { return a *= c; }
  friend AffineExpr operator*(double c, AffineExpr a) { return a *= c; }
  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;
};

/// Polynomial in x whose coefficients are affine in the decision variables.
class AffinePolynomial {
 public:
  using TermMap = std::map<Monomial, AffineExpr>;

  AffinePolynomial() = default;
  explicit AffinePolynomial(VarSpace space) : space_(space) {}
  /// Lifts a numeric polynomial (no decision dependence).
  explicit AffinePolynomial(const Polynomial& p);

  /// sum_j u_{first + j} basis_j.
  static AffinePolynomial template_over(VarSpace space, const std::vector<Monomial>& basis, int first);

  const VarSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  int degree() const;

  AffinePolynomial& add_term(const Monomial& m, const AffineExpr& e);
  AffinePolynomial operator+(const AffinePolynomial& q) const;
  AffinePolynomial operator-(const AffinePolynomial& q) const;
  AffinePolynomial operator*(double c) const;
  AffinePolynomial operator+(const AffineExpr& c) const;  // adds to the constant term
  /// Product with a numeric polynomial.
  AffinePolynomial operator*(const Polynomial& p) const;

  /// Numeric polynomial for fixed decision values.
  Polynomial evaluate(std::span<const double> u) const;

 private:
  VarSpace space_;
  TermMap terms_;
};

}  // namespace dpbc
