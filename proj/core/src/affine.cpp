#include "dpbc/affine.hpp"

#include <algorithm>

#include "dpbc/error.hpp"

namespace dpbc {

AffineExpr AffineExpr::variable(int index, double c) {
  AffineExpr e;
  if (c != 0.0) e.coefs[index] = c;
  return e;
}

double AffineExpr::eval(std::span<const double> u) const {
  double s = constant;
  for (const auto& [k, c] : coefs) {
    if (k < 0 || static_cast<std::size_t>(k) >= u.size()) {
      throw DimensionError("decision index " + std::to_string(k) + " out of range");
    }
    s += c * u[k];
  }
  return s;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  constant += o.constant;
  for (const auto& [k, c] : o.coefs) {
    const double v = (coefs[k] += c);
    if (v == 0.0) coefs.erase(k);
  }
  return *this;
}

AffineExpr& AffineExpr::operator*=(double c) {
  if (c == 0.0) {
    constant = 0.0;
    coefs.clear();
    return *this;
  }
  constant *= c;
  for (auto& kv : coefs) kv.second *= c;
  return *this;
}

AffinePolynomial::AffinePolynomial(const Polynomial& p) : space_(p.space()) {
  for (const auto& [m, c] : p.terms()) terms_[m] = AffineExpr::scalar(c);
}

AffinePolynomial AffinePolynomial::template_over(VarSpace space, const std::vector<Monomial>& basis,
                                                 int first) {
  AffinePolynomial p(space);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    p.add_term(basis[j], AffineExpr::variable(first + static_cast<int>(j)));
  }
  return p;
}

int AffinePolynomial::degree() const {
  int d = -1;
  for (const auto& kv : terms_) d = std::max(d, kv.first.degree());
  return d;
}

AffinePolynomial& AffinePolynomial::add_term(const Monomial& m, const AffineExpr& e) {
  if (m.nvars() != space_.size()) throw DimensionError("monomial does not match the variable space");
  auto& slot = terms_[m];
  slot += e;
  if (slot.is_constant() && slot.constant == 0.0) terms_.erase(m);
  return *this;
}

AffinePolynomial AffinePolynomial::operator+(const AffinePolynomial& q) const {
  if (!(space_ == q.space_)) throw DimensionError("affine polynomials over different spaces");
  AffinePolynomial r(*this);
  for (const auto& [m, e] : q.terms_) r.add_term(m, e);
  return r;
}

AffinePolynomial AffinePolynomial::operator-(const AffinePolynomial& q) const { return *this + q * -1.0; }

AffinePolynomial AffinePolynomial::operator*(double c) const {
  AffinePolynomial r(space_);
  if (c == 0.0) return r;
  for (const auto& [m, e] : terms_) r.terms_[m] = e * c;
  return r;
}

AffinePolynomial AffinePolynomial::operator+(const AffineExpr& c) const {
  AffinePolynomial r(*this);
  r.add_term(Monomial::one(space_.size()), c);
  return r;
}

AffinePolynomial AffinePolynomial::operator*(const Polynomial& p) const {
  if (!(space_ == p.space())) throw DimensionError("affine polynomial and polynomial over different spaces");
  AffinePolynomial r(space_);
  for (const auto& [m1, e] : terms_) {
    for (const auto& [m2, c] : p.terms()) r.add_term(m1 * m2, e * c);
  }
  return r;
}

Polynomial AffinePolynomial::evaluate(std::span<const double> u) const {
  Polynomial::TermMap t;
  for (const auto& [m, e] : terms_) {
    const double c = e.eval(u);
    if (c != 0.0) t[m] = c;
  }
  return Polynomial(space_, std::move(t));
}

}  // namespace dpbc
