#include <cmath>
#include <random>

#include "doctest.h"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/polynomial.hpp"
#include "test_support.hpp"

using namespace dpbc;

namespace {

const VarSpace kXW(1, 1);

Polynomial X() { return Polynomial::variable(kXW, 0); }
Polynomial W() { return Polynomial::variable(kXW, 1); }
Polynomial C(double c) { return Polynomial::constant(kXW, c); }

double coef(const Polynomial& p, std::vector<int> e) { return p.coefficient(Monomial(std::move(e))); }

}  // namespace

TEST_CASE("add: cancellation, identity, symmetry") {
  const Polynomial x = X(), w = W();
  CHECK((x * x + 1.0) + (-(x * x)) == C(1.0));
  const Polynomial p = x * x * w - x * 3.0 + 2.0;
  CHECK(p + Polynomial(kXW) == p);
  const Polynomial s = (x + w) + (x - w);
  CHECK(s == x * 2.0);
  CHECK(s.size() == 1);
}

TEST_CASE("mul: hand expansion, identity, annihilator") {
  const Polynomial x = X();
  const Polynomial prod = (C(1.0) - x * x) * (x * x - 0.36);
  CHECK(prod.size() == 3);
  CHECK(coef(prod, {4, 0}) == doctest::Approx(-1.0));
  CHECK(coef(prod, {2, 0}) == doctest::Approx(1.36));
  CHECK(coef(prod, {0, 0}) == doctest::Approx(-0.36));
  CHECK(prod.degree() == 4);
  const Polynomial p = x * x * W() + 0.5;
  CHECK(p * C(1.0) == p);
  CHECK((p * Polynomial(kXW)).is_zero());
  CHECK((p * 0.0).is_zero());
}

TEST_CASE("eval") {
  const Polynomial x = X();
  const double pt[] = {-0.9};
  CHECK((C(1.0) - x * x).eval(pt) == doctest::Approx(0.19).epsilon(1e-15));
  const double any[] = {3.7, -2.0};
  CHECK(C(2.5).eval(any) == 2.5);
  const double xw[] = {2.0, 3.0};
  CHECK((X() * W()).eval(xw) == 6.0);
  const double three[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS((X() * W()).eval(three), DimensionError);
  const double one[] = {1.0};
  CHECK_THROWS_AS((X() * W()).eval(one), DimensionError);
}

TEST_CASE("compose") {
  const Polynomial x = X(), w = W();
  const Polynomial f = (w - 0.5) * x;
  const Polynomial c = (x * x).compose({f});
  // (w^2 - w + 0.25) x^2
  CHECK(c.size() == 3);
  CHECK(coef(c, {2, 2}) == doctest::Approx(1.0));
  CHECK(coef(c, {2, 1}) == doctest::Approx(-1.0));
  CHECK(coef(c, {2, 0}) == doctest::Approx(0.25));
  CHECK(C(1.0).compose({f}) == C(1.0));
  CHECK(x.compose({x + w}) == x + w);
  CHECK_THROWS_AS(w.compose({x}), InvalidInputError);
  CHECK_THROWS_AS(x.compose({x, x}), DimensionError);
}

TEST_CASE("mismatched spaces") {
  const VarSpace other(2, 0);
  CHECK_THROWS_AS(X() + Polynomial::variable(other, 0), DimensionError);
  CHECK_THROWS_AS(X() * Polynomial::variable(other, 1), DimensionError);
  CHECK_THROWS_AS(Polynomial::variable(kXW, 2), DimensionError);
  CHECK_THROWS_AS(VarSpace(0, 1), DimensionError);
}

TEST_CASE("ring axioms on random integer polynomials (degree <= 6, 3 variables)") {
  std::mt19937_64 rng(11);
  const VarSpace sp(2, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = test::random_int_poly(sp, 3, 6, rng);
    const Polynomial q = test::random_int_poly(sp, 3, 6, rng);
    const Polynomial r = test::random_int_poly(sp, 2, 5, rng);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + r == p + (q + r));
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
    CHECK((p - p).is_zero());
    if (!p.is_zero() && !q.is_zero()) CHECK((p * q).degree() == p.degree() + q.degree());
    CHECK((p + q).degree() <= std::max(p.degree(), q.degree()));
  }
}

TEST_CASE("no stored zero coefficients") {
  std::mt19937_64 rng(5);
  const VarSpace sp(2, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const Polynomial p = test::random_int_poly(sp, 4, 8, rng);
    const Polynomial q = test::random_int_poly(sp, 4, 8, rng);
    for (const auto* r : {&p, &q}) {
      for (const auto& [m, c] : r->terms()) CHECK(c != 0.0);
    }
    const Polynomial s = p * q - q * p + p;
    for (const auto& [m, c] : s.terms()) CHECK(c != 0.0);
  }
}

TEST_CASE("graded-lex canonical order") {
  const auto basis = monomials_up_to_degree(3, 4);
  CHECK(basis.size() == 35);
  for (std::size_t i = 1; i < basis.size(); ++i) {
    CHECK(basis[i - 1] < basis[i]);
    CHECK(basis[i - 1].degree() <= basis[i].degree());
  }
  std::mt19937_64 rng(3);
  const Polynomial p = test::random_int_poly(VarSpace(2, 1), 5, 12, rng);
  int last = -1;
  for (const auto& [m, c] : p.terms()) {
    CHECK(m.degree() >= last);
    last = m.degree();
  }
}

TEST_CASE("eval of compose equals composition of evals") {
  std::mt19937_64 rng(17);
  const VarSpace sp(2, 2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const Polynomial p = test::random_real_poly(sp, 4, 8, rng, true);
    const std::vector<Polynomial> subst = {test::random_real_poly(sp, 2, 5, rng),
                                           test::random_real_poly(sp, 2, 5, rng)};
    const Polynomial c = p.compose(subst);
    CHECK(c.degree() <= p.degree() * std::max(subst[0].degree(), subst[1].degree()));
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> pt = {u(rng), u(rng), u(rng), u(rng)};
      const std::vector<double> inner = {subst[0].eval(pt), subst[1].eval(pt)};
      const double expect = p.eval(inner);
      CHECK(c.eval(pt) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("serialization round trip reproduces identical term maps") {
  std::mt19937_64 rng(23);
  SystemModel m = example1_model();
  for (int trial = 0; trial < 20; ++trial) {
    m.dynamics = {test::random_real_poly(m.space, 5, 10, rng)};
    const SystemModel back = parse_model(model_to_json(m));
    CHECK(back.dynamics[0].terms() == m.dynamics[0].terms());
    for (const auto& [r, set] : m.regions) CHECK(back.region(r).polys() == set.polys());
  }
}

TEST_CASE("pruned drops tiny coefficients") {
  const Polynomial p = X() * 1e-16 + W() * 2.0;
  CHECK(p.pruned().size() == 1);
  CHECK(p.pruned() == W() * 2.0);
}
