#include <cmath>
#include <random>

#include "doctest.h"
#include "dpbc/certificates.hpp"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/synthesis.hpp"

using namespace dpbc;

namespace {

Polynomial constant(const SystemModel& m, double c) { return Polynomial::constant(m.space, c); }

BarrierCertificate synthesized(const SystemModel& m, CertificateKind kind, double alpha, int degree) {
  SynthesisOptions opt;
  opt.degrees.certificate = degree;
  const SynthesisResult r = synthesize(m, kind, alpha, opt);
  REQUIRE(r.valid);
  return *r.certificate;
}

GridSpec grid_1d(int nodes) {
  GridSpec g;
  g.axes = {GridAxis{-1.0, 1.0, nodes}};
  return g;
}

}  // namespace

TEST_CASE("geometric sum by direct summation") {
  CHECK(geometric_sum(1.0, 50) == 50.0);
  CHECK(geometric_sum(2.0, 3) == 1.75);
  long double oracle = 0.0L;
  for (int i = 0; i < 50; ++i) oracle += std::pow(1.002L, -static_cast<long double>(i));
  CHECK(geometric_sum(1.002, 50) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-14));
  CHECK(geometric_sum(1.002, 50) == doctest::Approx(47.6).epsilon(1e-3));
  const double a = 1.06;
  CHECK(geometric_sum(a, 50) == doctest::Approx((1.0 - std::pow(a, -50)) / (1.0 - 1.0 / a)).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_sum(0.0, 3), DomainError);
  CHECK_THROWS_AS(geometric_sum(1.0, 0), DomainError);
}

TEST_CASE("parameter domains") {
  const SystemModel m = example1_model();
  CHECK(alpha_in_domain(CertificateKind::MSBC, 1.0));
  CHECK(!alpha_in_domain(CertificateKind::MSBC, 0.99));
  CHECK(alpha_in_domain(CertificateKind::SSBC, 1.0));
  CHECK(!alpha_in_domain(CertificateKind::SSBC, 1.002));
  CHECK(!alpha_in_domain(CertificateKind::DSBC, 0.0));
  CHECK(alpha_in_domain(CertificateKind::RABC, 3.0));
  CHECK_THROWS_AS(BarrierCertificate::make(CertificateKind::MSBC, constant(m, 1.0), 0.99, 0.0), DomainError);
  CHECK_THROWS_AS(BarrierCertificate::make(CertificateKind::SSBC, constant(m, 1.0), 1.01, 0.0), DomainError);
  CHECK_THROWS_AS(BarrierCertificate::make(CertificateKind::DSBC, constant(m, 1.0), -1.0, 0.0), DomainError);
  CHECK(kind_from_string("dsbc") == CertificateKind::DSBC);
  CHECK(kind_from_string("RaBc") == CertificateKind::RABC);
  CHECK_THROWS_AS(kind_from_string("xyz"), InvalidInputError);
}

TEST_CASE("bound evaluation") {
  const SystemModel m = example1_model();
  for (auto kind : {CertificateKind::DSBC, CertificateKind::MSBC, CertificateKind::SSBC}) {
    const auto c = BarrierCertificate::make(kind, constant(m, 1.0), 1.0, 0.0);
    CHECK(evaluate_bound(c, 50, 1.0).clamped == doctest::Approx(1.0));
  }
  // delta alpha^-T + (sum alpha^-i) beta with values from an alpha = 1 run
  const auto d = BarrierCertificate::make(CertificateKind::DSBC, constant(m, 0.587929), 1.0, 2.00198e-06, 0.587929);
  const BoundReport b = evaluate_bound_over_x0(d, 50);
  CHECK(b.raw == doctest::Approx(0.587929 + 50 * 2.00198e-06));
  CHECK(b.raw == doctest::Approx(0.5896).epsilon(0.02).scale(1.0));
  CHECK(b.branch == BoundBranch::AlphaPower);
  // gamma < 0 branch for MSBC: v (1 - beta)^T + 1 - (1 - beta)^T
  const auto ms = BarrierCertificate::make(CertificateKind::MSBC, constant(m, 0.3), 1.5, 0.01);
  const BoundReport bm = evaluate_bound(ms, 10, 0.3);
  CHECK(bm.branch == BoundBranch::GammaNegative);
  CHECK(bm.raw == doctest::Approx(0.3 * std::pow(0.99, 10) + 1 - std::pow(0.99, 10)));
  // DSBC keeps the alpha-power formula even when gamma < 0
  const auto ds = BarrierCertificate::make(CertificateKind::DSBC, constant(m, 0.3), 1.5, 0.01);
  CHECK(evaluate_bound(ds, 10, 0.3).branch == BoundBranch::AlphaPower);
  // clamping keeps the raw value
  const auto big = BarrierCertificate::make(CertificateKind::DSBC, constant(m, 3.0), 1.0, 0.0);
  CHECK(evaluate_bound(big, 5, 3.0).raw == 3.0);
  CHECK(evaluate_bound(big, 5, 3.0).clamped == 1.0);
  const double x0[] = {-0.9};
  CHECK(evaluate_bound_at(big, 5, x0).raw == 3.0);
  CHECK_THROWS_AS(evaluate_bound_over_x0(big, 5), InvalidInputError);
}

TEST_CASE("msbc_normalize") {
  auto [a1, b1] = msbc_normalize(2.0, 0.25);
  CHECK(a1 == doctest::Approx(4.0 / 3.0));
  CHECK(b1 == 0.25);
  CHECK(gamma_of(a1, b1) == doctest::Approx(0.0).scale(1.0));
  auto [a2, b2] = msbc_normalize(1.01, 0.0);
  CHECK(a2 == doctest::Approx(1.0));
  CHECK(b2 == 0.0);
  CHECK_THROWS_AS(msbc_normalize(1.0, 0.0), DomainError);
}

TEST_CASE("normalised MSBC induces the same bound (1e-12)") {
  const SystemModel m = example1_model();
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ua(1.0, 3.0), ub(0.0, 0.5), uv(0.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = ua(rng), beta = ub(rng), v = uv(rng);
    if (gamma_of(alpha, beta) >= 0.0) continue;
    const auto [a2, b2] = msbc_normalize(alpha, beta);
    const auto c1 = BarrierCertificate::make(CertificateKind::MSBC, constant(m, v), alpha, beta);
    const auto c2 = BarrierCertificate::make(CertificateKind::MSBC, constant(m, v), a2, b2);
    for (int T : {1, 7, 50}) CHECK(std::abs(evaluate_bound(c1, T, v).raw - evaluate_bound(c2, T, v).raw) <= 1e-12);
    ++compared;
  }
  CHECK(compared > 50);
}

TEST_CASE("eta is monotone in t with direction given by v (1 - alpha) + alpha beta") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ua(0.8, 1.2), ub(-0.2, 0.2), uv(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = ua(rng), beta = ub(rng), v = uv(rng);
    const int T = 30;
    const double s = v * (1.0 - alpha) + alpha * beta;
    for (int t = 0; t < T; ++t) {
      const double d = eta(v, alpha, beta, t + 1, T) - eta(v, alpha, beta, t, T);
      const double tol = 1e-12 * (1.0 + std::abs(eta(v, alpha, beta, t, T)));
      if (s > 0) CHECK(d <= tol);
      if (s < 0) CHECK(d >= -tol);
    }
    CHECK(eta(v, alpha, beta, T, T) == doctest::Approx(v));
  }
}

TEST_CASE("check_certificate: constant certificates") {
  const SystemModel m = example1_model();
  const auto one = BarrierCertificate::make(CertificateKind::DSBC, constant(m, 1.0), 1.0, 0.0, 1.0);
  const CheckReport r1 = check_certificate(one, m);
  for (const char* id : {"1", "2", "3", "x0"}) {
    REQUIRE(r1.find(id) != nullptr);
    CHECK(r1.find(id)->worst_margin == doctest::Approx(0.0).scale(1.0));
  }
  CHECK(r1.passed());

  const auto zero = BarrierCertificate::make(CertificateKind::DSBC, Polynomial(m.space), 1.0, 0.0, 0.0);
  const CheckReport r0 = check_certificate(zero, m);
  REQUIRE(r0.find("1") != nullptr);
  CHECK(r0.find("1")->worst_margin == doctest::Approx(-1.0));
  CHECK(r0.find("1")->region == "XminusS");
  CHECK(!r0.passed());

  // Reports are reproducible for a fixed seed.
  const CheckReport again = check_certificate(zero, m);
  CHECK(again.worst_margin() == r0.worst_margin());
  CHECK(again.find("3")->witness == r0.find("3")->witness);
}

TEST_CASE("check_certificate: gamma condition for MSBC and missing regions") {
  const SystemModel m = example1_model();
  const auto ms = BarrierCertificate::make(CertificateKind::MSBC, constant(m, 1.0), 1.5, 0.0, 1.0);
  const CheckReport r = check_certificate(ms, m);
  REQUIRE(r.find("gamma") != nullptr);
  CHECK(r.find("gamma")->worst_margin == doctest::Approx(-0.5));

  const auto ra = BarrierCertificate::make(CertificateKind::RABC, Polynomial(m.space), 1.0, 0.0, 0.0);
  CHECK_THROWS_AS(check_certificate(ra, example2_model()), ConfigError);
  CHECK(check_certificate(ra, m).passed());  // the zero RABC certifies the trivial bound 0

  SamplingConfig strict;
  strict.allow_default_box = false;
  const auto one = BarrierCertificate::make(CertificateKind::DSBC, constant(m, 1.0), 1.0, 0.0, 1.0);
  SystemModel no_box = example2_model();
  CHECK_THROWS_AS(check_certificate(one, no_box, strict), ConfigError);
}

TEST_CASE("synthesized DSBC passes the checker and the induction envelope") {
  const SystemModel m = example1_model();
  const BarrierCertificate c = synthesized(m, CertificateKind::DSBC, 1.0, 6);
  CHECK(check_certificate(c, m).worst_margin() >= -1e-6);

  const DpResult dp = solve_dp(m, grid_1d(501), Task::Safety);
  CHECK(induction_envelope_check(c, m, dp).gap >= -1e-3);

  BarrierCertificate looser = c;
  looser.beta += 0.1;
  CHECK(induction_envelope_check(looser, m, dp).gap >= -1e-3);

  BarrierCertificate scaled = c;
  scaled.v = c.v * 0.1;
  const EnvelopeViolation ev = induction_envelope_check(scaled, m, dp);
  CHECK(ev.gap < -1e-3);
  CHECK(ev.stage == m.horizon);
  REQUIRE(ev.x.size() == 1);
  CHECK(std::abs(ev.x[0]) >= 1.0);

  const DpResult short_dp = solve_dp(m, grid_1d(101), Task::Safety, 10);
  CHECK_THROWS_AS(induction_envelope_check(c, m, short_dp), ConfigError);
}

TEST_CASE("eta extremes of valid certificates") {
  const SystemModel m = example1_model();
  const BarrierCertificate d = synthesized(m, CertificateKind::DSBC, 1.002, 6);
  CHECK(eta_extremes(d, m, RegionName::XminusS, m.horizon).min_of_endpoints() >= 1.0 - 1e-6);

  const BarrierCertificate r = synthesized(m, CertificateKind::RABC, 1.06, 6);
  CHECK(check_certificate(r, m).worst_margin() >= -1e-6);
  CHECK(eta_extremes(r, m, RegionName::XminusS, m.horizon).max_of_endpoints() <= 1e-6);
  CHECK(eta_extremes(r, m, RegionName::G, m.horizon).max_of_endpoints() <= 1.0 + 1e-6);
  const DpResult dp = solve_dp(m, grid_1d(501), Task::ReachAvoid);
  CHECK(induction_envelope_check(r, m, dp).gap >= -1e-3);

  const auto ms = BarrierCertificate::make(CertificateKind::MSBC, constant(m, 1.0), 1.0, 0.0);
  CHECK_THROWS_AS(eta_extremes(ms, m, RegionName::S, 5), InvalidInputError);
}

TEST_CASE("certificate files round trip") {
  const SystemModel m = example1_model();
  const BarrierCertificate c = synthesized(m, CertificateKind::DSBC, 1.0, 4);
  const BarrierCertificate back = parse_certificate(certificate_to_json(c), m.space);
  CHECK(back.kind == c.kind);
  CHECK(back.alpha == c.alpha);
  CHECK(back.beta == c.beta);
  CHECK(back.delta == c.delta);
  CHECK(back.v.terms() == c.v.terms());
  CHECK_THROWS_AS(parse_certificate(R"({"kind": "DSBC"})", m.space), ConfigError);
  CHECK_THROWS_AS(parse_certificate(R"({"kind": "MSBC", "alpha": 0.5, "beta": 0, "v": []})", m.space), DomainError);
}
