#include <cmath>
#include <random>

#include "doctest.h"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/system_model.hpp"
#include "test_support.hpp"

using namespace dpbc;

namespace {

void check_same_poly(const Polynomial& a, const Polynomial& b) {
  CHECK(a.space() == b.space());
  const Polynomial d = (a - b).pruned(1e-14);
  CAPTURE(a.to_string());
  CAPTURE(b.to_string());
  CHECK(d.is_zero());
}

void check_same_model(const SystemModel& a, const SystemModel& b) {
  CHECK(a.space == b.space);
  CHECK(a.horizon == b.horizon);
  REQUIRE(a.dynamics.size() == b.dynamics.size());
  for (std::size_t i = 0; i < a.dynamics.size(); ++i) check_same_poly(a.dynamics[i], b.dynamics[i]);
  REQUIRE(a.noise.size() == b.noise.size());
  for (int i = 0; i < a.noise.size(); ++i) {
    CHECK(a.noise[i].describe() == b.noise[i].describe());
    for (int k = 0; k <= 6; ++k) CHECK(a.noise[i].moment(k) == doctest::Approx(b.noise[i].moment(k)));
  }
  REQUIRE(a.regions.size() == b.regions.size());
  for (const auto& [r, set] : a.regions) {
    REQUIRE(b.has_region(r));
    REQUIRE(set.polys().size() == b.region(r).polys().size());
    for (std::size_t k = 0; k < set.polys().size(); ++k) check_same_poly(set.polys()[k], b.region(r).polys()[k]);
  }
  CHECK(a.initial_points == b.initial_points);
  REQUIRE(a.grid_box.has_value() == b.grid_box.has_value());
  if (a.grid_box) {
    CHECK(a.grid_box->lower == b.grid_box->lower);
    CHECK(a.grid_box->upper == b.grid_box->upper);
  }
}

SystemModel interval_safety_model(double g_half_width) {
  SystemModel m = example1_model();
  const Polynomial x = Polynomial::variable(m.space, 0);
  m.regions.erase(RegionName::G);
  m.regions.emplace(RegionName::G,
                    SemialgebraicSet(RegionName::G, {Polynomial::constant(m.space, g_half_width * g_half_width) - x * x}));
  return m;
}

}  // namespace

TEST_CASE("shipped fixtures describe the built-in examples") {
  check_same_model(load_model(test::fixture("example1.json")), example1_model());
  check_same_model(load_model(test::fixture("example2.json")), example2_model());
  check_same_model(resolve_model("example1"), example1_model());
}

TEST_CASE("validate: Example 1 is a valid safety and reach-avoid instance") {
  const SystemModel m = example1_model();
  const ValidationReport rep = validate(m, Task::ReachAvoid);
  CHECK(rep.ok);
  CHECK(rep.state_dim == 1);
  CHECK(rep.noise_dim == 1);
  CHECK(rep.max_dynamics_degree == 2);
  CHECK(rep.max_dynamics_state_degree == 1);
  CHECK(rep.single_polynomial_regions);
  CHECK(rep.containment_samples > 0);
  CHECK(rep.containment_violations == 0);
  CHECK(validate(example2_model(), Task::Safety).ok);
}

TEST_CASE("validate: dimension and containment errors") {
  SystemModel bad = example1_model();
  bad.dynamics = {Polynomial::variable(VarSpace(2, 1), 1)};
  CHECK_THROWS_AS(validate(bad), DimensionError);

  SystemModel wide = interval_safety_model(2.0);  // G = [-2, 2] is not inside S = [-1, 1]
  CHECK_THROWS_AS(validate(wide, Task::ReachAvoid), ConfigError);
  const ValidationReport soft = validate(wide, Task::Safety);
  CHECK(soft.containment_violations > 0);
  CHECK(!soft.messages.empty());

  CHECK_THROWS_AS(validate(example2_model(), Task::ReachAvoid), ConfigError);

  SystemModel zero_h = example1_model();
  zero_h.horizon = 0;
  CHECK_THROWS_AS(validate(zero_h), ConfigError);
}

TEST_CASE("model JSON errors name the field") {
  CHECK_THROWS_AS(parse_model("{"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_model(R"({"space": {"state_dim": 1, "noise_dim": 1}})"),
                       doctest::Contains("dynamics"), ConfigError);
  const std::string bad_exps = R"({"space": {"state_dim": 1, "noise_dim": 1},
    "dynamics": [[{"exps": [1, 0, 0], "coef": 1}]], "noise": [{"type": "uniform", "a": -1, "b": 1}],
    "horizon": 3, "regions": {"S": [[{"exps": [0], "coef": 1}]]}})";
  CHECK_THROWS_WITH_AS(parse_model(bad_exps), doctest::Contains("dynamics[0][0].exps"), ConfigError);
  const std::string bad_noise = R"({"space": {"state_dim": 1, "noise_dim": 1},
    "dynamics": [[{"exps": [1, 0], "coef": 1}]], "noise": [{"type": "uniform", "a": 1, "b": -1}],
    "horizon": 3, "regions": {"S": [[{"exps": [0], "coef": 1}]]}})";
  CHECK_THROWS_WITH_AS(parse_model(bad_noise), doctest::Contains("noise[0]"), ConfigError);
  const std::string bad_region = R"({"space": {"state_dim": 1, "noise_dim": 1},
    "dynamics": [[{"exps": [1, 0], "coef": 1}]], "noise": [{"type": "normal", "sigma": 1}],
    "horizon": 3, "regions": {"Q": [[{"exps": [0], "coef": 1}]]}})";
  CHECK_THROWS_WITH_AS(parse_model(bad_region), doctest::Contains("regions"), ConfigError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ConfigError);
}

TEST_CASE("pushforward columns") {
  const SystemModel m1 = example1_model();
  const PushforwardMap p1 = pushforward(m1, 2);
  const Polynomial x = Polynomial::variable(m1.space, 0);
  const Polynomial col_x2 = p1.apply(x * x);
  CHECK(col_x2.size() == 1);
  CHECK(col_x2.coefficient(Monomial({2, 0})) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  CHECK(p1.apply(Polynomial::constant(m1.space, 1.0)) == Polynomial::constant(m1.space, 1.0));
  CHECK(p1.column(0) == Polynomial::constant(m1.space, 1.0));

  const SystemModel m2 = example2_model();
  const Polynomial x2 = Polynomial::variable(m2.space, 0);
  const Polynomial c2 = pushforward(m2, 2).apply(x2 * x2);
  CHECK(c2.coefficient(Monomial({2, 0})) == doctest::Approx(1.0));
  CHECK(c2.coefficient(Monomial({1, 0})) == doctest::Approx(0.0));
  CHECK(c2.coefficient(Monomial({0, 0})) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("pushforward is consistent under basis extension") {
  for (const SystemModel& m : {example1_model(), example2_model()}) {
    const PushforwardMap big = pushforward(m, 6);
    for (int d = 0; d < 6; ++d) {
      const PushforwardMap small = pushforward(m, d);
      for (int j = 0; j < static_cast<int>(small.source_basis().size()); ++j) {
        const Polynomial a = small.column(j);
        const Polynomial b = big.apply(Polynomial::monomial(m.space, small.source_basis()[j]));
        CHECK((a - b).pruned(1e-13).is_zero());
      }
    }
  }
}

TEST_CASE("pushforward agrees with Monte-Carlo expectations within 4 standard errors") {
  std::mt19937_64 rng(41);
  const int N = 100000;
  for (const SystemModel& m : {example1_model(), example2_model()}) {
    const PushforwardMap pf = pushforward(m, 4);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    int failures = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const Polynomial v = test::random_real_poly(m.space, 4, 5, rng, true);
      const Polynomial ev = pf.apply(v);
      const CompiledPolynomial cv(v);
      for (int k = 0; k < 20; ++k) {
        const double x = ux(rng);
        double s = 0.0, s2 = 0.0;
        std::vector<double> w(1), next(1);
        for (int i = 0; i < N; ++i) {
          m.noise.sample(rng, w);
          const double xx[] = {x};
          m.step(xx, w, next);
          const double val = cv(next);
          s += val;
          s2 += val * val;
        }
        const double mean = s / N;
        const double se = std::sqrt(std::max(s2 / N - mean * mean, 0.0) / N);
        const double xs[] = {x};
        if (std::abs(ev.eval(xs) - mean) > 4.0 * se + 1e-12) ++failures;
      }
    }
    // 400 comparisons at 4 sigma: a single miss is already unlikely (p ~ 0.025).
    CHECK(failures <= 1);
  }
}

TEST_CASE("semialgebraic sets") {
  const SystemModel m = example1_model();
  const double in[] = {0.7}, out[] = {-1.2}, g[] = {0.5};
  CHECK(m.region(RegionName::S).contains(in));
  CHECK(!m.region(RegionName::S).contains(out));
  CHECK(m.region(RegionName::XminusS).contains(out));
  CHECK(m.region(RegionName::SminusG).contains(in));
  CHECK(!m.region(RegionName::SminusG).contains(g));
  CHECK(m.region(RegionName::XminusG).contains(in));
  CHECK_THROWS_AS(example2_model().region(RegionName::G), ConfigError);
  CHECK_THROWS_AS(SemialgebraicSet(RegionName::S, {}), InvalidInputError);
  CHECK_THROWS_AS(SemialgebraicSet(RegionName::S, {Polynomial::variable(m.space, 1)}), InvalidInputError);
  CHECK(region_from_string(to_string(RegionName::SminusG)) == RegionName::SminusG);
}

TEST_CASE("affine rescale round trip") {
  SystemModel m = example2_model();
  const Box box{{-3.0}, {5.0}};
  const AffineRescale r = AffineRescale::to_unit_box(box);
  const Polynomial x = Polynomial::variable(m.space, 0);
  const Polynomial p = x * x * x - x * 2.0 + 0.5;
  CHECK((r.to_original(r.to_scaled(p)) - p).pruned(1e-12).is_zero());
  const double xs[] = {5.0};
  CHECK(r.point_to_scaled(xs)[0] == doctest::Approx(1.0));
  const SystemModel z = rescale_model(m, r);
  // x' = x + w  <=>  z' = z + w / h
  const double zw[] = {0.25, 0.4};
  CHECK(z.dynamics[0].eval(zw) == doctest::Approx(0.25 + 0.4 / 4.0));
}
