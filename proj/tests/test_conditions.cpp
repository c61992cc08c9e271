#include <doctest.h>

#include "generators.hpp"
#include "jointosc/conditions.hpp"
#include "jointosc/gallery.hpp"

using namespace jointosc;

namespace {

SymbolPair random_pair(gen::Rng& rng, const Domain& d) {
  return SymbolPair::from_factors(gen::function(rng, d), gen::function(rng, d), "random");
}

SymbolPair shifted(const SymbolPair& p, Complex c) {
  SampledFunction b1 = p.b1;
  b1 += SampledFunction::constant(p.domain(), c);
  return SymbolPair::from_factors(b1, p.b2, "shifted");
}

const AnalyticFunction kCentered{[](double x) { return Complex(x - 0.5); },
                                 [](double a, double b) { return Complex(0.5 * (b - a) * (a + b - 1.0)); }};

}  // namespace

TEST_CASE("constant pair has vanishing conditions") {
  const Domain d(-8.0, 8.0, 64);
  const SymbolPair p = make_bmo_pair(BmoKind::constant).on(d);
  const CellRange Q{5, 40};
  const auto lb = YoungFunction::log_bump(2, 1);
  CHECK(s_p(p, Q, 2) == 0.0);
  CHECK(t_p(p, Q, 2) == 0.0);
  CHECK(s_ab(p, Q, lb, lb) == 0.0);
  CHECK(t_c(p, Q, lb) == 0.0);
  CHECK(scan_condition(p, ConditionSpec::sp(2), {}).sup_lower_bound == 0.0);
  const auto r = scan_condition(p, ConditionSpec::tp(2), {});
  CHECK(r.sup_lower_bound == 0.0);
  CHECK(r.growth_ratio == 1.0);
}

TEST_CASE("linear symbols on the unit interval") {
  const Domain d(0.0, 1.0, 128);
  const auto b = sample(kCentered, d);
  const SymbolPair p = SymbolPair::from_factors(b, b);
  const CellRange Q{0, 128};
  CHECK(s_p(p, Q, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(t_p(p, Q, 2) == doctest::Approx(std::sqrt(1.0 / 80.0)).epsilon(1e-13));
}

TEST_CASE("jnce1 conditions stay bounded on a moderate window") {
  const Domain d(-1024.0, 1024.0, 2048);
  const SymbolPair p = make_jnce1_pair().on(d);
  CHECK(scan_condition(p, ConditionSpec::sp(2), {}).sup_lower_bound <= 4.0);
  CHECK(scan_condition(p, ConditionSpec::tp(2), {}).sup_lower_bound <= 4.0);
}

TEST_CASE("jnce1 Orlicz conditions grow along the ladders") {
  const Domain d(-1024.0, 1024.0, 2048);
  const SymbolPair p = make_jnce1_pair().on(d);
  const auto lb = YoungFunction::log_bump(2, 1);
  const std::vector<double> ks = {16, 32, 64, 128, 256, 512, 1024};
  const auto sab = scan_ladder(p, ConditionSpec::sab(lb, lb), symmetric_ladder(d, ks), "symmetric");
  const auto tc = scan_ladder(p, ConditionSpec::tc(lb), anchored_ladder(d, 0.0, ks), "anchored");
  for (std::size_t i = 1; i < ks.size(); ++i) {
    CHECK(sab.per_scale[i].max > sab.per_scale[i - 1].max);
    CHECK(tc.per_scale[i].max > tc.per_scale[i - 1].max);
  }
  CHECK(sab.growth_ratio > 1.0);
  CHECK(sab.growth_slope > 0.0);
  CHECK_THROWS_AS(anchored_ladder(d, 0.0, {2048}), DomainMismatch);
}

TEST_CASE("scan report bookkeeping") {
  const Domain d(0.0, 1.0, 64);
  gen::Rng rng(31);
  const SymbolPair p = random_pair(rng, d);
  const auto r = scan_condition(p, ConditionSpec::sp(2), {1, 4, true});
  REQUIRE(r.per_scale.size() == 4);
  double sup = 0.0;
  for (const auto& s : r.per_scale) {
    CHECK(s.max == doctest::Approx(s_p(p, s.argmax, 2)).epsilon(1e-15));
    CHECK(s.left == d.cell_left(s.argmax.begin));
    sup = std::max(sup, s.max);
  }
  CHECK(r.sup_lower_bound == sup);
  CHECK(r.growth_ratio == doctest::Approx(r.per_scale.back().max / r.per_scale.front().max));
  CHECK(tail_growth_ratio(r, 2) == doctest::Approx(r.per_scale[3].max / r.per_scale[2].max));
  CHECK_THROWS_AS(tail_growth_ratio(r, 5), ConfigError);
}

TEST_CASE("condition spec validation") {
  CHECK(parse_condition("t_c") == Condition::t_c);
  CHECK_THROWS_AS(parse_condition("s_q"), ConfigError);
  ConditionSpec s{Condition::s_ab, 2.0, YoungFunction::power(2), std::nullopt, std::nullopt};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(ConditionSpec::sp(0.5).validate(), ConfigError);
  const Domain a(0.0, 1.0, 8), b(0.0, 1.0, 16);
  CHECK_THROWS_AS(SymbolPair(SampledFunction::zero(a), SampledFunction::zero(b), SampledFunction::zero(a), "x"),
                  DomainMismatch);
}

TEST_CASE("property: conditions ignore constant shifts of a symbol") {
  gen::Rng rng(32);
  const auto lb = YoungFunction::log_bump(2, 0.5);
  for (int t = 0; t < 100; ++t) {
    const Domain d = gen::domain(rng, 3, 7);
    const SymbolPair p = random_pair(rng, d);
    const SymbolPair q = shifted(p, Complex(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2)));
    const auto Q = gen::interval(rng, d.n_cells());
    const double pp = gen::uniform(rng, 1, 3);
    CHECK(s_p(q, Q, pp) == doctest::Approx(s_p(p, Q, pp)).epsilon(1e-12));
    CHECK(t_p(q, Q, pp) == doctest::Approx(t_p(p, Q, pp)).epsilon(1e-12));
    CHECK(s_ab(q, Q, lb, lb) == doctest::Approx(s_ab(p, Q, lb, lb)).epsilon(1e-12));
    CHECK(t_c(q, Q, lb) == doctest::Approx(t_c(p, Q, lb)).epsilon(1e-12));
  }
}

TEST_CASE("property: monotone in p and Cauchy-Schwarz coupling") {
  gen::Rng rng(33);
  for (int t = 0; t < 200; ++t) {
    const Domain d = gen::domain(rng, 3, 7);
    const SymbolPair p = random_pair(rng, d);
    const auto Q = gen::interval(rng, d.n_cells());
    const double a = gen::uniform(rng, 1, 3), b = a + gen::uniform(rng, 0, 2);
    CHECK(s_p(p, Q, a) <= s_p(p, Q, b) * (1 + 1e-12));
    CHECK(t_p(p, Q, a) <= t_p(p, Q, b) * (1 + 1e-12));
    CHECK(t_p(p, Q, a) <= s_p(p, Q, 2 * a) * (1 + 1e-12));
  }
}

TEST_CASE("property: Orlicz conditions with powers reproduce the L^p ones") {
  gen::Rng rng(34);
  for (int t = 0; t < 100; ++t) {
    const Domain d = gen::domain(rng, 3, 7);
    const SymbolPair p = random_pair(rng, d);
    const auto Q = gen::interval(rng, d.n_cells());
    const double e = gen::uniform(rng, 1, 4);
    const auto a = YoungFunction::power(e);
    CHECK(s_ab(p, Q, a, a) == doctest::Approx(s_p(p, Q, e)).epsilon(1e-8));
    CHECK(t_c(p, Q, a) == doctest::Approx(t_p(p, Q, e)).epsilon(1e-8));
  }
}

TEST_CASE("property: dilation covariance") {
  gen::Rng rng(35);
  for (int t = 0; t < 50; ++t) {
    const Domain d = gen::domain(rng, 3, 7);
    const Domain wide(d.left() * 2, d.right() * 2, d.n_cells());
    const SymbolPair p = random_pair(rng, d);
    const SymbolPair q = SymbolPair::from_factors(SampledFunction(wide, p.b1.values()), SampledFunction(wide, p.b2.values()));
    const auto Q = gen::interval(rng, d.n_cells());
    CHECK(s_p(q, Q, 2) == doctest::Approx(s_p(p, Q, 2)).epsilon(1e-14));
    CHECK(t_p(q, Q, 1.5) == doctest::Approx(t_p(p, Q, 1.5)).epsilon(1e-14));
  }
}

TEST_CASE("magic lemma values") {
  const Domain d(0.0, 1.0, 32);
  const auto b = sample(kCentered, d);
  const auto m = magic_lemma(b, b, {0, 32});
  CHECK(std::abs(m.ml1) == doctest::Approx(1.0 / 72.0).epsilon(1e-12));
  CHECK(m.ml2.real() == doctest::Approx(7.0 / 360.0).epsilon(1e-12));
  CHECK(std::abs(m.ml2.imag()) <= 1e-15);
}
