#include <doctest.h>

#include "lcba/engine.hpp"
#include "lcba/prf.hpp"
#include "lcba/protocols.hpp"
#include "lcba/stats.hpp"

#include <cmath>

using namespace lcba;

TEST_CASE("Hoeffding radius") {
  CHECK(hoeffding_radius(10000, 0.99) == doctest::Approx(std::sqrt(std::log(200.0) / 20000.0)));
  CHECK(hoeffding_radius(0) == 1);
  CHECK_THROWS_AS(hoeffding_radius(10, 1.0), ConfigError);
  Estimate e = make_estimate(30, 100);
  CHECK(e.point == doctest::Approx(0.3));
  CHECK(e.covers(0.3));
  CHECK(e.lo() >= 0);
  CHECK(e.hi() <= 1);
}

TEST_CASE("estimator calibration on Bernoulli sources") {
  for (double p : {0.05, 0.5, 0.9}) {
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      PrfStream rng(static_cast<Seed>(rep), Purpose::sampling, static_cast<std::uint64_t>(p * 1000));
      std::uint64_t hits = 0;
      for (int i = 0; i < 500; ++i) hits += rng.bernoulli(p);
      covered += make_estimate(hits, 500).covers(p);
    }
    CHECK(covered >= 990);
  }
}

TEST_CASE("first-round bound") {
  FirstRoundBound b = first_round_bound(3, 1, 0, 0, false);
  CHECK(b.err == Rational(1, 4));
  CHECK(b.value == Rational(1, 4));
  CHECK(first_round_bound(3, 1, 0, 0, true).value == 0);
  FirstRoundBound q = first_round_bound(100, 26, 0, 0, false);
  CHECK_FALSE(q.third_branch);
  CHECK(q.value == Rational(1, 2) + pow2(-74));
  CHECK(first_round_bound(9, 3, Rational(1, 10), Rational(1, 20), true).value == Rational(6, 10));
  CHECK_THROWS_AS(first_round_bound(100, 24, 0, 0, false), OutOfScope);
}

TEST_CASE("second-round bound") {
  SecondRoundBound a = second_round_bound_arbitrary(100, 30, 0, 0);
  CHECK(a.width == 16);
  CHECK(a.value == 1 - Rational(1, 512));
  CHECK_FALSE(a.vacuous);
  SecondRoundBound b = second_round_bound_arbitrary(100, 50, 0, 0);
  CHECK(b.width == 4);
  CHECK(b.value == 1 - Rational(1, 32));
  CHECK(second_round_bound_with_width(7, 0, Rational(1, 2)).vacuous);
  CHECK_THROWS_AS(second_round_bound_arbitrary(9, 3, 0, 0), OutOfScope);
  CHECK_THROWS_AS(second_round_bound_arbitrary(100, 25, 0, 0), OutOfScope);
}

TEST_CASE("public-randomness bound constants") {
  PrBound b = second_round_bound_pr(Rational(1, 60), Rational(1, 5));
  CHECK(b.beta_threshold == Rational(1, 5000));
  CHECK(b.gamma_third == Rational(1, 5));
  CHECK(b.gamma_quarter == Rational(7, 10));
  CHECK(b.lambda == Rational(1, 50));
  CHECK(b.sigma == Rational(1, 240));
  CHECK(second_round_bound_pr(Rational(1, 60), 1).quarter_vacuous);
}

TEST_CASE("measurement of simple cases") {
  NoAdversary none;
  BaMeasurement m = measure(one_round_majority(9), InputVector::constant(9, 1), none, 100, 1);
  CHECK(m.agreement_violation.point == 0);
  CHECK(m.validity_violation.point == 0);
  CHECK(m.halting_by_q.point == 1);
  BaMeasurement c = measure(two_round_coin_majority(9, 2), InputVector::parse("111111110"), none, 4000, 2);
  CHECK(std::abs(c.halting_by_q.point - 0.5) <= c.halting_by_q.ci_radius);
  // Worker count never changes the numbers.
  BaMeasurement par = measure(two_round_coin_majority(9, 2), InputVector::parse("111111110"), none, 4000, 2, {0.99, 3});
  CHECK(par.halting_by_q.point == c.halting_by_q.point);
}

TEST_CASE("audit rows and verdicts") {
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
  AuditReport r = audit(one_round_majority(9), Stage::first_round, g, 1000, 7);
  CHECK(r.verdict == Verdict::satisfied);
  CHECK(r.gamma_hat == 1);
  CHECK(r.alpha_hat > 0.9);
  CHECK(csv_header() == "stage,protocol,n,t,trials,gamma_hat,alpha_hat,beta_hat,bound,slack,verdict");
  CHECK(csv_row(r) == csv_row(audit(one_round_majority(9), Stage::first_round, g, 1000, 7)));
  CHECK(csv_row(r).rfind("first-round,one-round-majority,9,3,1000,1.000000,", 0) == 0);
  CHECK_THROWS_AS(audit(one_round_majority(9), Stage::second_round_arbitrary, g, 10, 1), ConfigError);
}

TEST_CASE("audit monotonicity over trial counts") {
  // A satisfied verdict at a smaller count may only turn violated if the
  // point estimates leave the earlier intervals.
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  for (Seed s : {1u, 2u}) {
    AuditReport small = audit(spec, Stage::second_round_arbitrary, g, 300, s);
    AuditReport large = audit(spec, Stage::second_round_arbitrary, g, 1200, s);
    if (small.verdict == Verdict::satisfied && large.verdict == Verdict::violated) {
      const double moved = std::abs(small.gamma_hat - large.gamma_hat);
      CHECK(moved > hoeffding_radius(300));
    }
    CHECK(large.verdict == Verdict::satisfied);
  }
}
