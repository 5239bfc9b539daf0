#include <doctest.h>

#include "lcba/adversary.hpp"
#include "lcba/attacks.hpp"
#include "lcba/engine.hpp"
#include "lcba/protocols.hpp"
#include "lcba/stats.hpp"
#include "lcba/trace.hpp"

#include <cmath>

using namespace lcba;

namespace {

// Non-pivot traffic and outputs must match an honest run.
void check_same_outside(const ExecutionTrace& a, const ExecutionTrace& b, const PartySet& pivots) {
  REQUIRE(a.rounds_run() == b.rounds_run());
  CHECK(a.coins == b.coins);
  for (int r = 0; r < a.rounds_run(); ++r) {
    REQUIRE(a.mailboxes[r].size() == b.mailboxes[r].size());
    for (std::size_t m = 0; m < a.mailboxes[r].size(); ++m) CHECK(a.mailboxes[r][m] == b.mailboxes[r][m]);
  }
  for (PartyId i = 0; i < a.n; ++i) {
    if (!contains(pivots, i)) CHECK(a.outputs[i] == b.outputs[i]);
  }
}

double binomial_upper_tail(std::size_t n, double p, std::size_t above) {
  double tail = 0;
  for (std::size_t s = above + 1; s <= n; ++s) {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(s + 1.0) - std::lgamma(n - s + 1.0) + s * std::log(p) +
                     (n - s) * std::log1p(-p));
  }
  return tail;
}

}  // namespace

TEST_CASE("geometry: first-round third regime") {
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
  CHECK(g.v0.str() == "000111000");
  CHECK(g.v1.str() == "111111000");
  CHECK(g.pivots == PartySet{0, 1, 2});
  CHECK(g.cell_size == 6);
  CHECK(g.cell_count == 1);
}

TEST_CASE("geometry: second-round arbitrary") {
  AttackGeometry g = attack_geometry(100, 30, Regime::quarter, Stage::second_round_arbitrary);
  CHECK(g.pivot_count == 25);
  CHECK(g.cell_size == 5);
  CHECK(g.cell_count == 15);
  REQUIRE(g.width);
  CHECK(*g.width == 16);
  CHECK(g.pivots.size() == 25);
  for (const auto& cell : g.cells) CHECK(cell.size() == 5);

  AttackGeometry small = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  CHECK(small.pivot_count == 2);
  CHECK(small.cell_size == 1);
  CHECK(small.cell_count == 7);
  CHECK_FALSE(small.width);
  CHECK(small.audit_width() == 8);
  CHECK_FALSE(small.notes.empty());
  CHECK_THROWS_AS(attack_geometry(8, 2, Regime::quarter, Stage::second_round_arbitrary), OutOfScope);
}

TEST_CASE("geometry: second-round public randomness") {
  AttackGeometry g = attack_geometry(100, 40, Regime::third, Stage::second_round_pr, Rational(1, 15));
  CHECK(g.pivot_count == 34);
  CHECK(g.cell_size == 3);
  AttackGeometry q = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
  CHECK(q.eps_t == Rational(1, 60));
  CHECK(q.pivot_count == 15);
  CHECK(q.abort_cap == 0);
  CHECK(q.cell_size == 1);
  CHECK(q.cell_count == 45);
  for (PartyId p = 0; p < 60; ++p) {
    std::size_t hits = contains(q.pivots, p);
    for (const auto& c : q.cells) hits += contains(c, p);
    CHECK(hits == 1);
  }
}

TEST_CASE("world faces") {
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  SetupBundle setup = draw_setup(*spec, 1);
  WorldSimulator sim(*spec, g, g.base, setup, std::vector<Coin>(9, 0));
  const PartyId p = g.pivots[0];
  const int cell_count = static_cast<int>(g.cell_count);
  for (PartyId u = 0; u < 9; ++u) {
    CHECK(sim.face(0, p, u) == 0);
    CHECK(sim.face(cell_count, p, u) == 1);
  }
  CHECK(sim.face(1, p, g.pivots[1]) == -1);
  CHECK(sim.face(1, p, g.cells[0][0]) == 1);
  CHECK(sim.face(1, p, g.cells[1][0]) == 0);
  CHECK(sim.face(3, p, g.cells[2][0]) == 1);
}

TEST_CASE("pivot variant endpoints are honest executions") {
  for (ProtocolSpec spec : {two_round_coin_majority(9, 3), micali_lite(9, 3, 1)}) {
    AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
    StrategyPtr lo = pivot_variant(spec, g, 0);
    StrategyPtr hi = pivot_variant(spec, g, static_cast<int>(g.cell_count));
    for (Seed s = 0; s < 30; ++s) {
      check_same_outside(run(spec, g.base, *lo, s), run_honest(spec, g.base, s), g.pivots);
      check_same_outside(run(spec, g.base, *hi, s), run_honest(spec, flipped(g.base, g.pivots), s), g.pivots);
    }
  }
}

TEST_CASE("first-round attack splits one-round majority") {
  ProtocolSpec spec = one_round_majority(9);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
  StrategyPtr adv = first_round_attack(spec, g, false);
  // Receivers of the v0 face count six zeros, receivers of the v1 face six
  // ones; disagreement needs both halves of the six honest parties non-empty.
  const double oracle = 1.0 - 2.0 * std::pow(2.0, -6);
  BaMeasurement m = measure(spec, g.v0, *adv, 4000, 5);
  CHECK(std::abs(m.agreement_violation.point - oracle) <= m.agreement_violation.ci_radius);
  CHECK(m.halting_by_q.point == 1);

  AttackGeometry same = retarget(g, g.v0, g.v0);
  CHECK(same.pivots.empty());
  BaMeasurement none = measure(spec, g.v0, *first_round_attack(spec, same, false), 200, 5);
  CHECK(none.agreement_violation.point == 0);
}

TEST_CASE("every generated strategy validates") {
  struct Case {
    ProtocolSpec spec;
    AttackGeometry g;
    StrategyPtr adv;
  };
  std::vector<Case> cases;
  {
    ProtocolSpec s = one_round_majority(9);
    AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
    cases.push_back({s, g, first_round_attack(s, g, false)});
  }
  {
    ProtocolSpec s = two_round_coin_majority(9, 3);
    AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
    cases.push_back({s, g, first_round_attack(s, g, true)});
    AttackGeometry a = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
    cases.push_back({s, a, second_round_static_attack(s, a)});
    cases.push_back({s, a, pivot_variant(s, a, std::nullopt)});
    cases.push_back({s, a, pivot_variant(s, a, 2, {7})});
  }
  {
    ProtocolSpec s = with_round_budget(micali_lite(60, 16, 1), 2);
    AttackGeometry g = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
    cases.push_back({s, g, pr_halting_attack(s, g, {g.sigma, from_ratio(1, 100), from_ratio(1, 20), 8, 2})});
    AgreementAttackOptions ao;
    ao.sigma = g.sigma;
    ao.max_samples = 8;
    cases.push_back({s, g, pr_agreement_attack(s, g, ao)});
  }
  for (const auto& c : cases) {
    CAPTURE(c.adv->name());
    for (Seed s = 0; s < 40; ++s) {
      ExecutionTrace tr = run(c.spec, c.g.base, *c.adv, s);
      ValidationReport r = validate_locally_consistent(tr, *c.spec, *c.adv);
      if (!r.ok) FAIL(to_json(r));
      CHECK(tr.corrupted().size() <= c.spec->n());
      CHECK(tr.corrupted().size() <= c.adv->budget());
    }
  }
}

TEST_CASE("halting denial per world is bounded by the random-world loss") {
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  const std::size_t trials = 2000;
  BaMeasurement mixed = measure(spec, g.base, *second_round_static_attack(spec, g), trials, 3);
  for (int world = 0; world < static_cast<int>(g.cell_count); ++world) {
    BaMeasurement fixed = measure(spec, g.base, *second_round_static_attack(spec, g, world), trials, 4 + world);
    const double slack = fixed.halting_by_q.ci_radius / (g.cell_count + 1) + mixed.halting_by_q.ci_radius;
    CHECK((1 - fixed.halting_by_q.point) / (g.cell_count + 1) <= 1 - mixed.halting_by_q.point + slack);
  }
}

TEST_CASE("estimation constants") {
  CHECK(halting_loop_bound(from_ratio(1, 10), from_ratio(1, 20)) == 200);
  CHECK(estimation_samples(64, 15, 0.1) == 321);
}

TEST_CASE("abort set sampler") {
  CHECK(abort_cap(100, from_ratio(1, 10)) == 20);
  double total = 0;
  const int reps = 2000;
  for (int s = 0; s < reps; ++s) {
    AbortSet a = sample_abort_set(100, from_ratio(1, 10), s);
    CHECK(a.members.size() <= 20);
    total += a.members.size();
  }
  CHECK(std::abs(total / reps - 10) < 0.3);
  // Tail mass the cap removes, against the target alpha of 1/10.
  CHECK(binomial_upper_tail(100, 0.1, 20) <= 0.1);
  int empty = 0;
  for (int s = 0; s < 4000; ++s) empty += sample_abort_set(10, from_ratio(1, 50), s).members.empty();
  // Conditioning on |S| <= 0 when the cap is 0 forces S empty.
  CHECK(empty == 4000);
}

TEST_CASE("agreement attack with identical faces never splits") {
  ProtocolSpec spec = with_round_budget(micali_lite(60, 16, 1), 2);
  AttackGeometry g = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
  AgreementAttackOptions ao;
  ao.sigma = g.sigma;
  ao.force_world = 3;
  ao.force_abort_set = PartySet{};
  ao.force_faces = std::make_pair(false, false);
  BaMeasurement m = measure(spec, g.base, *pr_agreement_attack(spec, g, ao), 200, 9);
  CHECK(m.agreement_violation.point == 0);
}
