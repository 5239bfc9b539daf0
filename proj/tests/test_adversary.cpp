#include <doctest.h>

#include "lcba/adversary.hpp"
#include "lcba/attacks.hpp"
#include "lcba/engine.hpp"
#include "lcba/protocols.hpp"
#include "lcba/trace.hpp"

using namespace lcba;

namespace {

// Corrupts more parties than it declares as budget.
class Greedy final : public AdversaryStrategy {
 public:
  std::string name() const override { return "greedy"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::non_rushing; }
  std::size_t budget() const override { return 1; }
  PartySet initial_corruptions() const override { return {0, 1}; }
  std::unique_ptr<AdversarySession> open(const Protocol& p, const InputVector& v, Seed s) const override {
    return NoAdversary().open(p, v, s);
  }
};

}  // namespace

TEST_CASE("honest traces validate") {
  for (const auto& e : protocol_catalog()) {
    ProtocolSpec spec = e.build({9, 2, 3, std::nullopt});
    NoAdversary none;
    for (Seed s = 0; s < 20; ++s) {
      ExecutionTrace tr = run(spec, InputVector::parse("010011101"), none, s);
      CHECK(validate_locally_consistent(tr, *spec, none).ok);
    }
  }
}

TEST_CASE("honest-corruption traces validate and keep honest coins") {
  ProtocolSpec spec = micali_lite(10, 3, 2);
  HonestCorruption adv({1, 4, 7}, 3);
  for (Seed s = 0; s < 50; ++s) {
    ExecutionTrace tr = run(spec, InputVector::parse("0100100100"), adv, s);
    CHECK(validate_locally_consistent(tr, *spec, adv).ok);
    CHECK(tr.coins == draw_coins(*spec, s));
    CHECK(tr.corrupted() == PartySet{1, 4, 7});
  }
}

TEST_CASE("budget overrun is a configuration error") {
  Greedy g;
  CHECK_THROWS_AS(run(one_round_majority(5), InputVector::constant(5, 0), g, 1), ConfigError);
}

TEST_CASE("mutated corrupted payloads are flagged at their slot") {
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  StrategyPtr adv = second_round_static_attack(spec, g);
  int checked = 0;
  for (Seed s = 0; s < 10; ++s) {
    ExecutionTrace tr = run(spec, g.base, *adv, s);
    REQUIRE(validate_locally_consistent(tr, *spec, *adv).ok);
    for (int r = 1; r <= tr.rounds_run(); ++r) {
      for (std::size_t m = 0; m < tr.mailboxes[r - 1].size(); ++m) {
        const Message& msg = tr.mailboxes[r - 1][m];
        if (msg.is_abort || tr.corruption_log[msg.from] > r) continue;
        for (std::size_t byte = 0; byte < msg.payload.size(); byte += 3) {
          ExecutionTrace bad = tr;
          bad.mailboxes[r - 1][m].payload[byte] ^= 0x80;
          ValidationReport rep = validate_locally_consistent(bad, *spec, *adv);
          REQUIRE_FALSE(rep.ok);
          bool at_slot = false;
          for (const auto& v : rep.violations) at_slot |= v.round == r && v.sender == msg.from && v.receiver == msg.to;
          CHECK(at_slot);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("non-rushing corrupted messages ignore current-round honest coins") {
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  StrategyPtr adv = second_round_static_attack(spec, g, 2);
  REQUIRE(adv->timing() == Timing::non_rushing);
  for (Seed s = 0; s < 20; ++s) {
    SetupBundle setup = draw_setup(*spec, s);
    CoinTape coins = draw_coins(*spec, s);
    ExecutionTrace a = run_on_tape(*spec, g.base, *adv, setup, coins, s);
    CoinTape other = coins;
    for (PartyId i : a.honest()) other.per_round[1][i] ^= 1;
    ExecutionTrace b = run_on_tape(*spec, g.base, *adv, setup, other, s);
    for (std::size_t m = 0; m < a.mailboxes[1].size(); ++m) {
      if (contains(a.corrupted(), a.mailboxes[1][m].from)) CHECK(a.mailboxes[1][m] == b.mailboxes[1][m]);
    }
  }
}

TEST_CASE("split_honest") {
  auto [a, b] = split_honest({}, 3);
  CHECK(a.empty());
  CHECK(b.empty());
  int empty_first = 0;
  const int reps = 8000;
  for (int s = 0; s < reps; ++s) {
    auto [h0, h1] = split_honest({2, 5, 6}, s);
    CHECK(set_union(h0, h1) == PartySet{2, 5, 6});
    empty_first += h0.empty();
  }
  CHECK(std::abs(empty_first / double(reps) - 0.125) < 0.02);
}

TEST_CASE("action constructors") {
  CHECK(abort_action().kind == LcAction::Kind::abort);
  LcAction a = select_action(1);
  CHECK(a.kind == LcAction::Kind::select);
  CHECK(a.input == 1);
  CHECK(a.selection == nullptr);
}

TEST_CASE("corruption log only grows") {
  ProtocolSpec spec = with_round_budget(micali_lite(60, 16, 1), 2);
  AttackGeometry g = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
  HaltingAttackOptions ho{g.sigma, from_ratio(1, 100), from_ratio(1, 20), 8, 2};
  StrategyPtr adv = pr_halting_attack(spec, g, ho);
  for (Seed s = 0; s < 5; ++s) {
    ExecutionTrace tr = run(spec, g.base, *adv, s);
    CHECK(tr.corrupted().size() <= 16);
    for (PartyId p : tr.corrupted()) CHECK((tr.corruption_log[p] == 0 || tr.corruption_log[p] == 2));
    for (PartyId p : g.pivots) CHECK(tr.corruption_log[p] == 0);
  }
}
