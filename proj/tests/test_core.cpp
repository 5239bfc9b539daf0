#include <doctest.h>

#include "lcba/engine.hpp"
#include "lcba/protocols.hpp"
#include "lcba/rational.hpp"
#include "lcba/trace.hpp"

#include <set>

using namespace lcba;

TEST_CASE("rational text round-trips") {
  for (const char* text : {"0", "3", "-2", "0.25", "1/60", "1e-3", "2/3"}) {
    Rational x = parse_rational(text);
    CHECK(parse_rational(to_exact_text(x)) == x);
  }
  CHECK(parse_rational("1/60") == Rational(1, 60));
  CHECK(to_exact_text(Rational(1, 4)) == "0.25");
  CHECK(to_exact_text(Rational(1, 3)) == "1/3");
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(ceil_ll(Rational(75, 5)) == 15);
  CHECK(floor_ll(Rational(-1, 2)) == -1);
}

TEST_CASE("prf streams are keyed by purpose") {
  CHECK(prf(1, Purpose::coin, 2, 3) == prf(1, Purpose::coin, 2, 3));
  CHECK(prf(1, Purpose::coin, 2, 3) != prf(1, Purpose::setup, 2, 3));
  CHECK(derive_seed(7, Purpose::trial, 0) != derive_seed(7, Purpose::trial, 1));
  PrfStream s(5, Purpose::sampling);
  for (int i = 0; i < 1000; ++i) CHECK(s.below(7) < 7);
}

TEST_CASE("input vectors and party sets") {
  InputVector v = InputVector::parse("000111000");
  CHECK(v.str() == "000111000");
  CHECK(distance(v, InputVector::constant(9, 0)) == 3);
  CHECK(differing_positions(v, InputVector::constant(9, 0)) == PartySet{3, 4, 5});
  CHECK(flipped(v, {0, 3}).str() == "100011000");
  CHECK(set_union({1, 3}, {2, 3}) == PartySet{1, 2, 3});
  CHECK(complement(4, {1}) == PartySet{0, 2, 3});
  CHECK_THROWS(InputVector::parse("0120"));
}

TEST_CASE("one-round majority honest run") {
  ProtocolSpec spec = one_round_majority(9);
  ExecutionTrace tr = run_honest(spec, InputVector::constant(9, 0), 11);
  for (PartyId i = 0; i < 9; ++i) {
    CHECK(tr.outputs[i] == Output(0));
    CHECK(tr.halt_round[i] == 1);
  }
  CHECK(outputs_of(tr, {}).empty());
  CHECK(halted_by(tr, 1, all_parties(9)));
  CHECK(halted_by(tr, 1, {}));
}

TEST_CASE("engine determinism and the vacuous adversary") {
  for (const auto& e : protocol_catalog()) {
    ProtocolSpec spec = e.build({9, 2, 4, std::nullopt});
    InputVector v = InputVector::parse("011010110");
    NoAdversary none;
    for (Seed s : {1u, 2u, 99u}) {
      ExecutionTrace a = run(spec, v, none, s);
      CHECK(a == run(spec, v, none, s));
      CHECK(a == run_honest(spec, v, s));
      CHECK(trace_to_jsonl(a) == trace_to_jsonl(run_honest(spec, v, s)));
    }
  }
}

TEST_CASE("output is absent exactly when the party did not halt within q") {
  ProtocolSpec spec = two_round_coin_majority(9, 2);
  for (Seed s = 0; s < 200; ++s) {
    ExecutionTrace tr = run_honest(spec, InputVector::constant(9, 1), s);
    for (PartyId i = 0; i < 9; ++i) CHECK(tr.outputs[i].has_value() == (tr.halt_round[i] <= tr.q));
  }
}

TEST_CASE("public-randomness payloads carry the sender's coin") {
  for (ProtocolSpec spec : {two_round_coin_majority(9, 2), with_round_budget(micali_lite(10, 3, 2), 4)}) {
    for (Seed s = 0; s < 20; ++s) {
      ExecutionTrace tr = run_honest(spec, InputVector::parse(spec->n() == 9 ? "010101011" : "0101010110"), s);
      for (int r = 1; r <= tr.rounds_run(); ++r) {
        for (const Message& m : tr.mailboxes[r - 1]) {
          if (m.is_abort) continue;
          Received got = spec->decode(r, m.payload);
          REQUIRE(got.present);
          CHECK(got.coin == tr.coins.at(r, m.from));
        }
      }
    }
  }
}

TEST_CASE("two-round coin majority halts with probability one half") {
  // Exact over all 2^9 round-2 coin patterns: with a unanimous input the
  // parties halt iff the coin majority matches it.
  int halting = 0;
  for (unsigned pattern = 0; pattern < 512; ++pattern) {
    int ones = __builtin_popcount(pattern);
    halting += (ones >= 5) == true;
  }
  CHECK(halting == 256);
  ProtocolSpec spec = two_round_coin_majority(9, 2);
  int halted = 0;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) halted += halted_by(run_honest(spec, InputVector::constant(9, 1), s), 2, all_parties(9));
  CHECK(std::abs(halted / double(trials) - 0.5) < 0.03);
}

TEST_CASE("later rounds do not change earlier traffic") {
  ProtocolSpec full = micali_lite(10, 3, 2);
  InputVector v = InputVector::parse("0110100111");
  for (Seed s = 0; s < 30; ++s) {
    ExecutionTrace longer = run_honest(full, v, s);
    for (int r = 1; r < full->q(); ++r) {
      ExecutionTrace shorter = run_honest(with_round_budget(full, r), v, s);
      // The engine may stop once every honest party has decided.
      CHECK(shorter.rounds_run() <= r);
      for (int k = 0; k < std::min(shorter.rounds_run(), longer.rounds_run()); ++k) {
        CHECK(shorter.mailboxes[k] == longer.mailboxes[k]);
      }
    }
  }
}
