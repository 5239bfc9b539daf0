#include <doctest.h>

#include "lcba/engine.hpp"
#include "lcba/protocols.hpp"
#include "lcba/stats.hpp"
#include "lcba/trace.hpp"

#include <functional>

using namespace lcba;

namespace {

bool all_output(const ExecutionTrace& tr, Bit b) {
  for (const Output& o : tr.outputs) {
    if (o != Output(b)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one-round majority counts votes") {
  ProtocolSpec spec = one_round_majority(9);
  CHECK(all_output(run_honest(spec, InputVector::constant(9, 0), 1), 0));
  CHECK(all_output(run_honest(spec, InputVector::parse("000111000"), 1), 0));
  CHECK(all_output(run_honest(spec, InputVector::parse("111111000"), 1), 1));
}

TEST_CASE("catalog lookup") {
  CHECK(protocol_catalog().size() == 4);
  for (const char* name : {"one-round-majority", "two-round-coin-majority", "micali-lite", "beacon"}) {
    CHECK(catalog_entry(name).name == name);
  }
  CHECK_THROWS_AS(catalog_entry("nope"), ConfigError);
  CHECK_THROWS_AS(two_round_coin_majority(8, 2), ConfigError);
  ProtocolSpec q2 = catalog_entry("micali-lite").build({30, 9, 10, 2});
  CHECK(q2->q() == 2);
}

TEST_CASE("pre-agreement inputs: every protocol outputs the common bit") {
  for (const auto& e : protocol_catalog()) {
    for (Bit b : {Bit{0}, Bit{1}}) {
      ProtocolSpec spec = e.build({13, 3, 6, std::nullopt});
      NoAdversary none;
      BaMeasurement m = measure(spec, InputVector::constant(13, b), none, 300, 17 + b);
      CHECK(m.agreement_violation.point == 0);
      CHECK(m.validity_violation.point == 0);
    }
  }
  ProtocolSpec micali = micali_lite(30, 9, 10);
  for (Seed s = 0; s < 50; ++s) CHECK(all_output(run_honest(micali, InputVector::constant(30, 1), s), 1));
}

TEST_CASE("two-round coin majority without a super-majority follows the coins") {
  ProtocolSpec spec = two_round_coin_majority(9, 2);
  InputVector v = InputVector::parse("000001111");
  for (Seed s = 0; s < 200; ++s) {
    ExecutionTrace tr = run_honest(spec, v, s);
    std::size_t ones = 0;
    for (PartyId i = 0; i < 9; ++i) ones += tr.coins.at(2, i) & 1;
    CHECK(all_output(tr, ones >= 5 ? 1 : 0));
    CHECK(halted_by(tr, 2, all_parties(9)));
  }
}

TEST_CASE("micali leader is uniform over parties") {
  ProtocolSpec spec = micali_lite(30, 9, 1);
  int corrupted_leader = 0;
  const int phases = 3000;
  for (int s = 0; s < phases; ++s) {
    CoinTape tape = draw_coins(*spec, s);
    corrupted_leader += micali_leader(tape, 1) < 9;
  }
  CHECK(std::abs(corrupted_leader / double(phases) - 0.3) < 0.03);
}

TEST_CASE("micali single phase with mixed inputs halts by round three") {
  ProtocolSpec spec = micali_lite(30, 9, 1);
  InputVector v = InputVector::parse("010101010101010101010101010101");
  int halted = 0;
  for (Seed s = 0; s < 300; ++s) halted += halted_by(run_honest(spec, v, s), 3, all_parties(30));
  CHECK(halted / 300.0 >= 1.0 / 3 - 0.05);
}

TEST_CASE("beacon setup is one joint draw") {
  ProtocolSpec spec = beacon_protocol(12, 2, 8);
  for (Seed s = 0; s < 20; ++s) {
    SetupBundle b = draw_setup(*spec, s);
    CHECK(b.per_party.size() == 12);
    for (const auto& p : b.per_party) CHECK(p == b.per_party[0]);
    CHECK(b.per_party[0].size() == 8);
  }
}

TEST_CASE("beacon phases to decide from an even split") {
  // Exact expectation over beacon bits of the honest vote-count chain: every
  // party sees the same tally, so the state is the number of ones.
  const std::size_t n = 12, t = 2;
  std::function<double(std::size_t, int)> expected = [&](std::size_t ones, int phase) -> double {
    const std::size_t zeros = n - ones;
    const std::size_t support = std::max(ones, zeros);
    if (support + t >= n) return phase;
    if (support + 2 * t >= n) return expected(ones > zeros ? n : 0, phase + 1);
    return 0.5 * expected(0, phase + 1) + 0.5 * expected(n, phase + 1);
  };
  const double oracle = expected(6, 1);
  CHECK(oracle == doctest::Approx(2.0));
  ProtocolSpec spec = beacon_protocol(n, t, 8);
  double total = 0;
  const int trials = 400;
  for (Seed s = 0; s < trials; ++s) {
    ExecutionTrace tr = run_honest(spec, InputVector::parse("010101010101"), s);
    total += *std::max_element(tr.halt_round.begin(), tr.halt_round.end());
  }
  CHECK(total / trials == doctest::Approx(oracle));
}
