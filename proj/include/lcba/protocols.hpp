#pragma once

#include "lcba/protocol.hpp"
#include "lcba/trace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lcba {

// Strawman target: one round of input exchange, output the majority.
ProtocolSpec one_round_majority(std::size_t n);

// Round 1 sends the input, round 2 echoes round-1 receptions next to a public
// coin bit.  Parties keep running (and so miss the round-2 deadline) iff some
// b has at least n-t round-1 votes and the coin majority differs from b;
// otherwise they output the coin majority.
ProtocolSpec two_round_coin_majority(std::size_t n, std::size_t t);

// Three-round phases: coin toss, check-halt-on-0, check-halt-on-1.  Every
// party multicasts a 64-bit string in the coin round; the holder of the
// smallest string (lowest index on ties) leads and its low bit is the coin.
ProtocolSpec micali_lite(std::size_t n, std::size_t t, int phase_limit);

// One vote exchange per phase with a shared beacon bit per phase from setup.
// A party adopts the plurality at n-2t votes, takes the beacon below that,
// and decides on an n-t super-majority, then keeps voting its decision.
ProtocolSpec beacon_protocol(std::size_t n, std::size_t t, int phase_limit = 16);

struct ProtocolParams {
  std::size_t n = 0;
  std::size_t t = 0;
  int phase_limit = 10;
  std::optional<int> q;  // override of the round budget under test
};

struct ClaimedGuarantees {
  std::string alpha;
  std::string beta;
  int q = 0;
  std::string gamma;
};

struct ProtocolCatalogEntry {
  std::string name;
  std::string parameters;
  ClaimedGuarantees claimed;
  std::string note;
  std::function<ProtocolSpec(const ProtocolParams&)> build;
};

const std::vector<ProtocolCatalogEntry>& protocol_catalog();
const ProtocolCatalogEntry& catalog_entry(const std::string& name);
ProtocolSpec build_protocol(const std::string& name, const ProtocolParams& params);

// Holder of the smallest coin in `round` (lowest index on ties).
PartyId micali_leader(const CoinTape& coins, int round);
bool micali_is_coin_round(int round);

}  // namespace lcba
