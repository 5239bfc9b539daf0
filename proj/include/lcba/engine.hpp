#pragma once

#include "lcba/adversary.hpp"
#include "lcba/protocol.hpp"
#include "lcba/trace.hpp"

namespace lcba {

SetupBundle draw_setup(const Protocol& spec, Seed seed);
// Coins for rounds 1..spec.q() from the seeded generator.
CoinTape draw_coins(const Protocol& spec, Seed seed);

ExecutionTrace run_honest(const ProtocolSpec& spec, const InputVector& inputs, Seed seed);
ExecutionTrace run(const ProtocolSpec& spec, const InputVector& inputs, const AdversaryStrategy& adversary,
                   Seed seed);

// Runs on an explicit setup and coin tape; the seed only drives the adversary.
// Used by the estimation loops and by tests that pin particular tapes.
ExecutionTrace run_on_tape(const Protocol& spec, const InputVector& inputs, const AdversaryStrategy& adversary,
                           const SetupBundle& setup, const CoinTape& coins, Seed adversary_seed);

}  // namespace lcba
