#pragma once

#include "lcba/adversary.hpp"
#include "lcba/mail.hpp"
#include "lcba/protocol.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lcba::detail {

struct ExecutionState {
  const Protocol* spec = nullptr;
  std::size_t n = 0;
  const InputVector* inputs = nullptr;
  const SetupBundle* setup = nullptr;
  const CoinTape* coins = nullptr;
  bool rushing = false;
  int round = 0;
  bool current_visible = false;               // honest round-`round` traffic is built
  std::vector<RoundMail> rounds;              // completed rounds
  std::vector<std::vector<Message>> pending;  // honest current-round traffic, [sender][receiver]
  std::vector<bool> is_corrupt;
  PartySet corrupted;
};

// Machine of a corrupted party that claims `input` and the inbox chosen by
// `selection` (nullptr: genuine) for rounds before `round`.  Returns nullptr and
// fills `error` when the selection points at something never delivered.
std::unique_ptr<PartyMachine> replay_claimed(const Protocol& spec, PartyId party, Bit input,
                                             const SetupBundle& setup, const CoinTape& coins,
                                             const std::vector<RoundMail>& rounds, int round,
                                             const InboxSelection* selection, std::string* error);

}  // namespace lcba::detail
