#pragma once

#include "lcba/types.hpp"

#include <string>
#include <vector>

namespace lcba {

struct ExecutionTrace {
  std::size_t n = 0;
  int q = 0;
  InputVector inputs;
  SetupBundle setup;
  CoinTape coins;
  std::vector<std::vector<Message>> mailboxes;  // [round - 1], ordered by (from, to)
  std::vector<int> halt_round;                  // kNever when the party produced no output
  std::vector<Output> outputs;
  // 0: corrupted before setup; r >= 1: corrupted from round r on; kNever: honest.
  std::vector<int> corruption_log;

  int rounds_run() const { return static_cast<int>(mailboxes.size()); }
  PartySet honest() const;
  PartySet corrupted() const;
  bool operator==(const ExecutionTrace&) const = default;
};

std::vector<Output> outputs_of(const ExecutionTrace& trace, const PartySet& who);
bool halted_by(const ExecutionTrace& trace, int round, const PartySet& who);

// Same setup, coins, traffic, and the same outputs on `who`.
bool same_execution(const ExecutionTrace& a, const ExecutionTrace& b, const PartySet& who);

// One JSON object per line: a header record, then one record per round.
std::string trace_to_jsonl(const ExecutionTrace& trace);

std::string hex_bytes(std::string_view bytes);

}  // namespace lcba
