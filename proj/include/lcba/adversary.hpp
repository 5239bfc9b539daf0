#pragma once

#include "lcba/protocol.hpp"
#include "lcba/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lcba {

namespace detail {
struct ExecutionState;
}

// For each earlier round and sender, which delivered (non-abort) payload the
// corrupted party claims to have received: an index into the slot, or kEmpty.
// Rounds or senders beyond the stored extent fall back to the genuine choice.
struct InboxSelection {
  static constexpr int kEmpty = -1;
  std::vector<std::vector<int>> choice;  // [round - 1][sender]

  bool operator==(const InboxSelection&) const = default;
};

struct LcAction {
  enum class Kind { abort, select };
  Kind kind = Kind::abort;
  Bit input = 0;
  // nullptr selects the genuine inbox: the first delivered payload per slot.
  std::shared_ptr<const InboxSelection> selection;
};

LcAction abort_action();
LcAction select_action(Bit input, std::shared_ptr<const InboxSelection> selection = nullptr);

using ActionSet = std::vector<LcAction>;

// Actions of the corrupted senders for one round.  A slot with no action sends
// nothing, which receivers see as an abort.
class RoundPlan {
 public:
  explicit RoundPlan(std::size_t n) : n_(n) {}

  void send(PartyId from, PartyId to, LcAction action);
  void send_all(PartyId from, const LcAction& action);
  const ActionSet& actions(PartyId from, PartyId to) const;
  bool has_sender(PartyId from) const { return from < by_sender_.size() && !by_sender_[from].empty(); }

 private:
  std::size_t n_;
  std::vector<std::vector<ActionSet>> by_sender_;
};

enum class Timing { rushing, non_rushing };
enum class Schedule { static_set, adaptive };

// What the adversary may look at when it chooses.  Accessors refuse anything
// outside the model: other parties' private state, or current-round honest
// traffic for non-rushing strategies.
class AdversaryView {
 public:
  explicit AdversaryView(const detail::ExecutionState& state) : state_(&state) {}

  int round() const;
  std::size_t n() const;
  const Protocol& spec() const;
  bool rushing() const;
  const PartySet& corrupted() const;
  bool is_corrupted(PartyId p) const;

  Bit input(PartyId corrupted_party) const;
  std::string_view setup(PartyId corrupted_party) const;
  Coin coin(int round, PartyId corrupted_party) const;

  // Non-abort payloads sent from `from` to the corrupted party `to` in `round`.
  // The current round is visible only to rushing strategies, and only for
  // honest senders.
  std::size_t delivered_count(int round, PartyId to, PartyId from) const;
  std::string_view delivered(int round, PartyId to, PartyId from, std::size_t index = 0) const;
  Received decoded(int round, PartyId to, PartyId from, std::size_t index = 0) const;

 private:
  const detail::ExecutionState* state_;
};

class AdversarySession {
 public:
  virtual ~AdversarySession() = default;
  // Extra parties corrupted before setup, for strategies that draw their set
  // per execution.  Logged as static corruptions.
  virtual PartySet static_corruptions() const { return {}; }
  // Adaptive strategies name extra parties to corrupt before `round` starts.
  virtual PartySet corrupt_before_round(int round, const AdversaryView& view);
  virtual void act(const AdversaryView& view, RoundPlan& plan) = 0;
};

class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;
  virtual std::string name() const = 0;
  virtual Schedule schedule() const = 0;
  virtual Timing timing() const = 0;
  virtual std::size_t budget() const = 0;
  // Fixed before setup sampling.
  virtual PartySet initial_corruptions() const = 0;
  // One session per execution; sessions may keep state across rounds.
  virtual std::unique_ptr<AdversarySession> open(const Protocol& spec, const InputVector& inputs,
                                                 Seed seed) const = 0;
};

using StrategyPtr = std::shared_ptr<const AdversaryStrategy>;

class NoAdversary final : public AdversaryStrategy {
 public:
  std::string name() const override { return "none"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::non_rushing; }
  std::size_t budget() const override { return 0; }
  PartySet initial_corruptions() const override { return {}; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector&, Seed) const override;
};

// Static strategy whose corrupted parties follow the protocol on their real
// inputs.  Used to measure validity when the corrupted set covers exactly the
// dissenting inputs.
class HonestCorruption final : public AdversaryStrategy {
 public:
  HonestCorruption(PartySet corrupted, std::size_t budget);
  std::string name() const override { return "honest-corruption"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::non_rushing; }
  std::size_t budget() const override { return budget_; }
  PartySet initial_corruptions() const override { return corrupted_; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector&, Seed) const override;

 private:
  PartySet corrupted_;
  std::size_t budget_;
};

struct Violation {
  int round = 0;
  PartyId sender = 0;
  PartyId receiver = 0;
  std::string reason;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

struct ValidatorOptions {
  // Cap on candidate (input, selection) pairs tried per corrupted sender and round.
  std::size_t max_candidates = 1 << 14;
};

struct ExecutionTrace;

ValidationReport validate_locally_consistent(const ExecutionTrace& trace, const Protocol& spec,
                                             const AdversaryStrategy& strategy, const ValidatorOptions& options = {});

std::string to_json(const ValidationReport& report);

// Every member goes to one half by an independent fair bit.
std::pair<PartySet, PartySet> split_honest(const PartySet& who, Seed seed);

}  // namespace lcba
