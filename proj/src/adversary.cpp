#include "lcba/adversary.hpp"

#include "execution_state.hpp"
#include "lcba/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <set>

namespace lcba {

LcAction abort_action() { return LcAction{}; }

LcAction select_action(Bit input, std::shared_ptr<const InboxSelection> selection) {
  LcAction a;
  a.kind = LcAction::Kind::select;
  a.input = input;
  a.selection = std::move(selection);
  return a;
}

void RoundPlan::send(PartyId from, PartyId to, LcAction action) {
  if (from >= n_ || to >= n_) throw std::out_of_range("round plan: party id out of range");
  if (by_sender_.size() < n_) by_sender_.resize(n_);
  auto& row = by_sender_[from];
  if (row.empty()) row.resize(n_);
  row[to].push_back(std::move(action));
}

void RoundPlan::send_all(PartyId from, const LcAction& action) {
  for (PartyId j = 0; j < n_; ++j) send(from, j, action);
}

const ActionSet& RoundPlan::actions(PartyId from, PartyId to) const {
  static const ActionSet none;
  if (!has_sender(from)) return none;
  return by_sender_[from][to];
}

namespace {

class IdleSession final : public AdversarySession {
 public:
  void act(const AdversaryView&, RoundPlan&) override {}
};

class HonestSession final : public AdversarySession {
 public:
  void act(const AdversaryView& view, RoundPlan& plan) override {
    for (PartyId s : view.corrupted()) plan.send_all(s, select_action(view.input(s)));
  }
};

}  // namespace

std::unique_ptr<AdversarySession> NoAdversary::open(const Protocol&, const InputVector&, Seed) const {
  return std::make_unique<IdleSession>();
}

HonestCorruption::HonestCorruption(PartySet corrupted, std::size_t budget)
    : corrupted_(make_set(std::move(corrupted))), budget_(budget) {
  if (corrupted_.size() > budget_) throw ConfigError("honest-corruption set exceeds its budget");
}

std::unique_ptr<AdversarySession> HonestCorruption::open(const Protocol&, const InputVector&, Seed) const {
  return std::make_unique<HonestSession>();
}

// ---- validator ---------------------------------------------------------------

namespace {

struct SlotRef {
  std::size_t round;  // 0-based
  PartyId from;
  std::size_t options;  // delivered payloads; kEmpty is one more option
};

// Candidate claimed inboxes for `party` before `round`, most plausible first,
// produced lazily since the search usually stops after a handful.  Only
// slots whose sender was corrupted at that round can hold anything but one
// genuine payload, so those are the ones varied.
class CandidateStream {
 public:
  CandidateStream(const std::vector<RoundMail>& rounds, const std::vector<int>& corruption_log, PartyId party,
                  int round, std::size_t cap)
      : cap_(cap) {
    const std::size_t n = corruption_log.size();
    genuine_.choice.assign(static_cast<std::size_t>(round - 1), std::vector<int>(n, 0));
    for (int r = 1; r < round; ++r) {
      const RoundMail& mail = rounds[static_cast<std::size_t>(r - 1)];
      for (PartyId u = 0; u < n; ++u) {
        std::size_t c = mail.delivered_count(u, party);
        genuine_.choice[static_cast<std::size_t>(r - 1)][u] = c == 0 ? InboxSelection::kEmpty : 0;
        if (corruption_log[u] <= r) flexible_.push_back(SlotRef{static_cast<std::size_t>(r - 1), u, c});
      }
    }
    for (const auto& f : flexible_) widest_ = std::max(widest_, f.options);
    digit_.assign(flexible_.size(), 0);
    seen_.insert(genuine_.choice);
  }

  // nullptr first (the genuine inbox), then alternatives; false when exhausted.
  bool next(std::shared_ptr<const InboxSelection>& out) {
    if (emitted_ == 0 && cap_ > 0) {
      ++emitted_;
      out = nullptr;
      return true;
    }
    while (emitted_ < cap_) {
      std::optional<InboxSelection> s = step();
      if (!s) return false;
      if (!seen_.insert(s->choice).second) continue;
      ++emitted_;
      out = std::make_shared<const InboxSelection>(std::move(*s));
      return true;
    }
    return false;
  }

  std::size_t emitted() const { return emitted_; }

 private:
  enum class Stage { start, uniform, all_empty, single_empty, mixed, done };

  std::optional<InboxSelection> step() {
    switch (stage_) {
      case Stage::start:
        if (flexible_.empty()) return std::nullopt;
        stage_ = Stage::uniform;
        j_ = 1;
        [[fallthrough]];
      case Stage::uniform:
        if (j_ < widest_) {
          InboxSelection s = genuine_;
          for (const auto& f : flexible_) {
            if (f.options > 0) s.choice[f.round][f.from] = static_cast<int>(std::min(j_, f.options - 1));
          }
          ++j_;
          return s;
        }
        stage_ = Stage::all_empty;
        [[fallthrough]];
      case Stage::all_empty: {
        InboxSelection s = genuine_;
        for (const auto& f : flexible_) s.choice[f.round][f.from] = InboxSelection::kEmpty;
        stage_ = Stage::single_empty;
        j_ = 0;
        return s;
      }
      case Stage::single_empty:
        while (j_ < flexible_.size() && flexible_[j_].options == 0) ++j_;
        if (j_ < flexible_.size()) {
          InboxSelection s = genuine_;
          s.choice[flexible_[j_].round][flexible_[j_].from] = InboxSelection::kEmpty;
          ++j_;
          return s;
        }
        stage_ = Stage::mixed;
        [[fallthrough]];
      case Stage::mixed: {
        // Mixed radix over every flexible slot, digit k meaning payload k-1 or empty at 0.
        InboxSelection s = genuine_;
        for (std::size_t i = 0; i < flexible_.size(); ++i) {
          s.choice[flexible_[i].round][flexible_[i].from] =
              digit_[i] == 0 ? InboxSelection::kEmpty : static_cast<int>(digit_[i] - 1);
        }
        std::size_t i = 0;
        while (i < flexible_.size()) {
          if (++digit_[i] <= flexible_[i].options) break;
          digit_[i] = 0;
          ++i;
        }
        if (i == flexible_.size()) stage_ = Stage::done;
        return s;
      }
      default:
        return std::nullopt;
    }
  }

  std::size_t cap_;
  InboxSelection genuine_;
  std::vector<SlotRef> flexible_;
  std::size_t widest_ = 0;
  std::vector<std::size_t> digit_;
  std::set<std::vector<std::vector<int>>> seen_;
  Stage stage_ = Stage::start;
  std::size_t j_ = 0;
  std::size_t emitted_ = 0;
};

}  // namespace

ValidationReport validate_locally_consistent(const ExecutionTrace& trace, const Protocol& spec,
                                             const AdversaryStrategy& strategy, const ValidatorOptions& options) {
  ValidationReport report;
  const std::size_t n = trace.n;
  auto fail = [&](int round, PartyId s, PartyId j, std::string why) {
    report.ok = false;
    report.violations.push_back(Violation{round, s, j, std::move(why)});
  };

  if (n != spec.n() || trace.corruption_log.size() != n || trace.inputs.size() != n) {
    fail(0, 0, 0, "trace shape does not match the protocol");
    return report;
  }
  std::size_t corrupted = 0;
  for (PartyId p = 0; p < n; ++p) {
    const int at = trace.corruption_log[p];
    if (at == kNever) continue;
    ++corrupted;
    if (at < 0) fail(0, p, p, "negative corruption round");
    if (strategy.schedule() == Schedule::static_set && at != 0) {
      fail(at, p, p, "static strategy corrupted a party after setup");
    }
  }
  if (corrupted > strategy.budget()) fail(0, 0, 0, "corrupted parties exceed the budget");

  std::vector<RoundMail> rounds;
  rounds.reserve(trace.mailboxes.size());
  for (const auto& box : trace.mailboxes) rounds.emplace_back(box, n);

  for (int r = 1; r <= trace.rounds_run(); ++r) {
    const RoundMail& mail = rounds[static_cast<std::size_t>(r - 1)];
    for (PartyId s = 0; s < n; ++s) {
      const bool corrupt_now = trace.corruption_log[s] <= r;
      const Coin coin = trace.coins.at(r, s);
      const std::string& setup = trace.setup.per_party[s];

      if (!corrupt_now) {
        std::string error;
        auto m = detail::replay_claimed(spec, s, trace.inputs[s], trace.setup, trace.coins, rounds, r, nullptr, &error);
        for (PartyId j = 0; j < n; ++j) {
          auto slot = mail.slot(s, j);
          if (slot.size() != 1 || slot[0].is_abort) {
            fail(r, s, j, "honest sender must deliver exactly one message");
            continue;
          }
          if (!m || slot[0].payload != spec.message(*m, r, j, coin, setup)) {
            fail(r, s, j, "honest message differs from the protocol's next message");
          }
        }
        continue;
      }

      // Unmatched non-abort payloads of this sender, per receiver.
      std::vector<std::vector<const std::string*>> open(n);
      std::size_t remaining = 0;
      for (PartyId j = 0; j < n; ++j) {
        for (const Message& msg : mail.slot(s, j)) {
          if (msg.round != r || msg.from != s || msg.to != j) fail(r, s, j, "message header does not match its slot");
          if (msg.is_abort) continue;
          open[j].push_back(&msg.payload);
          ++remaining;
        }
      }
      if (remaining == 0) continue;

      CandidateStream candidates(rounds, trace.corruption_log, s, r, options.max_candidates);
      std::shared_ptr<const InboxSelection> sel;
      while (candidates.next(sel)) {
        for (Bit b = 0; b <= 1 && remaining > 0; ++b) {
          auto m = detail::replay_claimed(spec, s, b, trace.setup, trace.coins, rounds, r, sel.get(), nullptr);
          if (!m) continue;
          for (PartyId j = 0; j < n; ++j) {
            if (open[j].empty()) continue;
            const std::string expected = spec.message(*m, r, j, coin, setup);
            auto& pending = open[j];
            auto it = std::remove_if(pending.begin(), pending.end(), [&](const std::string* p) { return *p == expected; });
            remaining -= static_cast<std::size_t>(pending.end() - it);
            pending.erase(it, pending.end());
          }
        }
        if (remaining == 0) break;
      }
      for (PartyId j = 0; j < n; ++j) {
        if (!open[j].empty()) {
          fail(r, s, j,
               std::to_string(open[j].size()) + " message(s) match no claimed input and inbox among " +
                   std::to_string(candidates.emitted()) + " candidate inboxes");
        }
      }
    }
  }
  return report;
}

std::string to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["ok"] = report.ok;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"round", v.round}, {"sender", v.sender}, {"receiver", v.receiver}, {"reason", v.reason}});
  }
  return j.dump();
}

std::pair<PartySet, PartySet> split_honest(const PartySet& who, Seed seed) {
  PrfStream rng(seed, Purpose::split);
  std::pair<PartySet, PartySet> halves;
  for (PartyId p : who) (rng.fair_bit() ? halves.second : halves.first).push_back(p);
  return halves;
}

}  // namespace lcba
