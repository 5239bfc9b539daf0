#include "lcba/engine.hpp"

#include "execution_state.hpp"

#include <algorithm>
#include <stdexcept>

namespace lcba {

// ---- RoundMail ------------------------------------------------------------

RoundMail::RoundMail(std::vector<Message> messages, std::size_t n) : messages_(std::move(messages)), n_(n) {
  std::stable_sort(messages_.begin(), messages_.end(), [](const Message& a, const Message& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  offsets_.assign(n * n + 1, 0);
  for (const Message& m : messages_) {
    if (m.from >= n || m.to >= n) throw ConfigError("message endpoint out of range");
    ++offsets_[m.from * n + m.to + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::span<const Message> RoundMail::slot(PartyId from, PartyId to) const {
  std::size_t k = from * n_ + to;
  return {messages_.data() + offsets_[k], messages_.data() + offsets_[k + 1]};
}

const Message* RoundMail::accepted(PartyId from, PartyId to) const { return delivered(from, to, 0); }

const Message* RoundMail::delivered(PartyId from, PartyId to, std::size_t i) const {
  for (const Message& m : slot(from, to)) {
    if (m.is_abort) continue;
    if (i == 0) return &m;
    --i;
  }
  return nullptr;
}

std::size_t RoundMail::delivered_count(PartyId from, PartyId to) const {
  std::size_t c = 0;
  for (const Message& m : slot(from, to)) c += !m.is_abort;
  return c;
}

// ---- AdversaryView --------------------------------------------------------

namespace {

void require_corrupt(const detail::ExecutionState& s, PartyId p, const char* what) {
  if (p >= s.n || !s.is_corrupt[p]) {
    throw std::logic_error(std::string("adversary view: ") + what + " of a party that is not corrupted");
  }
}

}  // namespace

int AdversaryView::round() const { return state_->round; }
std::size_t AdversaryView::n() const { return state_->n; }
const Protocol& AdversaryView::spec() const { return *state_->spec; }
bool AdversaryView::rushing() const { return state_->rushing; }
const PartySet& AdversaryView::corrupted() const { return state_->corrupted; }
bool AdversaryView::is_corrupted(PartyId p) const { return p < state_->n && state_->is_corrupt[p]; }

Bit AdversaryView::input(PartyId p) const {
  require_corrupt(*state_, p, "input");
  return (*state_->inputs)[p];
}

std::string_view AdversaryView::setup(PartyId p) const {
  require_corrupt(*state_, p, "setup");
  return state_->setup->per_party[p];
}

Coin AdversaryView::coin(int round, PartyId p) const {
  require_corrupt(*state_, p, "coin");
  if (round < 1 || round > state_->round) throw std::logic_error("adversary view: coin from a future round");
  return state_->coins->at(round, p);
}

std::size_t AdversaryView::delivered_count(int round, PartyId to, PartyId from) const {
  require_corrupt(*state_, to, "inbox");
  if (round >= 1 && round < state_->round) return state_->rounds[static_cast<std::size_t>(round - 1)].delivered_count(from, to);
  if (round == state_->round) {
    if (!state_->rushing) throw std::logic_error("adversary view: non-rushing strategy read current-round traffic");
    if (!state_->current_visible) throw std::logic_error("adversary view: current-round traffic not yet sent");
    return state_->pending[from].empty() ? 0 : 1;
  }
  throw std::logic_error("adversary view: round out of range");
}

std::string_view AdversaryView::delivered(int round, PartyId to, PartyId from, std::size_t index) const {
  if (index >= delivered_count(round, to, from)) throw std::out_of_range("adversary view: no such delivered message");
  if (round < state_->round) {
    return state_->rounds[static_cast<std::size_t>(round - 1)].delivered(from, to, index)->payload;
  }
  return state_->pending[from][to].payload;
}

Received AdversaryView::decoded(int round, PartyId to, PartyId from, std::size_t index) const {
  return state_->spec->decode(round, delivered(round, to, from, index));
}

PartySet AdversarySession::corrupt_before_round(int, const AdversaryView&) { return {}; }

// ---- replay ---------------------------------------------------------------

namespace detail {

std::unique_ptr<PartyMachine> replay_claimed(const Protocol& spec, PartyId party, Bit input,
                                             const SetupBundle& setup, const CoinTape& coins,
                                             const std::vector<RoundMail>& rounds, int round,
                                             const InboxSelection* selection, std::string* error) {
  const std::size_t n = spec.n();
  auto machine = spec.start(party, input, setup.per_party[party]);
  ReceivedRound inbox(n);
  for (int r = 1; r < round; ++r) {
    const RoundMail& mail = rounds[static_cast<std::size_t>(r - 1)];
    const std::vector<int>* row = nullptr;
    if (selection && static_cast<std::size_t>(r - 1) < selection->choice.size()) {
      row = &selection->choice[static_cast<std::size_t>(r - 1)];
    }
    for (PartyId u = 0; u < n; ++u) {
      const Message* m = nullptr;
      if (row && u < row->size()) {
        int c = (*row)[u];
        if (c != InboxSelection::kEmpty) {
          if (c < 0) {
            if (error) *error = "negative inbox selection";
            return nullptr;
          }
          m = mail.delivered(u, party, static_cast<std::size_t>(c));
          if (!m) {
            if (error) {
              *error = "claimed inbox references round " + std::to_string(r) + " payload #" + std::to_string(c) +
                       " from party " + std::to_string(u) + " which was never delivered";
            }
            return nullptr;
          }
        }
      } else {
        m = mail.accepted(u, party);
      }
      inbox[u] = m ? spec.decode(r, m->payload) : Received{};
    }
    machine->absorb(r, coins.at(r, party), inbox);
  }
  return machine;
}

}  // namespace detail

// ---- engine ---------------------------------------------------------------

SetupBundle draw_setup(const Protocol& spec, Seed seed) {
  SetupBundle s = spec.sample_setup(derive_seed(seed, Purpose::setup, 0));
  if (s.per_party.size() != spec.n()) throw ConfigError("setup sampler returned the wrong party count");
  return s;
}

CoinTape draw_coins(const Protocol& spec, Seed seed) {
  CoinTape tape;
  const std::size_t n = spec.n();
  for (int r = 1; r <= spec.q(); ++r) {
    CoinDomain d = spec.coin_domain(r);
    tape.shape.push_back(d);
    std::vector<Coin> row(n, 0);
    if (!d.empty()) {
      for (PartyId i = 0; i < n; ++i) row[i] = prf(seed, Purpose::coin, 0, i, static_cast<std::uint64_t>(r)) & d.mask();
    }
    tape.per_round.push_back(std::move(row));
  }
  return tape;
}

namespace {

struct CachedMachine {
  Bit input;
  const InboxSelection* selection;
  std::unique_ptr<PartyMachine> machine;
};

void materialize(const Protocol& spec, detail::ExecutionState& st, PartyId s, const RoundPlan& plan,
                 std::vector<Message>& out) {
  const int r = st.round;
  const Coin coin = st.coins->at(r, s);
  const std::string& setup = st.setup->per_party[s];
  std::vector<CachedMachine> cache;
  for (PartyId j = 0; j < st.n; ++j) {
    for (const LcAction& a : plan.actions(s, j)) {
      if (a.kind == LcAction::Kind::abort) {
        out.push_back(Message{r, s, j, std::string(), true});
        continue;
      }
      if (a.input > 1) throw StrategyViolation(r, s, j, "claimed input is not a bit");
      const PartyMachine* m = nullptr;
      for (const auto& c : cache) {
        if (c.input == a.input && c.selection == a.selection.get()) m = c.machine.get();
      }
      if (!m) {
        std::string error;
        auto built = detail::replay_claimed(spec, s, a.input, *st.setup, *st.coins, st.rounds, r, a.selection.get(),
                                            &error);
        if (!built) throw StrategyViolation(r, s, j, error);
        m = built.get();
        cache.push_back(CachedMachine{a.input, a.selection.get(), std::move(built)});
      }
      out.push_back(Message{r, s, j, spec.message(*m, r, j, coin, setup), false});
    }
  }
}

}  // namespace

ExecutionTrace run_on_tape(const Protocol& spec, const InputVector& inputs, const AdversaryStrategy& adversary,
                           const SetupBundle& setup, const CoinTape& coins, Seed adversary_seed) {
  const std::size_t n = spec.n();
  const int q = spec.q();
  if (inputs.size() != n) {
    throw ConfigError("input vector has length " + std::to_string(inputs.size()) + " but the protocol has n=" +
                      std::to_string(n));
  }
  if (setup.per_party.size() != n) throw ConfigError("setup bundle has the wrong party count");
  if (coins.per_round.size() < static_cast<std::size_t>(q)) throw ConfigError("coin tape shorter than the round budget");
  for (const auto& row : coins.per_round) {
    if (row.size() != n) throw ConfigError("coin tape row has the wrong party count");
  }
  const std::size_t budget = adversary.budget();
  if (budget > n) throw ConfigError("corruption budget exceeds n");

  detail::ExecutionState st;
  st.spec = &spec;
  st.n = n;
  st.inputs = &inputs;
  st.setup = &setup;
  st.coins = &coins;
  st.rushing = adversary.timing() == Timing::rushing;
  st.is_corrupt.assign(n, false);

  ExecutionTrace trace;
  trace.n = n;
  trace.q = q;
  trace.inputs = inputs;
  trace.setup = setup;
  trace.coins = coins;
  trace.coins.per_round.resize(static_cast<std::size_t>(q));
  if (trace.coins.shape.size() > static_cast<std::size_t>(q)) trace.coins.shape.resize(static_cast<std::size_t>(q));
  trace.halt_round.assign(n, kNever);
  trace.outputs.assign(n, std::nullopt);
  trace.corruption_log.assign(n, kNever);

  std::unique_ptr<AdversarySession> session = adversary.open(spec, inputs, adversary_seed);
  PartySet initial = set_union(make_set(adversary.initial_corruptions()), make_set(session->static_corruptions()));
  if (initial.size() > budget) throw ConfigError("initial corruptions exceed the budget");
  for (PartyId p : initial) {
    if (p >= n) throw ConfigError("corrupted party id out of range");
    st.is_corrupt[p] = true;
    trace.corruption_log[p] = 0;
  }
  st.corrupted = initial;

  std::vector<std::unique_ptr<PartyMachine>> machines(n);
  for (PartyId i = 0; i < n; ++i) {
    if (!st.is_corrupt[i]) machines[i] = spec.start(i, inputs[i], setup.per_party[i]);
  }

  AdversaryView view(st);
  ReceivedRound inbox(n);
  st.pending.assign(n, {});

  for (int r = 1; r <= q; ++r) {
    st.round = r;
    st.current_visible = false;

    if (adversary.schedule() == Schedule::adaptive) {
      PartySet extra = make_set(session->corrupt_before_round(r, view));
      for (PartyId p : extra) {
        if (p >= n) throw StrategyViolation(r, p, p, "corrupted party id out of range");
        if (st.is_corrupt[p]) continue;
        st.is_corrupt[p] = true;
        trace.corruption_log[p] = r;
        machines[p].reset();
      }
      st.corrupted = set_union(st.corrupted, extra);
      if (st.corrupted.size() > budget) {
        throw StrategyViolation(r, extra.empty() ? 0 : extra.back(), 0, "cumulative corruptions exceed the budget");
      }
    }

    for (PartyId i = 0; i < n; ++i) {
      auto& row = st.pending[i];
      row.clear();
      if (st.is_corrupt[i]) continue;
      const Coin coin = coins.at(r, i);
      row.reserve(n);
      for (PartyId j = 0; j < n; ++j) {
        row.push_back(Message{r, i, j, spec.message(*machines[i], r, j, coin, setup.per_party[i]), false});
      }
    }
    st.current_visible = true;

    RoundPlan plan(n);
    if (!st.corrupted.empty()) session->act(view, plan);

    std::vector<Message> all;
    all.reserve(n * n);
    for (PartyId i = 0; i < n; ++i) {
      if (!st.is_corrupt[i]) {
        if (plan.has_sender(i)) throw StrategyViolation(r, i, 0, "adversary tried to speak for an honest party");
        for (auto& m : st.pending[i]) all.push_back(std::move(m));
        st.pending[i].clear();
      } else {
        materialize(spec, st, i, plan, all);
      }
    }
    st.current_visible = false;
    st.rounds.emplace_back(std::move(all), n);
    const RoundMail& mail = st.rounds.back();

    bool all_halted = true;
    for (PartyId j = 0; j < n; ++j) {
      if (st.is_corrupt[j]) continue;
      for (PartyId u = 0; u < n; ++u) {
        const Message* m = mail.accepted(u, j);
        inbox[u] = m ? spec.decode(r, m->payload) : Received{};
      }
      machines[j]->absorb(r, coins.at(r, j), inbox);
      if (trace.halt_round[j] == kNever) {
        if (Output out = machines[j]->decision()) {
          trace.halt_round[j] = r;
          trace.outputs[j] = out;
        } else {
          all_halted = false;
        }
      }
    }
    if (all_halted) break;
  }

  trace.mailboxes.reserve(st.rounds.size());
  for (RoundMail& mail : st.rounds) trace.mailboxes.push_back(std::move(mail.mutable_messages()));
  for (PartyId i = 0; i < n; ++i) {
    if (st.is_corrupt[i]) {
      trace.halt_round[i] = kNever;
      trace.outputs[i] = std::nullopt;
    }
  }
  return trace;
}

ExecutionTrace run(const ProtocolSpec& spec, const InputVector& inputs, const AdversaryStrategy& adversary, Seed seed) {
  SetupBundle setup = draw_setup(*spec, seed);
  CoinTape coins = draw_coins(*spec, seed);
  return run_on_tape(*spec, inputs, adversary, setup, coins, derive_seed(seed, Purpose::adversary, 0));
}

ExecutionTrace run_honest(const ProtocolSpec& spec, const InputVector& inputs, Seed seed) {
  static const NoAdversary none;
  return run(spec, inputs, none, seed);
}

}  // namespace lcba
