#include "lcba/attacks.hpp"

#include "lcba/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lcba {

std::string to_string(Regime r) { return r == Regime::third ? "third" : "quarter"; }

std::string to_string(Stage s) {
  switch (s) {
    case Stage::first_round:
      return "first-round";
    case Stage::second_round_arbitrary:
      return "second-round-arbitrary";
    default:
      return "second-round-pr";
  }
}

Regime parse_regime(const std::string& text) {
  if (text == "third") return Regime::third;
  if (text == "quarter") return Regime::quarter;
  throw ConfigError("unknown regime '" + text + "' (expected third or quarter)");
}

Stage parse_stage(const std::string& text) {
  if (text == "first-round") return Stage::first_round;
  if (text == "second-round-arbitrary" || text == "arbitrary") return Stage::second_round_arbitrary;
  if (text == "second-round-pr" || text == "pr") return Stage::second_round_pr;
  throw ConfigError("unknown stage '" + text + "' (expected first-round, second-round-arbitrary or second-round-pr)");
}

// ---- geometry ----------------------------------------------------------------

namespace {

InputVector blocks(std::initializer_list<std::pair<Bit, std::size_t>> runs) {
  std::vector<Bit> bits;
  for (const auto& [b, len] : runs) bits.insert(bits.end(), len, b);
  return InputVector(std::move(bits));
}

void third_vectors(AttackGeometry& g, std::size_t m) {
  const std::size_t rest = g.n - m;
  g.v0 = blocks({{0, m}, {1, (rest + 1) / 2}, {0, rest / 2}});
  g.v1 = flipped(g.v0, range_set(0, m));
  g.v_mixed = g.v1;
  g.base = g.v0;
  g.target = g.v1;
}

void quarter_vectors(AttackGeometry& g, std::size_t m) {
  if (3 * m > g.n) throw ConfigError("quarter-regime vectors need 3*" + std::to_string(m) + " <= n");
  const std::size_t rest = g.n - 3 * m;
  g.v0 = blocks({{0, 3 * m}, {1, rest}});
  g.v1 = blocks({{1, 2 * m}, {0, m}, {1, rest}});
  g.v_mixed = blocks({{1, m}, {0, 2 * m}, {1, rest}});
  g.base = g.v0;
  g.target = g.v_mixed;
}

void partition(AttackGeometry& g) {
  g.pivots = differing_positions(g.base, g.target);
  g.pivot_count = g.pivots.size();
  PartySet rest = complement(g.n, g.pivots);
  if (g.cell_size == 0) throw ConfigError("cell size must be positive");
  g.cells.clear();
  for (std::size_t i = 0; i < rest.size(); i += g.cell_size) {
    g.cells.emplace_back(rest.begin() + static_cast<long>(i),
                         rest.begin() + static_cast<long>(std::min(rest.size(), i + g.cell_size)));
  }
  g.cell_count = g.cells.size();
}

}  // namespace

std::string AttackGeometry::describe() const {
  std::ostringstream os;
  os << "stage=" << to_string(stage) << " regime=" << to_string(regime) << " n=" << n << " t=" << t << " pivot_count=" << pivot_count
     << " cell_size=" << cell_size << " cell_count=" << cell_count;
  if (width) os << " width=" << *width;
  if (stage == Stage::second_round_pr) {
    os << " eps_t=" << to_exact_text(eps_t) << " sigma=" << to_exact_text(sigma) << " abort_cap=" << abort_cap;
  }
  os << " pivots=" << format_set(pivots) << " base=" << base.str() << " target=" << target.str();
  for (const auto& note : notes) os << " [" << note << "]";
  return os.str();
}

AttackGeometry attack_geometry(std::size_t n, std::size_t t, Regime regime, Stage stage, std::optional<Rational> eps_t) {
  if (n < 2) throw ConfigError("attack geometry needs n >= 2");
  if (t >= n) throw ConfigError("t must be below n");
  AttackGeometry g;
  g.n = n;
  g.t = t;
  g.regime = regime;
  g.stage = stage;
  const Rational rn = n;
  const Rational rt = t;

  if (stage == Stage::first_round) {
    if (regime == Regime::third) {
      if (3 * t < n) throw OutOfScope("third regime needs t >= n/3");
      third_vectors(g, t);
    } else {
      if (4 * t < n) throw OutOfScope("quarter regime needs t >= n/4");
      quarter_vectors(g, t);
    }
    g.cell_size = n - t;
    partition(g);
    return g;
  }

  if (stage == Stage::second_round_arbitrary) {
    if (4 * t <= n) throw OutOfScope("second-round attack needs t > n/4");
    std::size_t pivot_count = static_cast<std::size_t>(ceil_ll(rn / 4));
    const long long slack = floor_ll(rt - rn / 4);
    if (slack >= 1) g.width = ceil_ll(Rational(static_cast<long long>(n - pivot_count), slack)) + 1;
    if (t < pivot_count + 1) {
      pivot_count = static_cast<std::size_t>(ceil_ll(Rational(static_cast<long long>(n - t), 3)));
      g.notes.push_back("pivot count ceil((n-t)/3) since t - ceil(n/4) < 1");
      if (t < pivot_count + 1) throw ConfigError("no room for a cell: t - pivot_count < 1");
    }
    g.cell_size = t - pivot_count;
    quarter_vectors(g, pivot_count);
    partition(g);
    if (!g.width) g.notes.push_back("bound width undefined (floor(t - n/4) = 0); audits use cell_count+1");
    return g;
  }

  Rational eps = eps_t ? *eps_t : (regime == Regime::third ? rt / rn - Rational(1, 3) : rt / rn - Rational(1, 4));
  if (eps <= 0) throw OutOfScope("public-randomness stage needs eps_t > 0");
  const Rational floor_fraction = regime == Regime::third ? Rational(1, 3) : Rational(1, 4);
  if (rt < (floor_fraction + eps) * rn) throw OutOfScope("t below (regime fraction + eps_t) * n");
  g.eps_t = eps;
  g.sigma = eps / 4;
  g.abort_cap = abort_cap(n, g.sigma);
  const long long pivot_count = ceil_ll(rt - eps * rn);
  if (pivot_count < 0 || static_cast<std::size_t>(pivot_count) >= t) throw ConfigError("pivot count must be below t");
  long long cell_size = (static_cast<long long>(t) - pivot_count) / 2;
  if (cell_size == 0) {
    cell_size = static_cast<long long>(t) - pivot_count - static_cast<long long>(g.abort_cap);
    g.notes.push_back("cell size t - pivot_count - floor(2 sigma n) since floor((t-pivot_count)/2) = 0");
    if (cell_size <= 0) throw ConfigError("no room for a cell next to the abort set");
  }
  g.cell_size = static_cast<std::size_t>(cell_size);
  if (regime == Regime::third) {
    third_vectors(g, static_cast<std::size_t>(pivot_count));
  } else {
    quarter_vectors(g, static_cast<std::size_t>(pivot_count));
  }
  partition(g);
  return g;
}

AttackGeometry retarget(const AttackGeometry& g, const InputVector& base, const InputVector& target) {
  if (base.size() != g.n || target.size() != g.n) throw ConfigError("retarget: vector length differs from n");
  AttackGeometry out = g;
  out.base = base;
  out.target = target;
  partition(out);
  return out;
}

std::vector<std::pair<InputVector, InputVector>> attack_pairs(const AttackGeometry& g) {
  if (g.stage == Stage::first_round) {
    if (g.regime == Regime::third) return {{g.v0, g.v1}};
    return {{g.v0, g.v_mixed}, {g.v_mixed, g.v1}};
  }
  if (g.regime == Regime::third && g.stage == Stage::second_round_pr) return {{g.v0, g.v1}, {g.v1, g.v0}};
  return {{g.v0, g.v_mixed}, {g.v1, g.v_mixed}};
}

std::size_t abort_cap(std::size_t n, const Rational& sigma) {
  return static_cast<std::size_t>(floor_ll(2 * sigma * static_cast<long long>(n)));
}

AbortSet sample_abort_set(std::size_t n, const Rational& sigma, Seed seed) {
  if (sigma <= 0 || sigma >= Rational(1, 2)) throw ConfigError("sigma must lie in (0, 1/2)");
  AbortSet s;
  s.sigma = sigma;
  s.cap = abort_cap(n, sigma);
  const double p = to_double(sigma);
  PrfStream rng(seed, Purpose::abort_set);
  for (;;) {
    s.members.clear();
    for (PartyId i = 0; i < n; ++i) {
      if (rng.bernoulli(p)) s.members.push_back(i);
    }
    if (s.members.size() <= s.cap) return s;
  }
}

// ---- world simulation --------------------------------------------------------

namespace {

struct Layout {
  std::vector<bool> pivot;
  std::vector<int> cell_of;  // -1 for pivots
  int cell_count = 0;

  explicit Layout(const AttackGeometry& g) : pivot(membership(g.n, g.pivots)), cell_of(g.n, -1), cell_count(static_cast<int>(g.cell_count)) {
    for (std::size_t c = 0; c < g.cells.size(); ++c) {
      for (PartyId p : g.cells[c]) cell_of[p] = static_cast<int>(c);
    }
  }

  int face(int world, PartyId j) const {
    if (world == 0) return 0;
    if (world == cell_count) return 1;
    if (pivot[j]) return -1;
    return cell_of[j] < world ? 1 : 0;
  }
};

void check_world(const AttackGeometry& g, int world) {
  if (world < 0 || static_cast<std::size_t>(world) > g.cell_count) throw ConfigError("world must lie in 0..cell_count");
}

}  // namespace

WorldSimulator::WorldSimulator(const Protocol& spec, const AttackGeometry& g, const InputVector& inputs,
                               const SetupBundle& setup, const std::vector<Coin>& round_one_coins)
    : spec_(&spec), g_(&g) {
  const std::size_t n = spec.n();
  if (g.n != n || inputs.size() != n || setup.per_party.size() != n || round_one_coins.size() != n) {
    throw ConfigError("world simulator: sizes do not match the protocol");
  }
  Layout layout(g);
  pivot_ = layout.pivot;
  cell_of_ = layout.cell_of;
  coin1_ = round_one_coins;
  setup_ = setup.per_party;

  std::vector<std::unique_ptr<PartyMachine>> real(n), flip(n);
  std::vector<std::vector<std::string>> real_msg(n), flip_msg(n);
  for (PartyId u = 0; u < n; ++u) {
    real[u] = spec.start(u, inputs[u], setup_[u]);
    real_msg[u].reserve(n);
    for (PartyId j = 0; j < n; ++j) real_msg[u].push_back(spec.message(*real[u], 1, j, coin1_[u], setup_[u]));
    if (pivot_[u]) {
      flip[u] = spec.start(u, static_cast<Bit>(1 - inputs[u]), setup_[u]);
      for (PartyId j = 0; j < n; ++j) flip_msg[u].push_back(spec.message(*flip[u], 1, j, coin1_[u], setup_[u]));
    }
  }
  after_real_.resize(n);
  after_flip_.resize(n);
  ReceivedRound inbox(n);
  for (PartyId j = 0; j < n; ++j) {
    for (int flipped_face = 0; flipped_face < 2; ++flipped_face) {
      for (PartyId u = 0; u < n; ++u) {
        const std::string& payload = (flipped_face && pivot_[u]) ? flip_msg[u][j] : real_msg[u][j];
        inbox[u] = spec.decode(1, payload);
      }
      std::unique_ptr<PartyMachine> m;
      if (pivot_[j] && flipped_face) {
        m = flip[j]->clone();
      } else {
        m = real[j]->clone();
      }
      m->absorb(1, coin1_[j], inbox);
      (flipped_face ? after_flip_ : after_real_)[j] = std::move(m);
    }
  }
}

int WorldSimulator::face(int world, PartyId pivot, PartyId receiver) const {
  (void)pivot;
  if (world == 0) return 0;
  if (world == static_cast<int>(g_->cell_count)) return 1;
  if (pivot_[receiver]) return -1;
  return cell_of_[receiver] < world ? 1 : 0;
}

bool WorldSimulator::flipped_view(int world, PartyId j) const {
  if (world == 0) return false;
  if (world == static_cast<int>(g_->cell_count)) return true;
  return cell_of_[j] >= 0 && cell_of_[j] < world;
}

std::vector<Output> WorldSimulator::run(int world, const std::vector<bool>& aborting,
                                        const std::vector<Coin>& round_two_coins) const {
  check_world(*g_, world);
  const std::size_t n = spec_->n();
  const bool edge = world == 0 || world == static_cast<int>(g_->cell_count);
  std::vector<Output> out(n);
  auto excluded = [&](PartyId j) { return pivot_[j] || (j < aborting.size() && aborting[j]); };
  auto state = [&](PartyId j) -> const PartyMachine& {
    return flipped_view(world, j) ? *after_flip_[j] : *after_real_[j];
  };
  if (spec_->q() < 2) {
    for (PartyId j = 0; j < n; ++j) {
      if (!excluded(j)) out[j] = state(j).decision();
    }
    return out;
  }
  if (round_two_coins.size() != n) throw ConfigError("world simulator: round-2 coin row has the wrong size");

  std::vector<std::vector<std::string>> payload(n);
  for (PartyId u = 0; u < n; ++u) {
    const bool silent = (u < aborting.size() && aborting[u]) || (pivot_[u] && !edge);
    if (silent) continue;
    payload[u].reserve(n);
    for (PartyId j = 0; j < n; ++j) payload[u].push_back(spec_->message(state(u), 2, j, round_two_coins[u], setup_[u]));
  }
  ReceivedRound inbox(n);
  for (PartyId j = 0; j < n; ++j) {
    if (excluded(j)) continue;
    for (PartyId u = 0; u < n; ++u) inbox[u] = payload[u].empty() ? Received{} : spec_->decode(2, payload[u][j]);
    auto m = state(j).clone();
    m->absorb(2, round_two_coins[j], inbox);
    out[j] = m->decision();
  }
  return out;
}

std::vector<Output> WorldSimulator::after_round_one(int world) const {
  check_world(*g_, world);
  std::vector<Output> out(spec_->n());
  for (PartyId j = 0; j < out.size(); ++j) {
    if (!pivot_[j]) out[j] = (flipped_view(world, j) ? *after_flip_[j] : *after_real_[j]).decision();
  }
  return out;
}

std::optional<Bit> unanimous(const std::vector<Output>& outputs, const std::vector<bool>& excluded) {
  std::optional<Bit> common;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (i < excluded.size() && excluded[i]) continue;
    if (!outputs[i]) return std::nullopt;
    if (common && *common != *outputs[i]) return std::nullopt;
    common = outputs[i];
  }
  return common;
}

std::size_t estimation_samples(double constant, std::size_t cell_count, double lambda) {
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  const double v = constant * std::log(static_cast<double>(cell_count) / lambda);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
}

std::size_t halting_loop_bound(const Rational& lambda, const Rational& delta) {
  if (lambda <= 0 || delta <= 0) throw ConfigError("lambda and delta must be positive");
  return static_cast<std::size_t>(ceil_ll(1 / (lambda * delta)));
}

PublicState recover_public_state(const AdversaryView& view, int through_round) {
  const Protocol& spec = view.spec();
  if (!spec.public_randomness()) throw ConfigError("public state is only readable for public-randomness protocols");
  if (view.corrupted().empty()) throw ConfigError("public state needs a corrupted observer");
  if (through_round > view.round()) throw std::logic_error("public state requested for a future round");
  const PartyId observer = view.corrupted().front();
  const std::size_t n = view.n();
  PublicState ps;
  ps.setup.per_party.resize(n);
  ps.setup.source = "recovered";
  ps.coins.assign(static_cast<std::size_t>(through_round), std::vector<Coin>(n, 0));
  for (PartyId u = 0; u < n; ++u) {
    if (view.is_corrupted(u)) {
      ps.setup.per_party[u] = std::string(view.setup(u));
      for (int r = 1; r <= through_round; ++r) ps.coins[static_cast<std::size_t>(r - 1)][u] = view.coin(r, u);
      continue;
    }
    for (int r = 1; r <= through_round; ++r) {
      Received got = view.decoded(r, observer, u);
      if (!got.present) throw std::logic_error("honest frame failed to decode");
      ps.coins[static_cast<std::size_t>(r - 1)][u] = got.coin;
      if (r == 1) ps.setup.per_party[u] = std::string(got.setup);
    }
  }
  return ps;
}

// ---- engine-side face planning --------------------------------------------------

namespace {

struct WorldChoice {
  int world = 0;
  const std::vector<bool>* aborting = nullptr;
};

// Turns world assignments into locally consistent actions.  In round 1 each
// pivot sends a receiver the faces its candidate worlds need, real face first;
// in round 2 every corrupted party claims the inbox of the receiver's world.
class FacePlanner {
 public:
  FacePlanner(const AttackGeometry& g, const InputVector& inputs) : layout_(g), inputs_(inputs), n_(g.n) {}

  void round_one(const AdversaryView& view, RoundPlan& plan, const std::vector<std::vector<int>>& worlds_for) {
    sent_.assign(n_, std::vector<std::uint8_t>(n_, 0));
    for (PartyId u : view.corrupted()) {
      if (!layout_.pivot[u]) {
        plan.send_all(u, select_action(inputs_[u]));
        continue;
      }
      for (PartyId j = 0; j < n_; ++j) {
        std::uint8_t mask = 0;
        for (int world : worlds_for[j]) {
          const int f = layout_.face(world, j);
          if (f >= 0) mask |= static_cast<std::uint8_t>(1 << f);
        }
        sent_[u][j] = mask;
        if (mask & 1) plan.send(u, j, select_action(inputs_[u]));
        if (mask & 2) plan.send(u, j, select_action(static_cast<Bit>(1 - inputs_[u])));
      }
    }
  }

  void round_two(const AdversaryView& view, RoundPlan& plan, const std::vector<std::optional<WorldChoice>>& world_for) {
    for (PartyId j = 0; j < n_; ++j) {
      if (view.is_corrupted(j) || !world_for[j]) continue;
      const WorldChoice choice = *world_for[j];
      const bool edge = choice.world == 0 || choice.world == layout_.cell_count;
      for (PartyId u : view.corrupted()) {
        if (choice.aborting && (*choice.aborting)[u]) continue;
        Bit input = inputs_[u];
        if (layout_.pivot[u]) {
          if (!edge) continue;
          if (choice.world == layout_.cell_count) input = static_cast<Bit>(1 - input);
        }
        plan.send(u, j, select_action(input, selection(view, choice.world, u)));
      }
    }
  }

 private:
  std::shared_ptr<const InboxSelection> selection(const AdversaryView& view, int world, PartyId u) {
    auto key = std::make_pair(world, u);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto sel = std::make_shared<InboxSelection>();
    std::vector<int> row(n_, InboxSelection::kEmpty);
    for (PartyId s = 0; s < n_; ++s) {
      if (layout_.pivot[s]) {
        const int f = layout_.face(world, u);
        if (f < 0) continue;
        const std::uint8_t mask = sent_[s][u];
        if (!(mask & (1 << f))) throw std::logic_error("world needs a face that was never sent");
        row[s] = f == 0 ? 0 : ((mask & 1) ? 1 : 0);
      } else if (view.delivered_count(1, u, s) > 0) {
        row[s] = 0;
      }
    }
    sel->choice.push_back(std::move(row));
    cache_.emplace(key, sel);
    return sel;
  }

  Layout layout_;
  InputVector inputs_;
  std::size_t n_;
  std::vector<std::vector<std::uint8_t>> sent_;
  std::map<std::pair<int, PartyId>, std::shared_ptr<const InboxSelection>> cache_;
};

std::vector<bool> mask_of(std::size_t n, const PartySet& s) { return membership(n, s); }

void require_budget(std::size_t used, std::size_t budget, const std::string& who) {
  if (used > budget) {
    throw ConfigError(who + ": corruption set of size " + std::to_string(used) + " exceeds t=" + std::to_string(budget));
  }
}

// ---- first round ----------------------------------------------------------------

class FirstRoundSession final : public AdversarySession {
 public:
  FirstRoundSession(const AttackGeometry& g, const InputVector& inputs, Seed seed, bool rushing)
      : g_(g), inputs_(inputs), seed_(seed), rushing_(rushing), planner_(g, inputs) {}

  void act(const AdversaryView& view, RoundPlan& plan) override {
    if (view.round() != 1) return;
    const std::size_t n = view.n();
    const int cell_count = static_cast<int>(g_.cell_count);
    std::vector<std::vector<int>> worlds(n);
    PartySet honest = complement(n, view.corrupted());
    if (rushing_ && view.spec().public_randomness()) {
      PublicState ps = recover_public_state(view, 1);
      WorldSimulator sim(view.spec(), g_, inputs_, ps.setup, ps.coins[0]);
      std::vector<Output> faces[2] = {sim.after_round_one(0), sim.after_round_one(cell_count)};
      std::vector<int> pick(n, 0);
      bool done = false;
      for (int a = 0; a < 2 && !done; ++a) {
        for (PartyId j : honest) {
          if (!faces[a][j]) {
            std::fill(pick.begin(), pick.end(), a);
            done = true;
            break;
          }
        }
      }
      for (std::size_t x = 0; x < honest.size() && !done; ++x) {
        for (std::size_t y = 0; y < honest.size() && !done; ++y) {
          if (x == y) continue;
          for (int a = 0; a < 2 && !done; ++a) {
            for (int b = 0; b < 2 && !done; ++b) {
              if (*faces[a][honest[x]] != *faces[b][honest[y]]) {
                pick[honest[x]] = a;
                pick[honest[y]] = b;
                done = true;
              }
            }
          }
        }
      }
      for (PartyId j : honest) worlds[j] = {pick[j] ? cell_count : 0};
    } else {
      auto halves = split_honest(honest, derive_seed(seed_, Purpose::split, 0));
      for (PartyId j : halves.first) worlds[j] = {0};
      for (PartyId j : halves.second) worlds[j] = {cell_count};
    }
    planner_.round_one(view, plan, worlds);
  }

 private:
  const AttackGeometry& g_;
  InputVector inputs_;
  Seed seed_;
  bool rushing_;
  FacePlanner planner_;
};

class FirstRoundAttack final : public AdversaryStrategy {
 public:
  FirstRoundAttack(AttackGeometry g, bool rushing) : g_(std::move(g)), rushing_(rushing) {}
  std::string name() const override { return rushing_ ? "first-round-rushing" : "first-round"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return rushing_ ? Timing::rushing : Timing::non_rushing; }
  std::size_t budget() const override { return g_.t; }
  PartySet initial_corruptions() const override { return g_.pivots; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector& inputs, Seed seed) const override {
    return std::make_unique<FirstRoundSession>(g_, inputs, seed, rushing_);
  }

 private:
  AttackGeometry g_;
  bool rushing_;
};

// ---- pivot variants ----------------------------------------------------------

class PivotSession final : public AdversarySession {
 public:
  PivotSession(const AttackGeometry& g, const InputVector& inputs, int world, const std::vector<bool>& aborting)
      : g_(g), inputs_(inputs), world_(world), aborting_(aborting), pivot_(membership(g.n, g.pivots)), planner_(g, inputs) {}

  void act(const AdversaryView& view, RoundPlan& plan) override {
    if (view.round() == 1) {
      planner_.round_one(view, plan, std::vector<std::vector<int>>(view.n(), std::vector<int>{world_}));
      return;
    }
    const bool edge = world_ == 0 || world_ == static_cast<int>(g_.cell_count);
    for (PartyId u : view.corrupted()) {
      if (aborting_[u]) continue;
      Bit input = inputs_[u];
      if (pivot_[u]) {
        if (!edge) continue;
        if (world_ != 0) input = static_cast<Bit>(1 - input);
      }
      plan.send_all(u, select_action(input));
    }
  }

 private:
  const AttackGeometry& g_;
  InputVector inputs_;
  int world_;
  std::vector<bool> aborting_;
  std::vector<bool> pivot_;
  FacePlanner planner_;
};

class PivotVariant final : public AdversaryStrategy {
 public:
  PivotVariant(AttackGeometry g, std::optional<int> world, PartySet aborting)
      : g_(std::move(g)), world_(world), aborting_(make_set(std::move(aborting))) {
    if (world_) check_world(g_, *world_);
    corrupted_ = set_union(g_.pivots, aborting_);
  }
  std::string name() const override { return world_ ? "pivot-variant(world=" + std::to_string(*world_) + ")" : "pivot-random-world"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::non_rushing; }
  std::size_t budget() const override { return corrupted_.size(); }
  PartySet initial_corruptions() const override { return corrupted_; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector& inputs, Seed seed) const override {
    int world = world_ ? *world_ : static_cast<int>(PrfStream(seed, Purpose::adversary).below(g_.cell_count + 1));
    return std::make_unique<PivotSession>(g_, inputs, world, mask_of(g_.n, aborting_));
  }

 private:
  AttackGeometry g_;
  std::optional<int> world_;
  PartySet aborting_;
  PartySet corrupted_;
};

// ---- static second-round attack ---------------------------------------------------

class StaticSession final : public AdversarySession {
 public:
  StaticSession(const AttackGeometry& g, const InputVector& inputs, Seed seed, int world)
      : g_(g), world_(world), planner_(g, inputs) {
    cell_ = g.cells[static_cast<std::size_t>(world)];
    PartySet honest = complement(g.n, set_union(g.pivots, cell_));
    halves_ = split_honest(honest, derive_seed(seed, Purpose::split, 0));
  }

  PartySet static_corruptions() const override { return cell_; }

  void act(const AdversaryView& view, RoundPlan& plan) override {
    const std::size_t n = view.n();
    if (view.round() == 1) {
      std::vector<std::vector<int>> worlds(n, std::vector<int>{world_, world_ + 1});
      for (PartyId j : halves_.first) worlds[j] = {world_};
      for (PartyId j : halves_.second) worlds[j] = {world_ + 1};
      planner_.round_one(view, plan, worlds);
    } else if (view.round() == 2) {
      std::vector<std::optional<WorldChoice>> worlds(n);
      for (PartyId j : halves_.first) worlds[j] = WorldChoice{world_, nullptr};
      for (PartyId j : halves_.second) worlds[j] = WorldChoice{world_ + 1, nullptr};
      planner_.round_two(view, plan, worlds);
    }
  }

 private:
  const AttackGeometry& g_;
  int world_;
  PartySet cell_;
  std::pair<PartySet, PartySet> halves_;
  FacePlanner planner_;
};

class StaticSecondRound final : public AdversaryStrategy {
 public:
  StaticSecondRound(AttackGeometry g, std::optional<int> world) : g_(std::move(g)), world_(world) {
    if (g_.cell_count < 1) throw ConfigError("static second-round attack needs at least one cell");
    if (world_ && (*world_ < 0 || static_cast<std::size_t>(*world_) >= g_.cell_count)) throw ConfigError("world must lie in 0..cell_count-1");
    std::size_t widest = 0;
    for (const auto& c : g_.cells) widest = std::max(widest, c.size());
    require_budget(g_.pivots.size() + widest, g_.t, "second-round static attack");
  }
  std::string name() const override { return "second-round-static"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::non_rushing; }
  std::size_t budget() const override { return g_.t; }
  PartySet initial_corruptions() const override { return g_.pivots; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector& inputs, Seed seed) const override {
    int world = world_ ? *world_ : static_cast<int>(PrfStream(seed, Purpose::adversary).below(g_.cell_count));
    return std::make_unique<StaticSession>(g_, inputs, seed, world);
  }

 private:
  AttackGeometry g_;
  std::optional<int> world_;
};

// ---- public-randomness halting attack -----------------------------------------------

class HaltingSession final : public AdversarySession {
 public:
  HaltingSession(const AttackGeometry& g, const HaltingAttackOptions& o, const InputVector& inputs, Seed seed)
      : g_(g), o_(o), inputs_(inputs), seed_(seed), planner_(g, inputs), pivot_mask_(membership(g.n, g.pivots)) {}

  PartySet corrupt_before_round(int round, const AdversaryView&) override {
    if (round != 2) return {};
    return set_union(abort_, g_.cells[static_cast<std::size_t>(world_)]);
  }

  void act(const AdversaryView& view, RoundPlan& plan) override {
    if (view.round() == 1) {
      choose(view);
      planner_.round_one(view, plan, std::vector<std::vector<int>>(view.n(), std::vector<int>{world_, world_ + 1}));
    } else if (view.round() == 2) {
      PublicState ps = recover_public_state(view, 2);
      const std::vector<Coin>& r = ps.coins[1];
      const std::vector<bool> none(view.n(), false);
      auto halts = [&](int x, bool with_abort) {
        const auto& excl = with_abort ? excluded_s_ : pivot_mask_;
        return unanimous(sim_->run(x, with_abort ? abort_mask_ : none, r), excl).has_value();
      };
      WorldChoice choice{world_, nullptr};
      if (!halts(world_, false)) {
        choice.world = world_;
      } else if (!halts(world_ + 1, false)) {
        choice.world = world_ + 1;
      } else {
        choice.world = !halts(world_, true) ? world_ : (!halts(world_ + 1, true) ? world_ + 1 : world_);
        choice.aborting = &abort_mask_;
      }
      std::vector<std::optional<WorldChoice>> worlds(view.n(), choice);
      planner_.round_two(view, plan, worlds);
    }
  }

 private:
  void choose(const AdversaryView& view) {
    const Protocol& spec = view.spec();
    const std::size_t n = view.n();
    PublicState ps = recover_public_state(view, 1);
    sim_ = std::make_unique<WorldSimulator>(spec, g_, inputs_, ps.setup, ps.coins[0]);

    const double lambda = to_double(o_.lambda);
    const std::size_t loops = o_.max_loops ? *o_.max_loops : halting_loop_bound(o_.lambda, o_.delta);
    const CoinDomain dom = spec.coin_domain(2);
    const std::size_t m = dom.empty() ? 1 : estimation_samples(o_.sample_constant, g_.cell_count, lambda);
    std::map<PartySet, std::pair<int, double>> memo;
    for (std::size_t it = 0; it < std::max<std::size_t>(loops, 1); ++it) {
      PartySet s = sample_abort_set(n, o_.sigma, derive_seed(seed_, Purpose::abort_set, it)).members;
      auto found = memo.find(s);
      if (found == memo.end()) found = memo.emplace(s, estimate(spec, s, m, it)).first;
      world_ = found->second.first;
      abort_ = s;
      if (found->second.second < 2 * lambda) break;
    }
    abort_mask_ = membership(n, abort_);
    excluded_s_ = membership(n, set_union(g_.pivots, abort_));
  }

  // argmin over i < cell_count of the chance that worlds i and i+1, with and
  // without the abort set, all end with one common output.
  std::pair<int, double> estimate(const Protocol& spec, const PartySet& s, std::size_t m, std::size_t it) {
    const std::size_t n = spec.n();
    const int cell_count = static_cast<int>(g_.cell_count);
    const std::vector<bool> none(n, false);
    const std::vector<bool> s_mask = membership(n, s);
    const std::vector<bool> excl_s = membership(n, set_union(g_.pivots, s));
    const Coin mask = spec.coin_domain(2).mask();
    const bool has_coins = !spec.coin_domain(2).empty();
    std::vector<std::vector<Coin>> tapes(m, std::vector<Coin>(n, 0));
    for (std::size_t x = 0; x < m; ++x) {
      if (!has_coins) break;
      PrfStream rng(seed_, Purpose::estimation, it, x);
      for (auto& c : tapes[x]) c = rng.next() & mask;
    }
    // memo[tape][2 * world + with_abort]: -2 unknown, -1 no common output.
    std::vector<std::vector<int>> outcome(m, std::vector<int>(2 * static_cast<std::size_t>(cell_count + 1), -2));
    auto value = [&](std::size_t x, int world, bool with_abort) {
      if (s.empty()) with_abort = false;
      int& slot = outcome[x][2 * static_cast<std::size_t>(world) + with_abort];
      if (slot == -2) {
        auto c = unanimous(sim_->run(world, with_abort ? s_mask : none, tapes[x]), with_abort ? excl_s : pivot_mask_);
        slot = c ? *c : -1;
      }
      return slot;
    };
    int best = 0;
    double best_xi = 2.0;
    for (int i = 0; i < cell_count; ++i) {
      std::size_t hits = 0;
      for (std::size_t x = 0; x < m; ++x) {
        const int c = value(x, i, false);
        if (c < 0) continue;
        if (value(x, i, true) == c && value(x, i + 1, false) == c && value(x, i + 1, true) == c) ++hits;
      }
      const double scores = static_cast<double>(hits) / static_cast<double>(m);
      if (scores < best_xi) {
        best_xi = scores;
        best = i;
      }
      if (scores == 0) break;
    }
    return {best, best_xi};
  }

  const AttackGeometry& g_;
  const HaltingAttackOptions& o_;
  InputVector inputs_;
  Seed seed_;
  FacePlanner planner_;
  std::vector<bool> pivot_mask_;
  std::unique_ptr<WorldSimulator> sim_;
  int world_ = 0;
  PartySet abort_;
  std::vector<bool> abort_mask_;
  std::vector<bool> excluded_s_;
};

class HaltingAttack final : public AdversaryStrategy {
 public:
  HaltingAttack(AttackGeometry g, HaltingAttackOptions o) : g_(std::move(g)), o_(std::move(o)) {
    std::size_t widest = 0;
    for (const auto& c : g_.cells) widest = std::max(widest, c.size());
    require_budget(g_.pivots.size() + widest + abort_cap(g_.n, o_.sigma), g_.t, "halting attack");
  }
  std::string name() const override { return "pr-halting"; }
  Schedule schedule() const override { return Schedule::adaptive; }
  Timing timing() const override { return Timing::rushing; }
  std::size_t budget() const override { return g_.t; }
  PartySet initial_corruptions() const override { return g_.pivots; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector& inputs, Seed seed) const override {
    return std::make_unique<HaltingSession>(g_, o_, inputs, seed);
  }

 private:
  AttackGeometry g_;
  HaltingAttackOptions o_;
};

// ---- public-randomness agreement attack ------------------------------------------------

class AgreementSession final : public AdversarySession {
 public:
  AgreementSession(const AttackGeometry& g, const AgreementAttackOptions& o, int world, const InputVector& inputs,
                   Seed seed)
      : world_(world), planner_(g, inputs) {
    const std::size_t n = g.n;
    abort_ = o.force_abort_set ? make_set(*o.force_abort_set)
                               : sample_abort_set(n, o.sigma, derive_seed(seed, Purpose::abort_set, 0)).members;
    abort_mask_ = membership(n, abort_);
    extra_ = set_union(abort_, g.cells[static_cast<std::size_t>(world - 1)]);
    PartySet honest = complement(n, set_union(g.pivots, extra_));
    if (o.force_split) {
      halves_.first = set_minus(make_set(o.force_split->first), complement(n, honest));
      halves_.second = set_minus(make_set(o.force_split->second), complement(n, honest));
    } else {
      halves_ = split_honest(honest, derive_seed(seed, Purpose::split, 0));
    }
    if (o.force_faces) {
      faces_ = *o.force_faces;
    } else {
      PrfStream rng(seed, Purpose::adversary, 1);
      faces_.first = rng.fair_bit();
      faces_.second = rng.fair_bit();
    }
  }

  PartySet static_corruptions() const override { return extra_; }

  void act(const AdversaryView& view, RoundPlan& plan) override {
    const std::size_t n = view.n();
    if (view.round() == 1) {
      planner_.round_one(view, plan, std::vector<std::vector<int>>(n, std::vector<int>{world_}));
    } else if (view.round() == 2) {
      std::vector<std::optional<WorldChoice>> worlds(n);
      for (PartyId j : halves_.first) worlds[j] = WorldChoice{world_, faces_.first ? &abort_mask_ : nullptr};
      for (PartyId j : halves_.second) worlds[j] = WorldChoice{world_, faces_.second ? &abort_mask_ : nullptr};
      planner_.round_two(view, plan, worlds);
    }
  }

 private:
  int world_;
  FacePlanner planner_;
  PartySet abort_;
  std::vector<bool> abort_mask_;
  PartySet extra_;
  std::pair<PartySet, PartySet> halves_;
  std::pair<bool, bool> faces_;
};

class AgreementAttack final : public AdversaryStrategy {
 public:
  AgreementAttack(AttackGeometry g, AgreementAttackOptions o, AgreementPlan plan)
      : g_(std::move(g)), o_(std::move(o)), plan_(std::move(plan)) {
    const std::size_t cap = o_.force_abort_set ? o_.force_abort_set->size() : abort_cap(g_.n, o_.sigma);
    require_budget(g_.pivots.size() + g_.cells[static_cast<std::size_t>(plan_.world - 1)].size() + cap, g_.t,
                   "agreement attack");
  }
  std::string name() const override { return "pr-agreement"; }
  Schedule schedule() const override { return Schedule::static_set; }
  Timing timing() const override { return Timing::rushing; }
  std::size_t budget() const override { return g_.t; }
  PartySet initial_corruptions() const override { return g_.pivots; }
  std::unique_ptr<AdversarySession> open(const Protocol&, const InputVector& inputs, Seed seed) const override {
    return std::make_unique<AgreementSession>(g_, o_, plan_.world, inputs, seed);
  }

 private:
  AttackGeometry g_;
  AgreementAttackOptions o_;
  AgreementPlan plan_;
};

void require_pr(const ProtocolSpec& spec, const AttackGeometry& g, const char* who) {
  if (!spec->public_randomness()) throw ConfigError(std::string(who) + " needs a public-randomness protocol");
  if (spec->n() != g.n) throw ConfigError(std::string(who) + ": geometry n differs from the protocol");
  if (spec->q() > 2) throw OutOfScope(std::string(who) + " targets halting within two rounds; truncate q to 2");
}

}  // namespace

StrategyPtr first_round_attack(const ProtocolSpec& spec, const AttackGeometry& g, bool rushing) {
  if (spec->n() != g.n) throw ConfigError("first-round attack: geometry n differs from the protocol");
  require_budget(g.pivots.size(), g.t, "first-round attack");
  return std::make_shared<FirstRoundAttack>(g, rushing);
}

StrategyPtr pivot_variant(const ProtocolSpec& spec, const AttackGeometry& g, std::optional<int> world, PartySet aborting) {
  if (spec->n() != g.n) throw ConfigError("pivot variant: geometry n differs from the protocol");
  for (PartyId p : aborting) {
    if (p >= g.n) throw ConfigError("abort set member out of range");
  }
  return std::make_shared<PivotVariant>(g, world, std::move(aborting));
}

StrategyPtr second_round_static_attack(const ProtocolSpec& spec, const AttackGeometry& g, std::optional<int> world) {
  if (spec->n() != g.n) throw ConfigError("second-round attack: geometry n differs from the protocol");
  return std::make_shared<StaticSecondRound>(g, world);
}

StrategyPtr pr_halting_attack(const ProtocolSpec& spec, const AttackGeometry& g, const HaltingAttackOptions& options) {
  require_pr(spec, g, "halting attack");
  if (options.lambda <= 0 || options.delta <= 0) throw ConfigError("lambda and delta must be positive");
  if (options.sigma <= 0 || options.sigma >= Rational(1, 2)) throw ConfigError("sigma must lie in (0, 1/2)");
  return std::make_shared<HaltingAttack>(g, options);
}

AgreementPlan estimate_agreement_plan(const ProtocolSpec& spec, const AttackGeometry& g,
                                      const AgreementAttackOptions& options) {
  require_pr(spec, g, "agreement attack");
  AgreementPlan plan;
  if (options.force_world) {
    if (*options.force_world < 1 || static_cast<std::size_t>(*options.force_world) >= g.cell_count) {
      throw ConfigError("forced world must lie in 1..cell_count-1");
    }
    plan.world = *options.force_world;
    return plan;
  }
  if (g.cell_count < 2) throw ConfigError("agreement attack needs at least two cells");
  const double alpha = to_double(options.alpha);
  if (!(alpha > 0)) throw ConfigError("alpha must be positive");
  const std::size_t wanted = estimation_samples(options.sample_constant / alpha, g.cell_count, alpha);
  plan.samples = std::min(wanted, options.max_samples);
  const std::size_t n = g.n;
  const int cell_count = static_cast<int>(g.cell_count);
  std::vector<std::size_t> hits(g.cell_count, 0);
  const std::vector<bool> none(n, false);
  for (std::size_t x = 0; x < plan.samples; ++x) {
    const Seed s = derive_seed(options.seed, Purpose::estimation, x);
    PartySet abort = sample_abort_set(n, options.sigma, derive_seed(s, Purpose::abort_set, 0)).members;
    if (abort.empty()) continue;  // both faces coincide
    SetupBundle setup = draw_setup(*spec, s);
    CoinTape coins = draw_coins(*spec, s);
    WorldSimulator sim(*spec, g, g.base, setup, coins.per_round[0]);
    const std::vector<bool> s_mask = membership(n, abort);
    for (int i = 1; i < cell_count; ++i) {
      PartySet out = set_union(g.pivots, g.cells[static_cast<std::size_t>(i - 1)]);
      auto plain = unanimous(sim.run(i, none, coins.per_round[1]), membership(n, out));
      if (!plain) continue;
      auto masked = unanimous(sim.run(i, s_mask, coins.per_round[1]), membership(n, set_union(out, abort)));
      if (masked && *masked != *plain) ++hits[static_cast<std::size_t>(i)];
    }
  }
  plan.scores.assign(g.cell_count, 0.0);
  double best = -1;
  for (int i = 1; i < cell_count; ++i) {
    plan.scores[static_cast<std::size_t>(i)] =
        plan.samples ? static_cast<double>(hits[static_cast<std::size_t>(i)]) / static_cast<double>(plan.samples) : 0;
    if (plan.scores[static_cast<std::size_t>(i)] > best) {
      best = plan.scores[static_cast<std::size_t>(i)];
      plan.world = i;
    }
  }
  return plan;
}

StrategyPtr pr_agreement_attack(const ProtocolSpec& spec, const AttackGeometry& g, const AgreementAttackOptions& options) {
  if (options.sigma <= 0 || options.sigma >= Rational(1, 2)) throw ConfigError("sigma must lie in (0, 1/2)");
  AgreementPlan plan = estimate_agreement_plan(spec, g, options);
  return std::make_shared<AgreementAttack>(g, options, plan);
}

}  // namespace lcba
