#pragma once

#include "lcba/adversary.hpp"
#include "lcba/protocol.hpp"
#include "lcba/rational.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lcba {

enum class Regime { third, quarter };
enum class Stage { first_round, second_round_arbitrary, second_round_pr };

std::string to_string(Regime r);
std::string to_string(Stage s);
Regime parse_regime(const std::string& text);
Stage parse_stage(const std::string& text);

// Pivot set, cells and extremal inputs shared by the attacks.  `base` is the
// input the attack runs on and `target` the one the pivots drift toward; the
// pivots are exactly where they differ.  Cells partition the non-pivots in
// index order, the last one possibly short.
struct AttackGeometry {
  std::size_t n = 0;
  std::size_t t = 0;
  Regime regime = Regime::third;
  Stage stage = Stage::first_round;
  std::size_t pivot_count = 0;
  std::size_t cell_size = 0;
  std::size_t cell_count = 0;
  std::optional<long long> width;  // second-round bound width, when its formula is defined
  PartySet pivots;
  std::vector<PartySet> cells;
  InputVector v0, v1, v_mixed;
  InputVector base, target;
  Rational eps_t = 0;  // second-round public-randomness stage only
  Rational sigma = 0;
  std::size_t abort_cap = 0;
  std::vector<std::string> notes;  // fallbacks taken

  long long audit_width() const { return width ? *width : static_cast<long long>(cell_count) + 1; }
  std::string describe() const;
};

AttackGeometry attack_geometry(std::size_t n, std::size_t t, Regime regime, Stage stage,
                               std::optional<Rational> eps_t = std::nullopt);

// Same cell size, new endpoints; pivots and cells are recomputed.
AttackGeometry retarget(const AttackGeometry& g, const InputVector& base, const InputVector& target);

// The (base, target) pairs each stage attacks.
std::vector<std::pair<InputVector, InputVector>> attack_pairs(const AttackGeometry& g);

struct AbortSet {
  PartySet members;
  Rational sigma;
  std::size_t cap = 0;
};

std::size_t abort_cap(std::size_t n, const Rational& sigma);
AbortSet sample_abort_set(std::size_t n, const Rational& sigma, Seed seed);

// Replays the pivot protocol family on a fixed setup and round-1 coins.  In
// world i pivots send flipped-input messages to the first i cells and
// real-input ones to the rest, nothing to other pivots, and abort from round 2
// unless i is 0 or the cell count (honest on the real or flipped input).
// Parties marked aborting also abort from round 2.
class WorldSimulator {
 public:
  WorldSimulator(const Protocol& spec, const AttackGeometry& g, const InputVector& inputs, const SetupBundle& setup,
                 const std::vector<Coin>& round_one_coins);

  // -1: nothing, 0: real input, 1: flipped input.
  int face(int world, PartyId pivot, PartyId receiver) const;
  // Decisions after min(q, 2) rounds.  Pivots and aborting parties get nullopt.
  std::vector<Output> run(int world, const std::vector<bool>& aborting, const std::vector<Coin>& round_two_coins) const;
  // Decisions right after round 1, whatever q is.
  std::vector<Output> after_round_one(int world) const;

  const AttackGeometry& geometry() const { return *g_; }

 private:
  bool flipped_view(int world, PartyId j) const;

  const Protocol* spec_;
  const AttackGeometry* g_;
  std::vector<bool> pivot_;
  std::vector<int> cell_of_;
  std::vector<Coin> coin1_;
  std::vector<std::string> setup_;
  // Machines after round 1 as seen with real-face and flipped-face pivot traffic.
  std::vector<std::unique_ptr<PartyMachine>> after_real_;
  std::vector<std::unique_ptr<PartyMachine>> after_flip_;
};

// Common output of every party outside `excluded`; nullopt when one of them
// has no output, they disagree, or nobody is left.
std::optional<Bit> unanimous(const std::vector<Output>& outputs, const std::vector<bool>& excluded);

StrategyPtr first_round_attack(const ProtocolSpec& spec, const AttackGeometry& g, bool rushing);

// Without a world, one is drawn uniformly from 0..cell_count per execution.
StrategyPtr pivot_variant(const ProtocolSpec& spec, const AttackGeometry& g, std::optional<int> world,
                          PartySet aborting = {});

// Without a world, one is drawn uniformly from 0..cell_count-1 per execution.
StrategyPtr second_round_static_attack(const ProtocolSpec& spec, const AttackGeometry& g,
                                       std::optional<int> world = std::nullopt);

struct HaltingAttackOptions {
  Rational sigma;
  Rational lambda;
  Rational delta;
  double sample_constant = 64;
  std::optional<std::size_t> max_loops;  // default ceil(1/(lambda*delta))
};

StrategyPtr pr_halting_attack(const ProtocolSpec& spec, const AttackGeometry& g, const HaltingAttackOptions& options);

struct AgreementAttackOptions {
  Rational sigma;
  Rational alpha = from_ratio(1, 10);
  double sample_constant = 64;
  std::size_t max_samples = 256;  // per index, caps C/alpha * ln(cell_count/alpha)
  Seed seed = 0;                  // drives the pre-interaction estimate
  std::optional<int> force_world;
  std::optional<PartySet> force_abort_set;
  std::optional<std::pair<bool, bool>> force_faces;  // whether each half sees the aborting face
  std::optional<std::pair<PartySet, PartySet>> force_split;
};

struct AgreementPlan {
  int world = 1;
  std::vector<double> scores;  // indexed by world, entry 0 unused
  std::size_t samples = 0;
};

AgreementPlan estimate_agreement_plan(const ProtocolSpec& spec, const AttackGeometry& g,
                                      const AgreementAttackOptions& options);

StrategyPtr pr_agreement_attack(const ProtocolSpec& spec, const AttackGeometry& g,
                                const AgreementAttackOptions& options);

std::size_t estimation_samples(double constant, std::size_t cell_count, double lambda);
std::size_t halting_loop_bound(const Rational& lambda, const Rational& delta);

// Setup strings and coins of every party through `round`, read off round-1
// frames and the round's coins.  Needs a public-randomness protocol, a
// rushing view and at least one corrupted party.
struct PublicState {
  SetupBundle setup;
  std::vector<std::vector<Coin>> coins;  // [round - 1][party]
};
PublicState recover_public_state(const AdversaryView& view, int through_round);

}  // namespace lcba
