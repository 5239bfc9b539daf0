#pragma once

#include "lcba/attacks.hpp"
#include "lcba/estimate.hpp"
#include "lcba/rational.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lcba {

// Entries are symbols 0..alphabet-1, or kBottom for a masked entry.
inline constexpr int kBottom = -1;
using MaskedVector = std::vector<int>;

MaskedVector mask(const MaskedVector& x, const PartySet& where);
std::string format_masked(const MaskedVector& x);

using Membership = std::function<bool(const MaskedVector&)>;

struct SetFamilyPair {
  enum class Representation { explicit_sets, predicate };
  std::string name;
  std::size_t n = 0;
  int alphabet = 2;
  Representation representation = Representation::predicate;
  Membership member[2];

  bool contains(int b, const MaskedVector& x) const { return member[b](x); }
};

// A_b: the first length entries all equal b.
SetFamilyPair prefix_sets(std::size_t n, std::size_t length, int alphabet = 2);

enum class BallMetric {
  bottom_counts,   // a masked entry is a mismatch
  bottom_ignored,  // a masked entry matches either center
};
// A_b: at most `radius` entries mismatch the all-b vector.
SetFamilyPair ball_sets(std::size_t n, std::size_t radius, int alphabet = 2,
                        BallMetric metric = BallMetric::bottom_counts);
SetFamilyPair explicit_sets(std::size_t n, int alphabet, std::set<MaskedVector> a0, std::set<MaskedVector> a1,
                            std::string name = "explicit");

// Sets over round-2 coin tapes: the given world of the pivot family with the masked
// parties aborting, and every party outside pivots, that world's cell and the mask
// outputs b by round 2.  A fully masked tape belongs to neither set.
SetFamilyPair protocol_induced_sets(const ProtocolSpec& spec, const AttackGeometry& g, const SetupBundle& setup,
                                    int world);

enum class EvalMode { exhaustive, monte_carlo };
std::string to_string(EvalMode m);
EvalMode parse_eval_mode(const std::string& text);

struct ConjectureOptions {
  EvalMode mode = EvalMode::exhaustive;
  std::size_t trials = 100000;        // conclusion samples in Monte-Carlo mode
  std::size_t outer_samples = 400;    // abort sets drawn for the hypothesis
  std::size_t inner_samples = 400;    // tapes per abort set
  double confidence = kDefaultConfidence;
  Seed seed = 1;
  unsigned workers = 1;
};

struct ConjectureVerdict {
  EvalMode mode = EvalMode::exhaustive;
  bool hypothesis_ok[2] = {false, false};
  double hypothesis_level[2] = {0, 0};  // share of abort sets where the inner probability reaches lambda
  std::optional<Rational> hypothesis_exact[2];
  Estimate conclusion;
  std::optional<Rational> conclusion_exact;

  bool hypothesis() const { return hypothesis_ok[0] && hypothesis_ok[1]; }
};

// Exhaustive mode is limited to n * log2(alphabet + 1) <= 24.
bool exhaustive_feasible(std::size_t n, int alphabet);

ConjectureVerdict evaluate_conjecture(const SetFamilyPair& pair, const Rational& sigma, const Rational& lambda,
                                      const Rational& delta, const ConjectureOptions& options);
ConjectureVerdict hypothesis_holds(const SetFamilyPair& pair, const Rational& sigma, const Rational& lambda,
                                   const Rational& delta, const ConjectureOptions& options);
Estimate conclusion_probability(const SetFamilyPair& pair, const Rational& sigma, const ConjectureOptions& options);

struct Counterexample {
  std::string family;
  Rational sigma;
  Rational lambda;
  double conclusion = 0;
  std::optional<Rational> conclusion_exact;
};

// Reports every (family, sigma, lambda) whose hypothesis holds for each delta
// in the grid while the conclusion stays below each of them.
std::vector<Counterexample> search_counterexamples(const std::vector<SetFamilyPair>& families,
                                                   const std::vector<Rational>& sigmas,
                                                   const std::vector<Rational>& lambdas,
                                                   const std::vector<Rational>& deltas,
                                                   const ConjectureOptions& options);

std::string to_json(const ConjectureVerdict& v, const SetFamilyPair& pair, const Rational& sigma,
                    const Rational& lambda, const Rational& delta);

}  // namespace lcba
