#pragma once

#include "lcba/adversary.hpp"
#include "lcba/attacks.hpp"
#include "lcba/estimate.hpp"
#include "lcba/protocol.hpp"
#include "lcba/rational.hpp"
#include "lcba/trace.hpp"

#include <string>
#include <vector>

namespace lcba {

struct BaMeasurement {
  Estimate agreement_violation;
  Estimate validity_violation;
  Estimate halting_by_q;
  std::size_t trials = 0;
};

struct MeasureOptions {
  double confidence = kDefaultConfidence;
  unsigned workers = 1;
};

// Per-trace outcome flags, over the parties never corrupted.
struct TraceOutcome {
  bool disagreement = false;  // two different outputs
  bool validity_violation = false;  // honest inputs all b, some output differs from b
  bool halted = false;  // every honest party output by q
};
TraceOutcome classify(const ExecutionTrace& trace);

// Trial i runs on seed derive_seed(seed, trial, i).
BaMeasurement measure(const ProtocolSpec& spec, const InputVector& inputs, const AdversaryStrategy& adversary,
                      std::size_t trials, Seed seed, const MeasureOptions& options = {});

struct FirstRoundBound {
  Rational value;
  Rational err;
  bool third_branch = true;
};
// 5a + 2b + err when 3t >= n, else 1/2 + 5a + b + err; err = 2^(t-n), or 0
// with public randomness.
FirstRoundBound first_round_bound(std::size_t n, std::size_t t, const Rational& alpha, const Rational& beta,
                                  bool public_randomness);

struct SecondRoundBound {
  long long width = 0;
  Rational value;
  bool vacuous = false;  // value >= 1
};
// width = ceil((n - ceil(n/4)) / floor(t - n/4)) + 1; value 1 + 2a + b/width^2 - 1/(2 width^2).
SecondRoundBound second_round_bound_arbitrary(std::size_t n, std::size_t t, const Rational& alpha,
                                              const Rational& beta);
SecondRoundBound second_round_bound_with_width(long long width, const Rational& alpha, const Rational& beta);

struct PrBound {
  Rational beta_threshold;  // eps_gamma^2 / 200
  Rational gamma_third;     // eps_gamma
  Rational gamma_quarter;   // 1/2 + eps_gamma
  Rational lambda;          // eps_gamma / 10
  Rational sigma;           // eps_t / 4
  bool third_vacuous = false;
  bool quarter_vacuous = false;
};
PrBound second_round_bound_pr(const Rational& eps_t, const Rational& eps_gamma);

enum class Verdict { satisfied, violated, inconclusive };
std::string to_string(Verdict v);

struct SuiteRow {
  std::string label;
  std::string adversary;
  InputVector inputs;
  BaMeasurement m;
};

struct AuditOptions {
  double confidence = kDefaultConfidence;
  unsigned workers = 1;
  Rational eps_gamma = from_ratio(1, 10);
  Rational delta = from_ratio(1, 20);
  std::optional<std::size_t> halting_loop_cap = 16;
  AgreementAttackOptions agreement;  // sigma is filled from the geometry
};

struct AuditReport {
  Stage stage = Stage::first_round;
  std::string protocol;
  std::size_t n = 0;
  std::size_t t = 0;
  std::size_t trials = 0;
  double gamma_hat = 1;
  double alpha_hat = 0;
  double beta_hat = 0;
  Rational bound;
  double slack = 0;
  Verdict verdict = Verdict::satisfied;
  std::vector<SuiteRow> rows;
  std::vector<std::string> notes;
};

// The suite: honest baselines, validity probes that corrupt the dissenters of
// v0 and v1, and the stage's attacks on every (base, target) pair.
AuditReport audit(const ProtocolSpec& spec, Stage stage, const AttackGeometry& g, std::size_t trials, Seed seed,
                  const AuditOptions& options = {});

std::string csv_header();
std::string csv_row(const AuditReport& r);

}  // namespace lcba
