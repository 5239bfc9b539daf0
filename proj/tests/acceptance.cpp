// One PASS/FAIL line per acceptance criterion.  argv[1] is the CLI binary,
// used by the determinism check.
#include "lcba/adversary.hpp"
#include "lcba/attacks.hpp"
#include "lcba/conjecture.hpp"
#include "lcba/engine.hpp"
#include "lcba/parallel.hpp"
#include "lcba/protocols.hpp"
#include "lcba/stats.hpp"
#include "lcba/trace.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace lcba;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

unsigned workers() { return resolve_workers(0); }

void honest_soundness() {
  struct Case {
    const char* name;
    std::size_t n, t;
  };
  const Case cases[] = {{"one-round-majority", 29, 0}, {"two-round-coin-majority", 29, 9}, {"micali-lite", 29, 9},
                        {"beacon", 29, 7}};
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    ProtocolSpec spec = catalog_entry(c.name).build({c.n, c.t, 10, std::nullopt});
    const auto start = Clock::now();
    double worst = 0;
    for (Bit b : {Bit{0}, Bit{1}}) {
      NoAdversary none;
      BaMeasurement m = measure(spec, InputVector::constant(c.n, b), none, 10000, 100 + b, {0.99, workers()});
      worst = std::max({worst, m.agreement_violation.point, m.validity_violation.point});
    }
    const double secs = seconds_since(start);
    pass &= worst == 0 && secs < 60;
    detail += std::string(c.name) + " violations=" + fmt(worst) + " " + fmt(secs, 1) + "s; ";
  }
  report(1, pass, detail);
}

void coin_halting() {
  ProtocolSpec spec = two_round_coin_majority(9, 2);
  NoAdversary none;
  BaMeasurement m = measure(spec, InputVector::parse("000100000"), none, 10000, 2, {0.99, workers()});
  const double h = m.halting_by_q.point;
  report(2, h >= 0.48 && h <= 0.52, "halting by round 2 = " + fmt(h) + " (window [0.48, 0.52])");
}

void first_round_potency() {
  ProtocolSpec spec = one_round_majority(9);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::first_round);
  BaMeasurement m = measure(spec, g.v0, *first_round_attack(spec, g, false), 1000, 3, {0.99, workers()});
  AuditOptions opt;
  opt.workers = workers();
  AuditReport a = audit(spec, Stage::first_round, g, 1000, 3, opt);
  const double oracle = 1 - std::pow(2.0, -5);
  report(3, m.agreement_violation.point >= 0.95 && a.verdict == Verdict::satisfied,
         "disagreement = " + fmt(m.agreement_violation.point) + " (oracle " + fmt(oracle) + "), audit " +
             to_string(a.verdict) + ": gamma_hat " + fmt(a.gamma_hat) + " <= " + fmt(to_double(a.bound)) +
             " + " + fmt(a.slack));
}

void second_round_audit() {
  ProtocolSpec spec = two_round_coin_majority(9, 3);
  AttackGeometry g = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  const auto start = Clock::now();
  AuditOptions opt;
  opt.workers = workers();
  AuditReport a = audit(spec, Stage::second_round_arbitrary, g, 10000, 4, opt);
  const double secs = seconds_since(start);
  report(4, a.verdict == Verdict::satisfied && secs < 300,
         "verdict " + to_string(a.verdict) + ": gamma_hat " + fmt(a.gamma_hat) + " <= " + fmt(to_double(a.bound)) +
             " + " + fmt(a.slack) + " (width = " + std::to_string(g.audit_width()) + "), " + fmt(secs, 1) + "s");
}

void pr_halting_effect() {
  ProtocolSpec spec = catalog_entry("micali-lite").build({60, 16, 10, 2});
  AttackGeometry g = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
  const Rational eps_gamma = from_ratio(1, 10);
  PrBound pb = second_round_bound_pr(g.eps_t, eps_gamma);
  HaltingAttackOptions ho{g.sigma, pb.lambda, from_ratio(1, 20), 64, 16};
  const auto start = Clock::now();
  BaMeasurement m = measure(spec, g.base, *pr_halting_attack(spec, g, ho), 10000, 5, {0.99, workers()});
  const double limit = to_double(pb.gamma_quarter);
  report(5, m.halting_by_q.point <= limit,
         "two-round halting under attack = " + fmt(m.halting_by_q.point) + " <= " + fmt(limit, 2) + ", " +
             fmt(seconds_since(start), 1) + "s");
}

void leader_statistics() {
  const std::size_t n = 30, t = 9;
  const int phase_limit = 10;
  ProtocolSpec spec = micali_lite(n, t, phase_limit);
  PartySet corrupted = range_set(0, t);
  HonestCorruption adv(corrupted, t);
  InputVector v = InputVector::parse("010101010101010101010101010101");
  std::size_t phases = 0, bad = 0;
  for (Seed s = 0; phases < 10000; ++s) {
    ExecutionTrace tr = run(spec, v, adv, s);
    for (int r = 1; r <= tr.q && phases < 10000; ++r) {
      if (!micali_is_coin_round(r)) continue;
      ++phases;
      bad += contains(corrupted, micali_leader(tr.coins, r));
    }
  }
  const double freq = static_cast<double>(bad) / static_cast<double>(phases);
  report(6, std::abs(freq - 0.3) <= 0.03,
         "corrupted-leader frequency = " + fmt(freq) + " over " + std::to_string(phases) + " phases (target 0.3)");
}

void conjecture_equivalence() {
  const Rational lambda(1, 10), delta(1, 20);
  std::size_t covered = 0, runs = 0;
  double slowest = 0;
  for (const SetFamilyPair& pair : {prefix_sets(10, 2), ball_sets(10, 2)}) {
    for (Rational sigma : {Rational(1, 10), Rational(1, 5), Rational(3, 10)}) {
      const auto start = Clock::now();
      ConjectureOptions ex;
      ex.workers = workers();
      ConjectureVerdict exact = evaluate_conjecture(pair, sigma, lambda, delta, ex);
      slowest = std::max(slowest, seconds_since(start));
      const double target = to_double(*exact.conclusion_exact);
      for (int rep = 0; rep < 100; ++rep) {
        ConjectureOptions mc;
        mc.mode = EvalMode::monte_carlo;
        mc.trials = 10000;
        mc.seed = derive_seed(77, Purpose::trial, static_cast<std::uint64_t>(rep));
        mc.workers = workers();
        covered += conclusion_probability(pair, sigma, mc).covers(target);
        ++runs;
      }
    }
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(runs);
  report(7, rate >= 0.99 && slowest < 120,
         "coverage " + std::to_string(covered) + "/" + std::to_string(runs) + ", slowest exhaustive run " +
             fmt(slowest, 2) + "s");
}

struct AttackCase {
  std::string label;
  ProtocolSpec spec;
  AttackGeometry g;
  StrategyPtr adv;
};

std::vector<AttackCase> attack_cases() {
  std::vector<AttackCase> out;
  ProtocolSpec orm = one_round_majority(9);
  AttackGeometry fr = attack_geometry(9, 3, Regime::third, Stage::first_round);
  out.push_back({"first-round/one-round-majority", orm, fr, first_round_attack(orm, fr, false)});
  ProtocolSpec coin = two_round_coin_majority(9, 3);
  out.push_back({"first-round-rushing/two-round-coin-majority", coin, fr, first_round_attack(coin, fr, true)});
  AttackGeometry arb = attack_geometry(9, 3, Regime::third, Stage::second_round_arbitrary);
  out.push_back({"second-round-static/two-round-coin-majority", coin, arb, second_round_static_attack(coin, arb)});
  out.push_back({"pivot/two-round-coin-majority", coin, arb, pivot_variant(coin, arb, std::nullopt)});
  ProtocolSpec micali = catalog_entry("micali-lite").build({60, 16, 10, 2});
  AttackGeometry pr = attack_geometry(60, 16, Regime::quarter, Stage::second_round_pr);
  PrBound pb = second_round_bound_pr(pr.eps_t, from_ratio(1, 10));
  out.push_back({"pr-halting/micali-lite", micali, pr,
                 pr_halting_attack(micali, pr, {pr.sigma, pb.lambda, from_ratio(1, 20), 64, 16})});
  AgreementAttackOptions ao;
  ao.sigma = pr.sigma;
  ao.seed = 11;
  out.push_back({"pr-agreement/micali-lite", micali, pr, pr_agreement_attack(micali, pr, ao)});
  return out;
}

void validator_checks() {
  std::vector<AttackCase> cases = attack_cases();
  bool complete = true;
  std::string detail;
  std::vector<ExecutionTrace> sampled;
  std::vector<std::size_t> sampled_case;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const AttackCase& ac = cases[c];
    const std::size_t seeds = 1000;
    std::vector<char> ok(seeds, 0);
    parallel_chunks(seeds, workers(), [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t s = begin; s < end; ++s) {
        ExecutionTrace tr = run(ac.spec, ac.g.base, *ac.adv, s);
        ok[s] = validate_locally_consistent(tr, *ac.spec, *ac.adv).ok;
      }
    });
    std::size_t good = 0;
    for (char x : ok) good += x;
    complete &= good == seeds;
    if (good != seeds) detail += ac.label + " " + std::to_string(good) + "/1000; ";
    // 100 traces in all, spread over the attacks.
    const std::size_t take = c < 4 ? 17 : 16;
    for (std::size_t s = 0; s < take; ++s) {
      sampled.push_back(run(ac.spec, ac.g.base, *ac.adv, 5000 + s));
      sampled_case.push_back(c);
    }
  }
  // Every byte of one corrupted payload per sampled trace, flipped by XOR 0x80.
  std::size_t mutations = 0, flagged = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const ExecutionTrace& tr = sampled[i];
    const AttackCase& ac = cases[sampled_case[i]];
    std::vector<std::pair<int, std::size_t>> slots;
    for (int r = 1; r <= tr.rounds_run(); ++r) {
      for (std::size_t m = 0; m < tr.mailboxes[r - 1].size(); ++m) {
        const Message& msg = tr.mailboxes[r - 1][m];
        if (!msg.is_abort && !msg.payload.empty() && tr.corruption_log[msg.from] <= r) slots.emplace_back(r, m);
      }
    }
    if (slots.empty()) continue;
    const auto [r, m] = slots[prf(9, Purpose::sampling, i) % slots.size()];
    const std::size_t len = tr.mailboxes[r - 1][m].payload.size();
    std::vector<char> hit(len, 0);
    parallel_chunks(len, workers(), [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t byte = begin; byte < end; ++byte) {
        ExecutionTrace bad = tr;
        bad.mailboxes[r - 1][m].payload[byte] ^= static_cast<char>(0x80);
        hit[byte] = !validate_locally_consistent(bad, *ac.spec, *ac.adv).ok;
      }
    });
    for (char x : hit) flagged += x;
    mutations += len;
  }
  const bool sound = mutations > 0 && flagged == mutations;
  report(8, complete && sound,
         std::to_string(cases.size()) + " attacks x 1000 seeds " + (complete ? "all ok" : "FAILED: " + detail) +
             "; " + std::to_string(flagged) + "/" + std::to_string(mutations) + " mutations flagged over " +
             std::to_string(sampled.size()) + " traces");
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  pclose(pipe);
  return out;
}

void determinism(const std::string& cli) {
  if (cli.empty()) {
    report(9, false, "no CLI path given");
    return;
  }
  const std::string cmd = cli +
                          " audit --stage second-round-arbitrary --protocol two-round-coin-majority --n 9 --t 3"
                          " --trials 2000 --seed 9 --no-timestamp 2>/dev/null";
  const std::string a = capture(cmd), b = capture(cmd);
  const bool pass = !a.empty() && a == b && a.find("verdict") != std::string::npos;
  report(9, pass, "two audit runs, " + std::to_string(a.size()) + " bytes each, " + (a == b ? "identical" : "differ"));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const auto start = Clock::now();
  honest_soundness();
  coin_halting();
  first_round_potency();
  second_round_audit();
  pr_halting_effect();
  leader_statistics();
  conjecture_equivalence();
  validator_checks();
  determinism(cli);
  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << " in "
            << fmt(seconds_since(start), 1) << "s" << std::endl;
  return failures == 0 ? 0 : 1;
}
