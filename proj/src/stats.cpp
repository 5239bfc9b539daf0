#include "lcba/stats.hpp"

#include "lcba/engine.hpp"
#include "lcba/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace lcba {

double hoeffding_radius(std::size_t trials, double confidence) {
  if (trials == 0) return 1;
  if (!(confidence > 0 && confidence < 1)) throw ConfigError("confidence must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(trials)));
}

Estimate make_estimate(std::uint64_t hits, std::size_t trials, double confidence) {
  Estimate e;
  e.trials = trials;
  e.confidence = confidence;
  e.point = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0;
  e.ci_radius = hoeffding_radius(trials, confidence);
  return e;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LCBA_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

TraceOutcome classify(const ExecutionTrace& trace) {
  TraceOutcome o;
  PartySet honest = trace.honest();
  std::optional<Bit> seen;
  o.halted = true;
  bool same_input = !honest.empty();
  for (PartyId p : honest) {
    if (trace.inputs[p] != trace.inputs[honest.front()]) same_input = false;
    const Output& out = trace.outputs[p];
    if (!out) {
      o.halted = false;
      continue;
    }
    if (seen && *seen != *out) o.disagreement = true;
    seen = out;
  }
  if (same_input) {
    const Bit b = trace.inputs[honest.front()];
    for (PartyId p : honest) {
      if (trace.outputs[p] && *trace.outputs[p] != b) o.validity_violation = true;
    }
  }
  return o;
}

BaMeasurement measure(const ProtocolSpec& spec, const InputVector& inputs, const AdversaryStrategy& adversary,
                      std::size_t trials, Seed seed, const MeasureOptions& options) {
  if (trials == 0) throw ConfigError("trials must be at least 1");
  struct Tally {
    std::uint64_t dis = 0, val = 0, halt = 0;
  };
  const unsigned workers = std::max(1u, options.workers);
  std::vector<Tally> tallies(workers);
  parallel_chunks(trials, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t i = begin; i < end; ++i) {
      ExecutionTrace tr = run(spec, inputs, adversary, derive_seed(seed, Purpose::trial, i));
      TraceOutcome o = classify(tr);
      tallies[w].dis += o.disagreement;
      tallies[w].val += o.validity_violation;
      tallies[w].halt += o.halted;
    }
  });
  Tally total;
  for (const auto& t : tallies) {
    total.dis += t.dis;
    total.val += t.val;
    total.halt += t.halt;
  }
  BaMeasurement m;
  m.trials = trials;
  m.agreement_violation = make_estimate(total.dis, trials, options.confidence);
  m.validity_violation = make_estimate(total.val, trials, options.confidence);
  m.halting_by_q = make_estimate(total.halt, trials, options.confidence);
  return m;
}

FirstRoundBound first_round_bound(std::size_t n, std::size_t t, const Rational& alpha, const Rational& beta,
                                  bool public_randomness) {
  if (4 * t < n) throw OutOfScope("first-round bound needs t >= n/4");
  FirstRoundBound b;
  b.err = public_randomness ? Rational(0) : pow2(static_cast<long long>(t) - static_cast<long long>(n));
  b.third_branch = 3 * t >= n;
  b.value = b.third_branch ? 5 * alpha + 2 * beta + b.err : Rational(1, 2) + 5 * alpha + beta + b.err;
  return b;
}

SecondRoundBound second_round_bound_with_width(long long width, const Rational& alpha, const Rational& beta) {
  if (width < 1) throw ConfigError("width must be positive");
  SecondRoundBound b;
  b.width = width;
  const Rational width_sq = Rational(width) * width;
  b.value = 1 + 2 * alpha + beta / width_sq - 1 / (2 * width_sq);
  b.vacuous = b.value >= 1;
  return b;
}

SecondRoundBound second_round_bound_arbitrary(std::size_t n, std::size_t t, const Rational& alpha,
                                              const Rational& beta) {
  if (4 * t <= n) throw OutOfScope("second-round bound needs t > n/4");
  const Rational rn = static_cast<long long>(n);
  const long long pivot_count = ceil_ll(rn / 4);
  const long long slack = floor_ll(Rational(static_cast<long long>(t)) - rn / 4);
  if (slack < 1) throw OutOfScope("floor(t - n/4) = 0: the bound's width is undefined");
  const long long width = ceil_ll(Rational(static_cast<long long>(n) - pivot_count, slack)) + 1;
  return second_round_bound_with_width(width, alpha, beta);
}

PrBound second_round_bound_pr(const Rational& eps_t, const Rational& eps_gamma) {
  if (eps_t <= 0 || eps_gamma <= 0) throw ConfigError("eps_t and eps_gamma must be positive");
  PrBound b;
  b.beta_threshold = eps_gamma * eps_gamma / 200;
  b.gamma_third = eps_gamma;
  b.gamma_quarter = Rational(1, 2) + eps_gamma;
  b.lambda = eps_gamma / 10;
  b.sigma = eps_t / 4;
  b.third_vacuous = b.gamma_third >= 1;
  b.quarter_vacuous = b.gamma_quarter >= 1;
  return b;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied:
      return "satisfied";
    case Verdict::violated:
      return "violated";
    default:
      return "inconclusive";
  }
}

namespace {

Rational as_rational(double x) {
  // Measured frequencies are hits/trials; 1e-12 resolution keeps them exact enough.
  return Rational(static_cast<long long>(std::llround(x * 1e12)), 1000000000000LL);
}

}  // namespace

AuditReport audit(const ProtocolSpec& spec, Stage stage, const AttackGeometry& g, std::size_t trials, Seed seed,
                  const AuditOptions& options) {
  if (g.stage != stage) throw ConfigError("geometry was built for a different stage");
  if (g.n != spec->n()) throw ConfigError("geometry n differs from the protocol");
  AuditReport rep;
  rep.stage = stage;
  rep.protocol = spec->name();
  rep.n = g.n;
  rep.t = g.t;
  rep.trials = trials;
  MeasureOptions mo{options.confidence, options.workers};
  std::uint64_t index = 0;
  auto add = [&](const std::string& label, const InputVector& v, const AdversaryStrategy& adv) {
    SuiteRow row{label, adv.name(), v, measure(spec, v, adv, trials, derive_seed(seed, Purpose::trial, ++index), mo)};
    rep.rows.push_back(std::move(row));
  };

  NoAdversary none;
  std::set<std::string> seen;
  for (const InputVector& v : {g.v0, g.v1, g.v_mixed, InputVector::constant(g.n, 0), InputVector::constant(g.n, 1)}) {
    if (seen.insert(v.str()).second) add("honest " + v.str(), v, none);
  }
  for (int b = 0; b < 2; ++b) {
    const InputVector& v = b ? g.v1 : g.v0;
    PartySet dissent;
    for (PartyId i = 0; i < g.n; ++i) {
      if (v[i] != b) dissent.push_back(i);
    }
    if (dissent.empty() || dissent.size() > g.t) continue;
    HonestCorruption probe(dissent, g.t);
    add("validity-probe " + v.str(), v, probe);
  }

  for (const auto& [base, target] : attack_pairs(g)) {
    AttackGeometry gg = retarget(g, base, target);
    const std::string tag = base.str() + "->" + target.str();
    if (stage == Stage::first_round) {
      add("attack " + tag, base, *first_round_attack(spec, gg, false));
      if (spec->public_randomness()) add("attack " + tag, base, *first_round_attack(spec, gg, true));
    } else if (stage == Stage::second_round_arbitrary) {
      add("attack " + tag, base, *second_round_static_attack(spec, gg));
      add("attack " + tag, base, *pivot_variant(spec, gg, std::nullopt));
    } else {
      PrBound pb = second_round_bound_pr(g.eps_t, options.eps_gamma);
      HaltingAttackOptions ho{g.sigma, pb.lambda, options.delta, 64, options.halting_loop_cap};
      add("attack " + tag, base, *pr_halting_attack(spec, gg, ho));
      AgreementAttackOptions ao = options.agreement;
      ao.sigma = g.sigma;
      ao.seed = derive_seed(seed, Purpose::builder, index);
      if (gg.cell_count >= 2) {
        add("attack " + tag, base, *pr_agreement_attack(spec, gg, ao));
      } else {
        rep.notes.push_back("agreement attack skipped for " + tag + ": fewer than two cells");
      }
    }
  }

  double r_gamma = 0, r_alpha = 0, r_beta = 0;
  rep.gamma_hat = 2;
  rep.alpha_hat = -1;
  rep.beta_hat = -1;
  for (const auto& row : rep.rows) {
    if (row.m.halting_by_q.point < rep.gamma_hat) {
      rep.gamma_hat = row.m.halting_by_q.point;
      r_gamma = row.m.halting_by_q.ci_radius;
    }
    if (row.m.agreement_violation.point > rep.alpha_hat) {
      rep.alpha_hat = row.m.agreement_violation.point;
      r_alpha = row.m.agreement_violation.ci_radius;
    }
    if (row.m.validity_violation.point > rep.beta_hat) {
      rep.beta_hat = row.m.validity_violation.point;
      r_beta = row.m.validity_violation.ci_radius;
    }
  }
  const Rational a = as_rational(rep.alpha_hat);
  const Rational b = as_rational(rep.beta_hat);
  const Rational gam = as_rational(rep.gamma_hat);

  bool premises = true;
  if (stage == Stage::first_round) {
    FirstRoundBound fb = first_round_bound(g.n, g.t, a, b, spec->public_randomness());
    rep.bound = fb.value;
    rep.slack = r_gamma + 5 * r_alpha + (fb.third_branch ? 2 : 1) * r_beta;
  } else if (stage == Stage::second_round_arbitrary) {
    const long long width = g.audit_width();
    if (!g.width) rep.notes.push_back("width taken as cell_count+1 = " + std::to_string(width));
    SecondRoundBound sb = second_round_bound_with_width(width, a, b);
    rep.bound = sb.value;
    rep.slack = r_gamma + 2 * r_alpha + r_beta / static_cast<double>(width * width);
    if (sb.vacuous) rep.notes.push_back("bound is vacuous (>= 1)");
  } else {
    PrBound pb = second_round_bound_pr(g.eps_t, options.eps_gamma);
    rep.bound = g.regime == Regime::third ? pb.gamma_third : pb.gamma_quarter;
    rep.slack = r_gamma;
    if (b > pb.beta_threshold || a > pb.beta_threshold) {
      premises = false;
      rep.notes.push_back("measured alpha/beta exceed eps_gamma^2/200 = " + to_exact_text(pb.beta_threshold) +
                          ": the bound's premises are not met");
    }
  }
  rep.notes.push_back("alpha_hat and beta_hat lower-bound the true alpha and beta: only the suite's adversaries are tried");
  if (gam <= rep.bound || to_double(gam - rep.bound) <= rep.slack) {
    rep.verdict = Verdict::satisfied;
  } else {
    rep.verdict = premises ? Verdict::violated : Verdict::inconclusive;
  }
  return rep;
}

std::string csv_header() { return "stage,protocol,n,t,trials,gamma_hat,alpha_hat,beta_hat,bound,slack,verdict"; }

std::string csv_row(const AuditReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%s", to_string(r.stage).c_str(),
                r.protocol.c_str(), r.n, r.t, r.trials, r.gamma_hat, r.alpha_hat, r.beta_hat, to_double(r.bound),
                r.slack, to_string(r.verdict).c_str());
  return buf;
}

}  // namespace lcba
