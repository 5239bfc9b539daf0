// Command-line front end.  Exit codes: 0 ok, 1 validation failure,
// 2 configuration error, 3 audit verdict "violated".
#include "lcba/attacks.hpp"
#include "lcba/config.hpp"
#include "lcba/conjecture.hpp"
#include "lcba/engine.hpp"
#include "lcba/parallel.hpp"
#include "lcba/protocols.hpp"
#include "lcba/stats.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

using namespace lcba;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitViolated = 3;

std::string flag_for(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

struct Invocation {
  CLI::App* app = nullptr;
  std::vector<std::string> keys;
  std::map<std::string, std::string> raw;
  std::string config_path;
  bool no_timestamp = false;
};

Invocation& subcommand(CLI::App& root, std::vector<std::unique_ptr<Invocation>>& all, const std::string& name,
                       const std::string& help, std::vector<std::string> keys) {
  auto inv = std::make_unique<Invocation>();
  inv->app = root.add_subcommand(name, help);
  inv->keys = std::move(keys);
  inv->app->add_option("--config", inv->config_path, "flat key = value file; flags override it");
  for (const auto& key : inv->keys) inv->app->add_option(flag_for(key), inv->raw[key]);
  all.push_back(std::move(inv));
  return *all.back();
}

ExperimentConfig resolve(const Invocation& inv) {
  ExperimentConfig c = inv.config_path.empty() ? ExperimentConfig{} : load_config(inv.config_path);
  for (const auto& key : inv.keys) {
    if (inv.app->count(flag_for(key)) > 0) {
      try {
        set_config_value(c, key, inv.raw.at(key));
      } catch (const ConfigError& e) {
        throw ConfigError(flag_for(key) + ": " + e.what());
      }
    }
  }
  validate_config(c);
  return c;
}

template <class T>
T need(const std::optional<T>& x, const char* key) {
  if (!x) throw ConfigError(std::string("missing required field '") + key + "'");
  return *x;
}

ProtocolSpec build_spec(const ExperimentConfig& c) {
  ProtocolParams p;
  p.n = static_cast<std::size_t>(need(c.n, "n"));
  p.t = static_cast<std::size_t>(c.t.value_or(0));
  if (c.phase_limit) p.phase_limit = static_cast<int>(*c.phase_limit);
  if (c.q) p.q = static_cast<int>(*c.q);
  return catalog_entry(need(c.protocol, "protocol")).build(p);
}

Regime regime_of(const ExperimentConfig& c) {
  if (c.regime) return parse_regime(*c.regime);
  return 3 * need(c.t, "t") >= need(c.n, "n") ? Regime::third : Regime::quarter;
}

unsigned workers_of(const ExperimentConfig& c) {
  return resolve_workers(c.workers ? static_cast<unsigned>(*c.workers) : 0);
}

double confidence_of(const ExperimentConfig& c) {
  return c.confidence ? to_double(*c.confidence) : kDefaultConfidence;
}

class Sink {
 public:
  explicit Sink(const std::optional<std::string>& path) {
    if (path) {
      file_.open(*path);
      if (!file_) throw ConfigError(*path + ": cannot open for writing");
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string timestamp_line() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string measurement_header() {
  return "protocol,n,t,inputs,adversary,trials,agreement_violation,validity_violation,halting_by_q,ci_radius";
}

std::string measurement_row(const Protocol& spec, std::size_t t, const InputVector& v, const std::string& adversary,
                            const BaMeasurement& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%s,%s,%zu,%.6f,%.6f,%.6f,%.6f", spec.name().c_str(), spec.n(), t,
                v.str().c_str(), adversary.c_str(), m.trials, m.agreement_violation.point,
                m.validity_violation.point, m.halting_by_q.point, m.halting_by_q.ci_radius);
  return buf;
}

struct BuiltAttack {
  AttackGeometry g;
  StrategyPtr strategy;
};

BuiltAttack build_attack(const ProtocolSpec& spec, const ExperimentConfig& c) {
  const std::string name = need(c.attack, "attack");
  const std::size_t n = spec->n();
  const std::size_t t = static_cast<std::size_t>(need(c.t, "t"));
  const Regime regime = regime_of(c);
  auto geometry = [&](Stage s) { return attack_geometry(n, t, regime, s, c.eps_t); };
  if (name == "first-round" || name == "first-round-rushing") {
    AttackGeometry g = geometry(Stage::first_round);
    return {g, first_round_attack(spec, g, name == "first-round-rushing")};
  }
  if (name == "second-round-static" || name == "pivot") {
    AttackGeometry g = geometry(Stage::second_round_arbitrary);
    return {g, name == "pivot" ? pivot_variant(spec, g, std::nullopt) : second_round_static_attack(spec, g)};
  }
  if (name == "pr-halting" || name == "pr-agreement") {
    AttackGeometry g = geometry(Stage::second_round_pr);
    const Rational eps_gamma = c.eps_gamma.value_or(from_ratio(1, 10));
    const Rational sigma = c.sigma.value_or(g.sigma);
    if (name == "pr-halting") {
      PrBound pb = second_round_bound_pr(g.eps_t, eps_gamma);
      HaltingAttackOptions ho{sigma, c.lambda.value_or(pb.lambda), c.delta.value_or(from_ratio(1, 20)), 64, 16};
      return {g, pr_halting_attack(spec, g, ho)};
    }
    AgreementAttackOptions ao;
    ao.sigma = sigma;
    ao.seed = derive_seed(c.seed.value_or(1), Purpose::builder, 0);
    return {g, pr_agreement_attack(spec, g, ao)};
  }
  throw ConfigError("unknown attack '" + name +
                    "' (expected first-round, first-round-rushing, second-round-static, pivot, pr-halting or "
                    "pr-agreement)");
}

int cmd_list(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  Sink sink(c.out);
  auto& os = sink.out();
  os << "name,parameters,q,alpha,beta,gamma,note\n";
  for (const auto& e : protocol_catalog()) {
    os << e.name << ",\"" << e.parameters << "\"," << e.claimed.q << ',' << e.claimed.alpha << ','
       << e.claimed.beta << ',' << e.claimed.gamma << ",\"" << e.note << "\"\n";
  }
  return 0;
}

int cmd_simulate(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  ProtocolSpec spec = build_spec(c);
  InputVector v = c.inputs ? InputVector::parse(*c.inputs) : InputVector::constant(spec->n(), 0);
  const std::size_t trials = static_cast<std::size_t>(c.trials.value_or(1));
  const Seed seed = c.seed.value_or(1);
  Sink sink(c.out);
  auto& os = sink.out();
  if (trials == 1) {
    os << trace_to_jsonl(run_honest(spec, v, seed));
    return 0;
  }
  NoAdversary none;
  BaMeasurement m = measure(spec, v, none, trials, seed, {confidence_of(c), workers_of(c)});
  if (!inv.no_timestamp) os << timestamp_line() << '\n';
  os << measurement_header() << '\n' << measurement_row(*spec, c.t.value_or(0), v, "none", m) << '\n';
  return 0;
}

int cmd_attack(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  ProtocolSpec spec = build_spec(c);
  BuiltAttack a = build_attack(spec, c);
  for (const auto& note : a.g.notes) std::cerr << "note: " << note << '\n';
  InputVector v = c.inputs ? InputVector::parse(*c.inputs) : a.g.base;
  const std::size_t trials = static_cast<std::size_t>(c.trials.value_or(1000));
  BaMeasurement m = measure(spec, v, *a.strategy, trials, c.seed.value_or(1), {confidence_of(c), workers_of(c)});
  Sink sink(c.out);
  auto& os = sink.out();
  if (!inv.no_timestamp) os << timestamp_line() << '\n';
  os << measurement_header() << '\n'
     << measurement_row(*spec, a.g.t, v, a.strategy->name(), m) << '\n';
  return 0;
}

int cmd_validate(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  ProtocolSpec spec = build_spec(c);
  BuiltAttack a = build_attack(spec, c);
  InputVector v = c.inputs ? InputVector::parse(*c.inputs) : a.g.base;
  const std::size_t trials = static_cast<std::size_t>(c.trials.value_or(1000));
  const Seed seed = c.seed.value_or(1);
  std::vector<std::optional<ValidationReport>> failures(trials);
  parallel_chunks(trials, workers_of(c), [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      ExecutionTrace tr = run(spec, v, *a.strategy, derive_seed(seed, Purpose::trial, i));
      ValidationReport r = validate_locally_consistent(tr, *spec, *a.strategy);
      if (!r.ok) failures[i] = std::move(r);
    }
  });
  std::size_t bad = 0;
  Sink sink(c.out);
  auto& os = sink.out();
  for (std::size_t i = 0; i < trials; ++i) {
    if (!failures[i]) continue;
    if (bad++ == 0) os << "first failure, trial " << i << ": " << to_json(*failures[i]) << '\n';
  }
  os << a.strategy->name() << ": " << (trials - bad) << "/" << trials << " traces locally consistent\n";
  return bad == 0 ? 0 : 1;
}

int cmd_audit(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  ProtocolSpec spec = build_spec(c);
  const Stage stage = parse_stage(need(c.stage, "stage"));
  const std::size_t t = static_cast<std::size_t>(need(c.t, "t"));
  AttackGeometry g = attack_geometry(spec->n(), t, regime_of(c), stage, c.eps_t);
  AuditOptions opt;
  opt.confidence = confidence_of(c);
  opt.workers = workers_of(c);
  if (c.eps_gamma) opt.eps_gamma = *c.eps_gamma;
  if (c.delta) opt.delta = *c.delta;
  const std::size_t trials = static_cast<std::size_t>(c.trials.value_or(1000));
  AuditReport r = audit(spec, stage, g, trials, c.seed.value_or(1), opt);
  for (const auto& note : g.notes) std::cerr << "note: " << note << '\n';
  for (const auto& note : r.notes) std::cerr << "note: " << note << '\n';
  Sink sink(c.out);
  auto& os = sink.out();
  if (!inv.no_timestamp) os << timestamp_line() << '\n';
  os << csv_header() << '\n' << csv_row(r) << '\n';
  return r.verdict == Verdict::violated ? kExitViolated : 0;
}

int cmd_conjecture(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  const std::size_t n = static_cast<std::size_t>(need(c.n, "n"));
  const std::string family = need(c.family, "family");
  SetFamilyPair pair;
  if (family == "prefix") {
    pair = prefix_sets(n, static_cast<std::size_t>(need(c.k, "k")));
  } else if (family == "ball" || family == "ball-ignore-bottom") {
    pair = ball_sets(n, static_cast<std::size_t>(need(c.radius, "radius")), 2,
                     family == "ball" ? BallMetric::bottom_counts : BallMetric::bottom_ignored);
  } else {
    throw ConfigError("unknown family '" + family + "' (expected prefix, ball or ball-ignore-bottom)");
  }
  const Rational sigma = need(c.sigma, "sigma");
  const Rational lambda = c.lambda.value_or(from_ratio(1, 10));
  const Rational delta = c.delta.value_or(from_ratio(1, 20));
  ConjectureOptions opt;
  if (c.mode) opt.mode = parse_eval_mode(*c.mode);
  if (c.trials) opt.trials = static_cast<std::size_t>(*c.trials);
  opt.confidence = confidence_of(c);
  opt.seed = c.seed.value_or(1);
  opt.workers = workers_of(c);
  ConjectureVerdict v = evaluate_conjecture(pair, sigma, lambda, delta, opt);
  Sink sink(c.out);
  sink.out() << to_json(v, pair, sigma, lambda, delta) << '\n';
  return 0;
}

std::string one_minus(const Rational& x) {
  if (x >= 1) return to_fraction(x);
  return "1 - " + to_fraction(1 - x);
}

int cmd_bounds(const Invocation& inv) {
  ExperimentConfig c = resolve(inv);
  const Stage stage = parse_stage(need(c.stage, "stage"));
  const std::size_t n = static_cast<std::size_t>(need(c.n, "n"));
  const std::size_t t = static_cast<std::size_t>(need(c.t, "t"));
  const Rational a = inv.app->count("--alpha") ? parse_rational(inv.raw.at("alpha")) : Rational(0);
  const Rational b = inv.app->count("--beta") ? parse_rational(inv.raw.at("beta")) : Rational(0);
  Sink sink(c.out);
  auto& os = sink.out();
  if (stage == Stage::first_round) {
    const bool pr = c.protocol && catalog_entry(*c.protocol).build({n, t, 10, std::nullopt})->public_randomness();
    FirstRoundBound fb = first_round_bound(n, t, a, b, pr);
    os << "branch = " << (fb.third_branch ? "3t >= n" : "n/4 <= t < n/3") << '\n'
       << "err = " << to_fraction(fb.err) << '\n'
       << "bound = " << to_fraction(fb.value) << '\n';
  } else if (stage == Stage::second_round_arbitrary) {
    SecondRoundBound sb = second_round_bound_arbitrary(n, t, a, b);
    os << "w = " << sb.width << '\n' << "bound = " << one_minus(sb.value) << '\n';
    if (sb.vacuous) os << "vacuous\n";
  } else {
    const Rational rn = static_cast<long long>(n);
    const Rational frac = Rational(static_cast<long long>(t)) / rn;
    const Rational eps_t = c.eps_t.value_or(3 * t >= n ? frac - Rational(1, 3) : frac - Rational(1, 4));
    PrBound pb = second_round_bound_pr(eps_t, c.eps_gamma.value_or(from_ratio(1, 10)));
    os << "beta_threshold = " << to_fraction(pb.beta_threshold) << '\n'
       << "gamma_third = " << to_fraction(pb.gamma_third) << '\n'
       << "gamma_quarter = " << to_fraction(pb.gamma_quarter) << '\n'
       << "lambda = " << to_fraction(pb.lambda) << '\n'
       << "sigma = " << to_fraction(pb.sigma) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Locally consistent adversaries against short Byzantine agreement protocols"};
  root.require_subcommand(1);
  std::vector<std::unique_ptr<Invocation>> all;
  const std::vector<std::string> protocol_keys = {"protocol", "n", "t", "phase_limit", "q"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> keys = protocol_keys;
    keys.insert(keys.end(), extra.begin(), extra.end());
    return keys;
  };

  auto& list = subcommand(root, all, "list-protocols", "print the protocol catalog", {"out"});
  auto& simulate = subcommand(root, all, "simulate", "honest executions; one trial prints the trace as JSON lines",
                              with({"inputs", "trials", "seed", "confidence", "out", "workers"}));
  auto& attack = subcommand(root, all, "attack", "measure a protocol under one attack",
                            with({"attack", "regime", "inputs", "sigma", "lambda", "delta", "eps_t", "eps_gamma",
                                  "trials", "seed", "confidence", "out", "workers"}));
  auto& validate = subcommand(root, all, "validate", "check that an attack's traces are locally consistent",
                              with({"attack", "regime", "inputs", "sigma", "lambda", "delta", "eps_t", "eps_gamma",
                                    "trials", "seed", "out", "workers"}));
  auto& aud = subcommand(root, all, "audit", "run the stage's attack suite and check the bound",
                         with({"stage", "regime", "eps_t", "eps_gamma", "delta", "trials", "seed", "confidence",
                               "out", "workers"}));
  auto& conj = subcommand(root, all, "conjecture", "evaluate a set-family pair",
                          {"family", "n", "k", "radius", "sigma", "lambda", "delta", "mode", "trials", "seed",
                           "confidence", "out", "workers"});
  auto& bounds = subcommand(root, all, "bounds", "evaluate a bound exactly",
                            {"stage", "protocol", "n", "t", "eps_t", "eps_gamma", "out"});
  bounds.app->add_option("--alpha", bounds.raw["alpha"], "measured disagreement (default 0)");
  bounds.app->add_option("--beta", bounds.raw["beta"], "measured validity violation (default 0)");
  for (auto* inv : {&simulate, &attack, &aud}) {
    inv->app->add_flag("--no-timestamp", inv->no_timestamp, "omit the '# generated' line");
  }

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = root.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list.app) return cmd_list(list);
    if (*simulate.app) return cmd_simulate(simulate);
    if (*attack.app) return cmd_attack(attack);
    if (*validate.app) return cmd_validate(validate);
    if (*aud.app) return cmd_audit(aud);
    if (*conj.app) return cmd_conjecture(conj);
    if (*bounds.app) return cmd_bounds(bounds);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutOfScope& e) {
    std::cerr << "out of scope: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
