#include "lcba/conjecture.hpp"

#include "lcba/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace lcba {

MaskedVector mask(const MaskedVector& x, const PartySet& where) {
  MaskedVector out = x;
  for (PartyId i : where) {
    if (i >= out.size()) throw ConfigError("mask index out of range");
    out[i] = kBottom;
  }
  return out;
}

std::string format_masked(const MaskedVector& x) {
  std::string s;
  for (int v : x) s += v == kBottom ? std::string("_") : std::to_string(v);
  return s;
}

namespace {

void check_alphabet(int alphabet) {
  if (alphabet < 1 || alphabet > 256) throw ConfigError("alphabet size must lie in 1..256");
}

}  // namespace

SetFamilyPair prefix_sets(std::size_t n, std::size_t length, int alphabet) {
  if (length > n) throw ConfigError("prefix length exceeds n");
  if (alphabet < 2) throw ConfigError("prefix sets need both bits in the alphabet");
  check_alphabet(alphabet);
  SetFamilyPair p;
  p.name = "prefix(length=" + std::to_string(length) + ")";
  p.n = n;
  p.alphabet = alphabet;
  for (int b = 0; b < 2; ++b) {
    p.member[b] = [length, b](const MaskedVector& x) {
      for (std::size_t i = 0; i < length; ++i) {
        if (x[i] != b) return false;
      }
      return true;
    };
  }
  return p;
}

SetFamilyPair ball_sets(std::size_t n, std::size_t radius, int alphabet, BallMetric metric) {
  if (2 * radius >= n) throw ConfigError("ball radius must be below n/2");
  if (alphabet < 2) throw ConfigError("ball sets need both bits in the alphabet");
  check_alphabet(alphabet);
  SetFamilyPair p;
  p.name = std::string("ball(radius=") + std::to_string(radius) +
           (metric == BallMetric::bottom_counts ? "" : ",bottom-ignored") + ")";
  p.n = n;
  p.alphabet = alphabet;
  const bool ignore_bottom = metric == BallMetric::bottom_ignored;
  for (int b = 0; b < 2; ++b) {
    p.member[b] = [radius, b, ignore_bottom](const MaskedVector& x) {
      std::size_t off = 0;
      for (int v : x) {
        if (v == b || (ignore_bottom && v == kBottom)) continue;
        if (++off > radius) return false;
      }
      return true;
    };
  }
  return p;
}

SetFamilyPair explicit_sets(std::size_t n, int alphabet, std::set<MaskedVector> a0, std::set<MaskedVector> a1,
                            std::string name) {
  check_alphabet(alphabet);
  SetFamilyPair p;
  p.name = std::move(name);
  p.n = n;
  p.alphabet = alphabet;
  p.representation = SetFamilyPair::Representation::explicit_sets;
  auto s0 = std::make_shared<const std::set<MaskedVector>>(std::move(a0));
  auto s1 = std::make_shared<const std::set<MaskedVector>>(std::move(a1));
  p.member[0] = [s0](const MaskedVector& x) { return s0->count(x) > 0; };
  p.member[1] = [s1](const MaskedVector& x) { return s1->count(x) > 0; };
  return p;
}

namespace {

struct InducedWorld {
  ProtocolSpec spec;
  AttackGeometry g;
  std::unique_ptr<WorldSimulator> sim;
  std::vector<bool> excluded;
  int world = 0;
};

}  // namespace

SetFamilyPair protocol_induced_sets(const ProtocolSpec& spec, const AttackGeometry& g, const SetupBundle& setup,
                                    int world) {
  if (!spec->public_randomness()) throw ConfigError("protocol-induced sets need a public-randomness protocol");
  if (!spec->coin_domain(1).empty()) throw ConfigError("protocol-induced sets need a protocol with no round-1 coins");
  if (world < 0 || static_cast<std::size_t>(world) > g.cell_count) throw ConfigError("world must lie in 0..cell_count");
  const CoinDomain dom = spec->coin_domain(2);
  if (dom.bits > 8) throw ConfigError("round-2 coin domain too wide to enumerate as an alphabet");
  auto ctx = std::make_shared<InducedWorld>();
  ctx->spec = spec->q() == 2 ? spec : with_round_budget(spec, 2);
  ctx->g = g;
  ctx->world = world;
  ctx->sim = std::make_unique<WorldSimulator>(*ctx->spec, ctx->g, g.base, setup, std::vector<Coin>(g.n, 0));
  PartySet out = g.pivots;
  if (world >= 1) out = set_union(out, g.cells[static_cast<std::size_t>(world - 1)]);
  ctx->excluded = membership(g.n, out);

  SetFamilyPair p;
  p.name = "induced(" + spec->name() + ",world=" + std::to_string(world) + ")";
  p.n = g.n;
  p.alphabet = 1 << dom.bits;
  for (int b = 0; b < 2; ++b) {
    p.member[b] = [ctx, b](const MaskedVector& x) {
      const std::size_t n = ctx->g.n;
      if (x.size() != n) throw EvaluationError("tape length differs from n");
      std::vector<bool> aborting(n, false);
      std::vector<Coin> coins(n, 0);
      std::vector<bool> excluded = ctx->excluded;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == kBottom) {
          aborting[i] = true;
          excluded[i] = true;
        } else {
          coins[i] = static_cast<Coin>(x[i]);
        }
      }
      auto c = unanimous(ctx->sim->run(ctx->world, aborting, coins), excluded);
      return c && *c == b;
    };
  }
  return p;
}

std::string to_string(EvalMode m) { return m == EvalMode::exhaustive ? "exhaustive" : "monte-carlo"; }

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "exhaustive") return EvalMode::exhaustive;
  if (text == "monte-carlo" || text == "mc") return EvalMode::monte_carlo;
  throw ConfigError("unknown mode '" + text + "' (expected exhaustive or monte-carlo)");
}

bool exhaustive_feasible(std::size_t n, int alphabet) {
  return static_cast<double>(n) * std::log2(static_cast<double>(alphabet) + 1.0) <= 24.0 + 1e-9;
}

namespace {

void check_inputs(const SetFamilyPair& pair, const Rational& sigma) {
  if (pair.n == 0) throw ConfigError("family has n = 0");
  if (sigma < 0 || sigma > 1) throw ConfigError("sigma must lie in [0, 1]");
}

bool call(const SetFamilyPair& pair, int b, const MaskedVector& x) {
  try {
    return pair.contains(b, x);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("membership predicate failed: ") + e.what());
  }
}

ConjectureVerdict exhaustive(const SetFamilyPair& pair, const Rational& sigma, const Rational& lambda,
                             const Rational& delta, const ConjectureOptions& options) {
  const std::size_t n = pair.n;
  if (!exhaustive_feasible(n, pair.alphabet)) {
    throw ConfigError("exhaustive mode needs n*log2(|alphabet|+1) <= 24; use monte-carlo");
  }
  std::size_t tapes = 1;
  for (std::size_t i = 0; i < n; ++i) tapes *= static_cast<std::size_t>(pair.alphabet);
  const std::size_t sets = std::size_t{1} << n;

  std::vector<MaskedVector> tape(tapes, MaskedVector(n, 0));
  std::vector<std::uint8_t> plain(tapes, 0);  // bit b: tape in A_b
  for (std::size_t idx = 0; idx < tapes; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      tape[idx][i] = static_cast<int>(rest % static_cast<std::size_t>(pair.alphabet));
      rest /= static_cast<std::size_t>(pair.alphabet);
    }
    plain[idx] = static_cast<std::uint8_t>(call(pair, 0, tape[idx]) | (call(pair, 1, tape[idx]) << 1));
  }

  const unsigned workers = std::max(1u, options.workers);
  // [worker][size] tallies
  std::vector<std::vector<std::uint64_t>> touched(workers, std::vector<std::uint64_t>(n + 1, 0));
  std::vector<std::vector<std::uint64_t>> hyp0(workers, std::vector<std::uint64_t>(n + 1, 0));
  std::vector<std::vector<std::uint64_t>> hyp1(workers, std::vector<std::uint64_t>(n + 1, 0));
  const Rational need = lambda * static_cast<long long>(tapes);

  parallel_chunks(sets, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    MaskedVector masked(n);
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t size = static_cast<std::size_t>(std::popcount(s));
      std::uint64_t both[2] = {0, 0};
      std::uint64_t touch = 0;
      for (std::size_t idx = 0; idx < tapes; ++idx) {
        std::uint8_t m;
        if (s == 0) {
          m = plain[idx];
        } else {
          for (std::size_t i = 0; i < n; ++i) masked[i] = (s >> i) & 1 ? kBottom : tape[idx][i];
          m = static_cast<std::uint8_t>(call(pair, 0, masked) | (call(pair, 1, masked) << 1));
        }
        const std::uint8_t p = plain[idx];
        both[0] += (p & m & 1) != 0;
        both[1] += (p & m & 2) != 0;
        const std::uint8_t any = p | m;
        touch += (any & 3) == 3;
      }
      touched[w][size] += touch;
      if (Rational(static_cast<long long>(both[0])) >= need) ++hyp0[w][size];
      if (Rational(static_cast<long long>(both[1])) >= need) ++hyp1[w][size];
    }
  });

  ConjectureVerdict v;
  v.mode = EvalMode::exhaustive;
  Rational concl = 0;
  Rational level[2] = {0, 0};
  for (std::size_t size = 0; size <= n; ++size) {
    Rational weight = 1;
    for (std::size_t i = 0; i < size; ++i) weight *= sigma;
    for (std::size_t i = size; i < n; ++i) weight *= (1 - sigma);
    std::uint64_t t = 0, h0 = 0, h1 = 0;
    for (unsigned w = 0; w < workers; ++w) {
      t += touched[w][size];
      h0 += hyp0[w][size];
      h1 += hyp1[w][size];
    }
    concl += weight * Rational(static_cast<long long>(t), static_cast<long long>(tapes));
    level[0] += weight * static_cast<long long>(h0);
    level[1] += weight * static_cast<long long>(h1);
  }
  v.conclusion_exact = concl;
  v.conclusion = Estimate{to_double(concl), 0, 0, options.confidence};
  for (int b = 0; b < 2; ++b) {
    v.hypothesis_exact[b] = level[b];
    v.hypothesis_level[b] = to_double(level[b]);
    v.hypothesis_ok[b] = level[b] >= 1 - delta;
  }
  return v;
}

void draw(PrfStream& rng, int alphabet, double sigma, MaskedVector& r, MaskedVector& masked) {
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet)));
  for (std::size_t i = 0; i < r.size(); ++i) masked[i] = rng.bernoulli(sigma) ? kBottom : r[i];
}

Estimate mc_conclusion(const SetFamilyPair& pair, double sigma, const ConjectureOptions& options) {
  if (options.trials == 0) throw ConfigError("trials must be at least 1");
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::uint64_t> hits(workers, 0);
  parallel_chunks(options.trials, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    MaskedVector r(pair.n), masked(pair.n);
    for (std::size_t i = begin; i < end; ++i) {
      PrfStream rng(options.seed, Purpose::sampling, 0, i);
      draw(rng, pair.alphabet, sigma, r, masked);
      bool ok = true;
      for (int b = 0; b < 2 && ok; ++b) ok = call(pair, b, r) || call(pair, b, masked);
      hits[w] += ok;
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return make_estimate(total, options.trials, options.confidence);
}

void mc_hypothesis(const SetFamilyPair& pair, double sigma, double lambda, double delta,
                   const ConjectureOptions& options, ConjectureVerdict& v) {
  if (options.outer_samples == 0 || options.inner_samples == 0) throw ConfigError("sample counts must be positive");
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::array<std::uint64_t, 2>> good(workers, {0, 0});
  parallel_chunks(options.outer_samples, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    MaskedVector r(pair.n), masked(pair.n);
    for (std::size_t o = begin; o < end; ++o) {
      PrfStream srng(options.seed, Purpose::sampling, 1, o);
      std::vector<bool> in_s(pair.n);
      for (std::size_t i = 0; i < pair.n; ++i) in_s[i] = srng.bernoulli(sigma);
      std::uint64_t both[2] = {0, 0};
      for (std::size_t x = 0; x < options.inner_samples; ++x) {
        PrfStream rng(options.seed, Purpose::sampling, 2, o, x);
        for (std::size_t i = 0; i < pair.n; ++i) {
          r[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(pair.alphabet)));
          masked[i] = in_s[i] ? kBottom : r[i];
        }
        for (int b = 0; b < 2; ++b) both[b] += call(pair, b, r) && call(pair, b, masked);
      }
      for (int b = 0; b < 2; ++b) {
        good[w][static_cast<std::size_t>(b)] +=
            static_cast<double>(both[b]) >= lambda * static_cast<double>(options.inner_samples);
      }
    }
  });
  for (int b = 0; b < 2; ++b) {
    std::uint64_t g = 0;
    for (const auto& row : good) g += row[static_cast<std::size_t>(b)];
    v.hypothesis_level[b] = static_cast<double>(g) / static_cast<double>(options.outer_samples);
    v.hypothesis_ok[b] = v.hypothesis_level[b] >= 1 - delta;
  }
}

}  // namespace

ConjectureVerdict evaluate_conjecture(const SetFamilyPair& pair, const Rational& sigma, const Rational& lambda,
                                      const Rational& delta, const ConjectureOptions& options) {
  check_inputs(pair, sigma);
  if (options.mode == EvalMode::exhaustive) return exhaustive(pair, sigma, lambda, delta, options);
  ConjectureVerdict v;
  v.mode = EvalMode::monte_carlo;
  mc_hypothesis(pair, to_double(sigma), to_double(lambda), to_double(delta), options, v);
  v.conclusion = mc_conclusion(pair, to_double(sigma), options);
  return v;
}

ConjectureVerdict hypothesis_holds(const SetFamilyPair& pair, const Rational& sigma, const Rational& lambda,
                                   const Rational& delta, const ConjectureOptions& options) {
  return evaluate_conjecture(pair, sigma, lambda, delta, options);
}

Estimate conclusion_probability(const SetFamilyPair& pair, const Rational& sigma, const ConjectureOptions& options) {
  check_inputs(pair, sigma);
  if (options.mode == EvalMode::exhaustive) return exhaustive(pair, sigma, 1, 1, options).conclusion;
  return mc_conclusion(pair, to_double(sigma), options);
}

std::vector<Counterexample> search_counterexamples(const std::vector<SetFamilyPair>& families,
                                                   const std::vector<Rational>& sigmas,
                                                   const std::vector<Rational>& lambdas,
                                                   const std::vector<Rational>& deltas,
                                                   const ConjectureOptions& options) {
  if (deltas.empty()) throw ConfigError("delta grid is empty");
  const Rational smallest = *std::min_element(deltas.begin(), deltas.end());
  std::vector<Counterexample> found;
  for (const auto& fam : families) {
    for (const auto& sigma : sigmas) {
      for (const auto& lambda : lambdas) {
        ConjectureVerdict v = evaluate_conjecture(fam, sigma, lambda, smallest, options);
        if (!v.hypothesis()) continue;
        const bool below = v.conclusion_exact ? *v.conclusion_exact < smallest : v.conclusion.hi() < to_double(smallest);
        if (below) found.push_back(Counterexample{fam.name, sigma, lambda, v.conclusion.point, v.conclusion_exact});
      }
    }
  }
  return found;
}

std::string to_json(const ConjectureVerdict& v, const SetFamilyPair& pair, const Rational& sigma,
                    const Rational& lambda, const Rational& delta) {
  nlohmann::ordered_json j;
  j["family"] = pair.name;
  j["n"] = pair.n;
  j["alphabet"] = pair.alphabet;
  j["sigma"] = to_exact_text(sigma);
  j["lambda"] = to_exact_text(lambda);
  j["delta"] = to_exact_text(delta);
  j["mode"] = to_string(v.mode);
  j["hypothesis_ok"] = {v.hypothesis_ok[0], v.hypothesis_ok[1]};
  j["hypothesis_level"] = {v.hypothesis_level[0], v.hypothesis_level[1]};
  if (v.hypothesis_exact[0] && v.hypothesis_exact[1]) {
    j["hypothesis_exact"] = {to_fraction(*v.hypothesis_exact[0]), to_fraction(*v.hypothesis_exact[1])};
  }
  j["conclusion"] = {{"point", v.conclusion.point}, {"trials", v.conclusion.trials}, {"ci_radius", v.conclusion.ci_radius}};
  if (v.conclusion_exact) j["conclusion_exact"] = to_fraction(*v.conclusion_exact);
  return j.dump();
}

}  // namespace lcba
