#include "lcba/protocols.hpp"

#include <algorithm>

namespace lcba {

namespace {

char bit_char(Bit b) { return static_cast<char>('0' + b); }

// Reads a single vote character; anything else counts as nothing received.
std::optional<Bit> vote_of(const Received& r) {
  if (!r.present || r.body.size() != 1) return std::nullopt;
  if (r.body[0] == '0') return Bit{0};
  if (r.body[0] == '1') return Bit{1};
  return std::nullopt;
}

struct Tally {
  std::size_t zeros = 0;
  std::size_t ones = 0;
  std::size_t total() const { return zeros + ones; }
};

Tally tally(const ReceivedRound& inbox) {
  Tally t;
  for (const Received& r : inbox) {
    if (auto v = vote_of(r)) (*v ? t.ones : t.zeros)++;
  }
  return t;
}

// ---- one-round majority ----------------------------------------------------

class MajorityMachine final : public PartyMachine {
 public:
  explicit MajorityMachine(Bit input) : input_(input) {}
  std::unique_ptr<PartyMachine> clone() const override { return std::make_unique<MajorityMachine>(*this); }
  std::string body(int, PartyId, Coin) const override { return std::string(1, bit_char(input_)); }
  void absorb(int round, Coin, const ReceivedRound& inbox) override {
    if (round != 1 || decided_) return;
    Tally t = tally(inbox);
    decided_ = majority(t.ones, t.total());
  }
  Output decision() const override { return decided_; }

 private:
  Bit input_;
  Output decided_;
};

class OneRoundMajority final : public Protocol {
 public:
  explicit OneRoundMajority(std::size_t n) : Protocol("one-round-majority", n, 0, 1, false) {}
  CoinDomain coin_domain(int) const override { return {}; }
  std::unique_ptr<PartyMachine> start(PartyId, Bit input, std::string_view) const override {
    return std::make_unique<MajorityMachine>(input);
  }
  std::shared_ptr<Protocol> clone() const override { return std::make_shared<OneRoundMajority>(*this); }
  std::string parameters() const override { return "n=" + std::to_string(n()); }
};

// ---- two-round coin majority -----------------------------------------------

class CoinMajorityMachine final : public PartyMachine {
 public:
  CoinMajorityMachine(Bit input, std::size_t n, std::size_t t) : input_(input), n_(n), t_(t) {}
  std::unique_ptr<PartyMachine> clone() const override { return std::make_unique<CoinMajorityMachine>(*this); }

  std::string body(int round, PartyId, Coin) const override {
    if (round == 1) return std::string(1, bit_char(input_));
    if (round == 2) return echo_;
    return std::string();
  }

  void absorb(int round, Coin, const ReceivedRound& inbox) override {
    if (round == 1) {
      echo_.assign(n_, '-');
      for (PartyId u = 0; u < n_; ++u) {
        if (auto v = vote_of(inbox[u])) echo_[u] = bit_char(*v);
      }
      first_ = tally(inbox);
      return;
    }
    if (round != 2 || decided_) return;
    std::size_t coins = 0;
    std::size_t ones = 0;
    for (const Received& r : inbox) {
      if (!r.present) continue;
      ++coins;
      ones += r.coin & 1;
    }
    const Bit coin_majority = majority(ones, coins);
    const std::size_t need = n_ - t_;
    const bool blocked = (first_.zeros >= need && coin_majority != 0) || (first_.ones >= need && coin_majority != 1);
    if (!blocked) decided_ = coin_majority;
  }

  Output decision() const override { return decided_; }

 private:
  Bit input_;
  std::size_t n_;
  std::size_t t_;
  std::string echo_;
  Tally first_;
  Output decided_;
};

class TwoRoundCoinMajority final : public Protocol {
 public:
  TwoRoundCoinMajority(std::size_t n, std::size_t t) : Protocol("two-round-coin-majority", n, t, 2, true) {
    if (n % 2 == 0) throw ConfigError("two-round-coin-majority needs an odd party count");
    if (t >= n) throw ConfigError("t must be below n");
  }
  CoinDomain coin_domain(int round) const override { return round == 2 ? CoinDomain{1} : CoinDomain{}; }
  std::unique_ptr<PartyMachine> start(PartyId, Bit input, std::string_view) const override {
    return std::make_unique<CoinMajorityMachine>(input, n(), t());
  }
  std::shared_ptr<Protocol> clone() const override { return std::make_shared<TwoRoundCoinMajority>(*this); }
};

// ---- micali-lite -------------------------------------------------------------

class MicaliMachine final : public PartyMachine {
 public:
  MicaliMachine(Bit input, std::size_t n, std::size_t t) : vote_(input), n_(n), t_(t) {}
  std::unique_ptr<PartyMachine> clone() const override { return std::make_unique<MicaliMachine>(*this); }
  std::string body(int, PartyId, Coin) const override { return std::string(1, bit_char(vote_)); }

  void absorb(int round, Coin, const ReceivedRound& inbox) override {
    const Tally c = tally(inbox);
    const std::size_t need = n_ - t_;
    switch ((round - 1) % 3) {
      case 0:
        if (c.zeros >= need) {
          vote_ = 0;
        } else if (c.ones >= need) {
          vote_ = 1;
        } else {
          std::optional<Coin> lowest;
          for (const Received& r : inbox) {
            if (!r.present) continue;
            if (!lowest || r.coin < *lowest) lowest = r.coin;
          }
          if (lowest) vote_ = static_cast<Bit>(*lowest & 1);
        }
        break;
      case 1:
        if (c.zeros >= need) {
          vote_ = 0;
          if (!decided_) decided_ = Bit{0};
        } else {
          vote_ = c.ones >= need ? 1 : 0;
        }
        break;
      default:
        if (c.ones >= need) {
          vote_ = 1;
          if (!decided_) decided_ = Bit{1};
        } else {
          vote_ = c.zeros >= need ? 0 : 1;
        }
        break;
    }
    if (decided_) vote_ = *decided_;
  }

  Output decision() const override { return decided_; }

 private:
  Bit vote_;
  std::size_t n_;
  std::size_t t_;
  Output decided_;
};

class MicaliLite final : public Protocol {
 public:
  MicaliLite(std::size_t n, std::size_t t, int phase_limit)
      : Protocol("micali-lite", n, t, 3 * phase_limit, true), phase_limit_(phase_limit) {
    if (phase_limit < 1) throw ConfigError("phase_limit must be at least 1");
    if (t >= n) throw ConfigError("t must be below n");
  }
  CoinDomain coin_domain(int round) const override {
    return micali_is_coin_round(round) ? CoinDomain{64} : CoinDomain{};
  }
  std::unique_ptr<PartyMachine> start(PartyId, Bit input, std::string_view) const override {
    return std::make_unique<MicaliMachine>(input, n(), t());
  }
  std::shared_ptr<Protocol> clone() const override { return std::make_shared<MicaliLite>(*this); }
  std::string parameters() const override {
    return Protocol::parameters() + " phase_limit=" + std::to_string(phase_limit_);
  }

 private:
  int phase_limit_;
};

// ---- beacon ------------------------------------------------------------------

class BeaconMachine final : public PartyMachine {
 public:
  BeaconMachine(Bit input, std::size_t n, std::size_t t, std::string beacons)
      : vote_(input), n_(n), t_(t), beacons_(std::move(beacons)) {}
  std::unique_ptr<PartyMachine> clone() const override { return std::make_unique<BeaconMachine>(*this); }
  std::string body(int, PartyId, Coin) const override { return std::string(1, bit_char(vote_)); }

  void absorb(int round, Coin, const ReceivedRound& inbox) override {
    const Tally c = tally(inbox);
    const Bit plurality = c.ones > c.zeros ? 1 : 0;
    const std::size_t support = plurality ? c.ones : c.zeros;
    if (support + t_ >= n_) {
      vote_ = plurality;
      if (!decided_) decided_ = plurality;
    } else if (support + 2 * t_ >= n_) {
      vote_ = plurality;
    } else {
      const std::size_t idx = static_cast<std::size_t>(round - 1);
      vote_ = idx < beacons_.size() && beacons_[idx] == '1' ? 1 : 0;
    }
    if (decided_) vote_ = *decided_;
  }

  Output decision() const override { return decided_; }

 private:
  Bit vote_;
  std::size_t n_;
  std::size_t t_;
  std::string beacons_;
  Output decided_;
};

class BeaconProtocol final : public Protocol {
 public:
  BeaconProtocol(std::size_t n, std::size_t t, int phase_limit)
      : Protocol("beacon", n, t, phase_limit, false), phase_limit_(phase_limit) {
    if (phase_limit < 1) throw ConfigError("phase_limit must be at least 1");
    if (t >= n) throw ConfigError("t must be below n");
  }
  CoinDomain coin_domain(int) const override { return {}; }
  SetupBundle sample_setup(Seed seed) const override {
    PrfStream rng(seed, Purpose::setup, 1);
    std::string beacons;
    for (int p = 0; p < phase_limit_; ++p) beacons.push_back(rng.fair_bit() ? '1' : '0');
    SetupBundle s;
    s.per_party.assign(n(), beacons);
    s.source = "shared-beacon";
    return s;
  }
  std::unique_ptr<PartyMachine> start(PartyId, Bit input, std::string_view setup) const override {
    return std::make_unique<BeaconMachine>(input, n(), t(), std::string(setup));
  }
  std::shared_ptr<Protocol> clone() const override { return std::make_shared<BeaconProtocol>(*this); }
  std::string parameters() const override {
    return Protocol::parameters() + " phase_limit=" + std::to_string(phase_limit_);
  }

 private:
  int phase_limit_;
};

ProtocolSpec finish(std::shared_ptr<Protocol> p, const ProtocolParams& params) {
  if (params.q) p->set_round_budget(*params.q);
  return p;
}

}  // namespace

bool micali_is_coin_round(int round) { return round >= 1 && (round - 1) % 3 == 0; }

PartyId micali_leader(const CoinTape& coins, int round) {
  const auto& row = coins.per_round.at(static_cast<std::size_t>(round - 1));
  return static_cast<PartyId>(std::min_element(row.begin(), row.end()) - row.begin());
}

ProtocolSpec one_round_majority(std::size_t n) { return std::make_shared<OneRoundMajority>(n); }

ProtocolSpec two_round_coin_majority(std::size_t n, std::size_t t) {
  return std::make_shared<TwoRoundCoinMajority>(n, t);
}

ProtocolSpec micali_lite(std::size_t n, std::size_t t, int phase_limit) {
  return std::make_shared<MicaliLite>(n, t, phase_limit);
}

ProtocolSpec beacon_protocol(std::size_t n, std::size_t t, int phase_limit) {
  return std::make_shared<BeaconProtocol>(n, t, phase_limit);
}

const std::vector<ProtocolCatalogEntry>& protocol_catalog() {
  static const std::vector<ProtocolCatalogEntry> catalog = {
      {"one-round-majority", "n", {"0 against t=0", "0", 1, "1"}, "halts in round 1 on every execution",
       [](const ProtocolParams& p) { return finish(std::make_shared<OneRoundMajority>(p.n), p); }},
      {"two-round-coin-majority", "n (odd), t", {"0", "0", 2, "1/2"},
       "public randomness; non-halting branch is not simulated past round 2",
       [](const ProtocolParams& p) { return finish(std::make_shared<TwoRoundCoinMajority>(p.n, p.t), p); }},
      {"micali-lite", "n, t < n/3, phase_limit", {"measured", "measured", 3, "1/3"},
       "public randomness; phase logic is a reconstruction, guarantees are measured",
       [](const ProtocolParams& p) { return finish(std::make_shared<MicaliLite>(p.n, p.t, p.phase_limit), p); }},
      {"beacon", "n, t < n/4, phase_limit", {"measured", "measured", 2, "measured"},
       "shared beacon bits from setup; not a public-randomness protocol",
       [](const ProtocolParams& p) { return finish(std::make_shared<BeaconProtocol>(p.n, p.t, p.phase_limit), p); }},
  };
  return catalog;
}

const ProtocolCatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : protocol_catalog()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown protocol '" + name + "'");
}

ProtocolSpec build_protocol(const std::string& name, const ProtocolParams& params) {
  return catalog_entry(name).build(params);
}

}  // namespace lcba
