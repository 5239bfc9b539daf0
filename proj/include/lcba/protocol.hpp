#pragma once

#include "lcba/types.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lcba {

// One accepted message as the receiving party sees it.  For public-randomness
// protocols the frame is already split into the sender's coin, its setup
// (round 1 only) and the protocol body.
struct Received {
  bool present = false;
  std::string_view body;
  Coin coin = 0;
  std::string_view setup;
};
using ReceivedRound = std::vector<Received>;  // indexed by sender

// Incremental party state.  A machine that has absorbed rounds 1..r-1 is
// equivalent to the view of round r; Protocol::replay builds one from a View.
class PartyMachine {
 public:
  virtual ~PartyMachine() = default;
  virtual std::unique_ptr<PartyMachine> clone() const = 0;
  virtual std::string body(int round, PartyId receiver, Coin own_coin) const = 0;
  virtual void absorb(int round, Coin own_coin, const ReceivedRound& inbox) = 0;
  // Sticky once set.
  virtual Output decision() const = 0;
};

struct View {
  Bit input = 0;
  std::string setup;
  std::vector<Coin> coins;                                    // [round - 1], through the current round
  std::vector<std::vector<std::optional<std::string>>> inbox;  // [round - 1][sender], earlier rounds only
};

class Protocol {
 public:
  virtual ~Protocol() = default;

  const std::string& name() const { return name_; }
  std::size_t n() const { return n_; }
  std::size_t t() const { return t_; }
  int q() const { return q_; }
  bool public_randomness() const { return public_randomness_; }

  virtual CoinDomain coin_domain(int round) const = 0;
  virtual SetupBundle sample_setup(Seed seed) const;
  virtual std::unique_ptr<PartyMachine> start(PartyId self, Bit input, std::string_view setup) const = 0;
  virtual std::shared_ptr<Protocol> clone() const = 0;
  virtual std::string parameters() const;

  std::string encode(int round, Coin coin, std::string_view setup, std::string_view body) const;
  // Malformed frames come back with present = false.
  Received decode(int round, std::string_view payload) const;
  std::string message(const PartyMachine& machine, int round, PartyId receiver, Coin coin,
                      std::string_view setup) const;

  std::unique_ptr<PartyMachine> replay(PartyId party, const View& view) const;
  std::string next_msg(PartyId sender, PartyId receiver, int round, const View& view) const;
  Output output_fn(PartyId party, const View& view) const;

  void set_round_budget(int q);

 protected:
  Protocol(std::string name, std::size_t n, std::size_t t, int q, bool public_randomness);

 private:
  std::string name_;
  std::size_t n_;
  std::size_t t_;
  int q_;
  bool public_randomness_;
};

using ProtocolSpec = std::shared_ptr<const Protocol>;

// Same protocol, different halting-round budget under test.
ProtocolSpec with_round_budget(const ProtocolSpec& spec, int q);

// Majority with ties resolved to 0.
Bit majority(std::size_t ones, std::size_t total);

}  // namespace lcba
