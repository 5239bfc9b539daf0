#pragma once

#include "lcba/prf.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcba {

using Bit = std::uint8_t;
// Parties are numbered 0..n-1 throughout the library.
using PartyId = std::size_t;
using Coin = std::uint64_t;
// nullopt is the "no output" marker.
using Output = std::optional<Bit>;

// Sorted, duplicate-free.
using PartySet = std::vector<PartyId>;

inline constexpr int kNever = std::numeric_limits<int>::max();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfScope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StrategyViolation : public std::runtime_error {
 public:
  StrategyViolation(int round, PartyId party, PartyId receiver, const std::string& reason);
  int round;
  PartyId party;
  PartyId receiver;
};

struct InputVector {
  std::vector<Bit> bits;

  InputVector() = default;
  explicit InputVector(std::vector<Bit> b);
  // "001101" style.
  static InputVector parse(std::string_view text);
  static InputVector constant(std::size_t n, Bit b);

  std::size_t size() const { return bits.size(); }
  Bit operator[](PartyId i) const { return bits[i]; }
  std::string str() const;
  bool operator==(const InputVector&) const = default;
};

// Hamming distance; sizes must match.
std::size_t distance(const InputVector& a, const InputVector& b);
PartySet differing_positions(const InputVector& a, const InputVector& b);
InputVector flipped(const InputVector& v, const PartySet& where);

struct CoinDomain {
  unsigned bits = 0;  // 0 means the round flips no coin

  bool empty() const { return bits == 0; }
  Coin mask() const { return bits >= 64 ? ~Coin{0} : ((Coin{1} << bits) - 1); }
  bool operator==(const CoinDomain&) const = default;
};

struct CoinTape {
  std::vector<std::vector<Coin>> per_round;  // [round - 1][party]
  std::vector<CoinDomain> shape;             // [round - 1]

  Coin at(int round, PartyId party) const { return per_round[static_cast<std::size_t>(round - 1)][party]; }
  bool operator==(const CoinTape&) const = default;
};

struct SetupBundle {
  std::vector<std::string> per_party;
  std::string source;

  bool operator==(const SetupBundle&) const = default;
};

struct Message {
  int round = 0;
  PartyId from = 0;
  PartyId to = 0;
  std::string payload;
  bool is_abort = false;

  bool operator==(const Message&) const = default;
};

PartySet make_set(std::vector<PartyId> members);
PartySet range_set(PartyId first, PartyId last);  // [first, last)
PartySet all_parties(std::size_t n);
bool contains(const PartySet& s, PartyId p);
PartySet set_union(const PartySet& a, const PartySet& b);
PartySet set_minus(const PartySet& a, const PartySet& b);
PartySet complement(std::size_t n, const PartySet& s);
std::vector<bool> membership(std::size_t n, const PartySet& s);
std::string format_set(const PartySet& s);

}  // namespace lcba
