#include "lcba/types.hpp"

#include <algorithm>
#include <iterator>

namespace lcba {

StrategyViolation::StrategyViolation(int r, PartyId p, PartyId to, const std::string& reason)
    : std::runtime_error("strategy violation at round " + std::to_string(r) + ", party " + std::to_string(p) +
                         " -> " + std::to_string(to) + ": " + reason),
      round(r),
      party(p),
      receiver(to) {}

InputVector::InputVector(std::vector<Bit> b) : bits(std::move(b)) {
  for (Bit x : bits) {
    if (x > 1) throw ConfigError("input bits must be 0 or 1");
  }
}

InputVector InputVector::parse(std::string_view text) {
  std::vector<Bit> b;
  b.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      b.push_back(static_cast<Bit>(c - '0'));
    } else {
      throw ConfigError("input vector may only contain 0 and 1, got '" + std::string(text) + "'");
    }
  }
  return InputVector(std::move(b));
}

InputVector InputVector::constant(std::size_t n, Bit b) { return InputVector(std::vector<Bit>(n, b)); }

std::string InputVector::str() const {
  std::string s;
  s.reserve(bits.size());
  for (Bit b : bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::size_t distance(const InputVector& a, const InputVector& b) {
  if (a.size() != b.size()) throw ConfigError("input vectors of different length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

PartySet differing_positions(const InputVector& a, const InputVector& b) {
  if (a.size() != b.size()) throw ConfigError("input vectors of different length");
  PartySet out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) out.push_back(i);
  }
  return out;
}

InputVector flipped(const InputVector& v, const PartySet& where) {
  InputVector out = v;
  for (PartyId i : where) out.bits.at(i) ^= 1;
  return out;
}

PartySet make_set(std::vector<PartyId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

PartySet range_set(PartyId first, PartyId last) {
  PartySet out;
  for (PartyId i = first; i < last; ++i) out.push_back(i);
  return out;
}

PartySet all_parties(std::size_t n) { return range_set(0, n); }

bool contains(const PartySet& s, PartyId p) { return std::binary_search(s.begin(), s.end(), p); }

PartySet set_union(const PartySet& a, const PartySet& b) {
  PartySet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PartySet set_minus(const PartySet& a, const PartySet& b) {
  PartySet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PartySet complement(std::size_t n, const PartySet& s) { return set_minus(all_parties(n), s); }

std::vector<bool> membership(std::size_t n, const PartySet& s) {
  std::vector<bool> in(n, false);
  for (PartyId p : s) {
    if (p >= n) throw ConfigError("party id " + std::to_string(p) + " out of range for n=" + std::to_string(n));
    in[p] = true;
  }
  return in;
}

std::string format_set(const PartySet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

}  // namespace lcba
