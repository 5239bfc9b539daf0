#include "lcba/protocol.hpp"

#include <cstring>

namespace lcba {

namespace {

constexpr char kFrameTag = 'P';

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(std::string_view s, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  return v;
}

}  // namespace

Protocol::Protocol(std::string name, std::size_t n, std::size_t t, int q, bool public_randomness)
    : name_(std::move(name)), n_(n), t_(t), q_(q), public_randomness_(public_randomness) {
  if (n == 0) throw ConfigError("protocol needs at least one party");
  if (q < 1) throw ConfigError("round budget q must be at least 1");
}

SetupBundle Protocol::sample_setup(Seed) const {
  SetupBundle s;
  s.per_party.assign(n_, std::string());
  s.source = "none";
  return s;
}

std::string Protocol::parameters() const {
  return "n=" + std::to_string(n_) + " t=" + std::to_string(t_) + " q=" + std::to_string(q_);
}

std::string Protocol::encode(int round, Coin coin, std::string_view setup, std::string_view body) const {
  if (!public_randomness_) return std::string(body);
  std::string out;
  out.reserve(1 + 8 + (round == 1 ? 4 + setup.size() : 0) + body.size());
  out.push_back(kFrameTag);
  put_u64(out, coin);
  if (round == 1) {
    put_u32(out, static_cast<std::uint32_t>(setup.size()));
    out.append(setup);
  }
  out.append(body);
  return out;
}

Received Protocol::decode(int round, std::string_view payload) const {
  Received r;
  if (!public_randomness_) {
    r.present = true;
    r.body = payload;
    return r;
  }
  if (payload.size() < 9 || payload[0] != kFrameTag) return r;
  r.coin = get_uint(payload, 1, 8);
  std::size_t pos = 9;
  if (round == 1) {
    if (payload.size() < pos + 4) return r;
    std::size_t len = get_uint(payload, pos, 4);
    pos += 4;
    if (payload.size() < pos + len) return r;
    r.setup = payload.substr(pos, len);
    pos += len;
  }
  r.body = payload.substr(pos);
  r.present = true;
  return r;
}

std::string Protocol::message(const PartyMachine& machine, int round, PartyId receiver, Coin coin,
                              std::string_view setup) const {
  return encode(round, coin, setup, machine.body(round, receiver, coin));
}

std::unique_ptr<PartyMachine> Protocol::replay(PartyId party, const View& view) const {
  if (party >= n_) throw ConfigError("party id out of range");
  if (view.coins.size() < view.inbox.size()) throw ConfigError("view has fewer coins than inbox rounds");
  auto machine = start(party, view.input, view.setup);
  ReceivedRound round_inbox(n_);
  for (std::size_t r = 0; r < view.inbox.size(); ++r) {
    const auto& slots = view.inbox[r];
    if (slots.size() != n_) throw ConfigError("view inbox round has wrong sender count");
    for (PartyId s = 0; s < n_; ++s) {
      round_inbox[s] = slots[s] ? decode(static_cast<int>(r + 1), *slots[s]) : Received{};
    }
    machine->absorb(static_cast<int>(r + 1), view.coins[r], round_inbox);
  }
  return machine;
}

std::string Protocol::next_msg(PartyId sender, PartyId receiver, int round, const View& view) const {
  if (round < 1 || static_cast<std::size_t>(round) != view.inbox.size() + 1) {
    throw ConfigError("view does not match round " + std::to_string(round));
  }
  if (view.coins.size() < static_cast<std::size_t>(round)) throw ConfigError("view lacks the current round's coin");
  auto machine = replay(sender, view);
  return message(*machine, round, receiver, view.coins[static_cast<std::size_t>(round - 1)], view.setup);
}

Output Protocol::output_fn(PartyId party, const View& view) const { return replay(party, view)->decision(); }

void Protocol::set_round_budget(int q) {
  if (q < 1) throw ConfigError("round budget q must be at least 1");
  q_ = q;
}

ProtocolSpec with_round_budget(const ProtocolSpec& spec, int q) {
  auto copy = spec->clone();
  copy->set_round_budget(q);
  return copy;
}

Bit majority(std::size_t ones, std::size_t total) { return (2 * ones > total) ? 1 : 0; }

}  // namespace lcba
