#include "lcba/trace.hpp"

#include "json.hpp"

namespace lcba {

PartySet ExecutionTrace::honest() const {
  PartySet out;
  for (PartyId i = 0; i < n; ++i) {
    if (corruption_log[i] == kNever) out.push_back(i);
  }
  return out;
}

PartySet ExecutionTrace::corrupted() const {
  PartySet out;
  for (PartyId i = 0; i < n; ++i) {
    if (corruption_log[i] != kNever) out.push_back(i);
  }
  return out;
}

std::vector<Output> outputs_of(const ExecutionTrace& trace, const PartySet& who) {
  std::vector<Output> out;
  out.reserve(who.size());
  for (PartyId p : who) {
    if (p >= trace.n) throw ConfigError("party id " + std::to_string(p) + " out of range");
    out.push_back(trace.outputs[p]);
  }
  return out;
}

bool halted_by(const ExecutionTrace& trace, int round, const PartySet& who) {
  for (PartyId p : who) {
    if (p >= trace.n || trace.halt_round[p] > round) return false;
  }
  return true;
}

bool same_execution(const ExecutionTrace& a, const ExecutionTrace& b, const PartySet& who) {
  if (a.n != b.n || a.setup != b.setup || a.coins != b.coins || a.mailboxes != b.mailboxes) return false;
  for (PartyId p : who) {
    if (a.outputs[p] != b.outputs[p] || a.halt_round[p] != b.halt_round[p]) return false;
  }
  return true;
}

std::string hex_bytes(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) {
    auto u = static_cast<unsigned char>(c);
    out.push_back(digits[u >> 4]);
    out.push_back(digits[u & 15]);
  }
  return out;
}

namespace {

nlohmann::json output_json(const Output& o) {
  if (!o) return nullptr;
  return static_cast<int>(*o);
}

nlohmann::json round_json(int round, int kept) { return kept == kNever ? nlohmann::json(nullptr) : nlohmann::json(round); }

}  // namespace

std::string trace_to_jsonl(const ExecutionTrace& trace) {
  std::string out;
  nlohmann::json header;
  header["record"] = "header";
  header["n"] = trace.n;
  header["q"] = trace.q;
  header["inputs"] = trace.inputs.str();
  header["setup_source"] = trace.setup.source;
  nlohmann::json setups = nlohmann::json::array();
  for (const auto& s : trace.setup.per_party) setups.push_back(hex_bytes(s));
  header["setup"] = setups;
  nlohmann::json log = nlohmann::json::array();
  for (int c : trace.corruption_log) log.push_back(round_json(c, c));
  header["corruption_log"] = log;
  out += header.dump() + "\n";

  for (int r = 1; r <= trace.rounds_run(); ++r) {
    nlohmann::json rec;
    rec["record"] = "round";
    rec["round"] = r;
    rec["coin_bits"] = trace.coins.shape.size() >= static_cast<std::size_t>(r) ? trace.coins.shape[r - 1].bits : 0;
    rec["coins"] = trace.coins.per_round[static_cast<std::size_t>(r - 1)];
    nlohmann::json msgs = nlohmann::json::array();
    for (const Message& m : trace.mailboxes[static_cast<std::size_t>(r - 1)]) {
      nlohmann::json jm;
      jm["from"] = m.from;
      jm["to"] = m.to;
      if (m.is_abort) {
        jm["abort"] = true;
      } else {
        jm["payload"] = hex_bytes(m.payload);
      }
      msgs.push_back(std::move(jm));
    }
    rec["messages"] = std::move(msgs);
    nlohmann::json halted = nlohmann::json::array();
    for (PartyId i = 0; i < trace.n; ++i) {
      if (trace.halt_round[i] == r) halted.push_back(i);
    }
    rec["halted"] = halted;
    out += rec.dump() + "\n";
  }

  nlohmann::json tail;
  tail["record"] = "outcome";
  nlohmann::json outs = nlohmann::json::array();
  nlohmann::json halts = nlohmann::json::array();
  for (PartyId i = 0; i < trace.n; ++i) {
    outs.push_back(output_json(trace.outputs[i]));
    halts.push_back(round_json(trace.halt_round[i], trace.halt_round[i]));
  }
  tail["outputs"] = outs;
  tail["halt_round"] = halts;
  out += tail.dump() + "\n";
  return out;
}

}  // namespace lcba
