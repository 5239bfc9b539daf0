#include "lcba/config.hpp"

#include "lcba/attacks.hpp"
#include "lcba/conjecture.hpp"
#include "lcba/protocols.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace lcba {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

unsigned long long parse_unsigned(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  if (!v.empty() && v[0] != '-') {
    try {
      x = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

Rational parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_rational(v);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class T>
std::optional<std::string> show(const std::optional<T>& x) {
  if (!x) return std::nullopt;
  if constexpr (std::is_same_v<T, std::string>) {
    return *x;
  } else if constexpr (std::is_same_v<T, Rational>) {
    return to_exact_text(*x);
  } else {
    return std::to_string(*x);
  }
}

#define LCBA_TEXT(name) \
  Field { #name, [](ExperimentConfig& c, const std::string& v) { c.name = v; }, [](const ExperimentConfig& c) { return show(c.name); } }
#define LCBA_INT(name) \
  Field { #name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_integer(#name, v); }, [](const ExperimentConfig& c) { return show(c.name); } }
#define LCBA_REAL(name) \
  Field { #name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_real(#name, v); }, [](const ExperimentConfig& c) { return show(c.name); } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      LCBA_TEXT(protocol),
      LCBA_INT(phase_limit),
      LCBA_INT(q),
      LCBA_TEXT(stage),
      LCBA_TEXT(regime),
      LCBA_INT(n),
      LCBA_INT(t),
      LCBA_REAL(sigma),
      LCBA_REAL(lambda),
      LCBA_REAL(delta),
      LCBA_REAL(eps_t),
      LCBA_REAL(eps_gamma),
      LCBA_INT(trials),
      Field{"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_unsigned("seed", v); },
            [](const ExperimentConfig& c) { return show(c.seed); }},
      LCBA_REAL(confidence),
      LCBA_TEXT(out),
      LCBA_INT(workers),
      LCBA_TEXT(family),
      LCBA_INT(k),
      LCBA_INT(radius),
      LCBA_TEXT(mode),
      LCBA_TEXT(attack),
      LCBA_TEXT(inputs),
  };
  return table;
}

#undef LCBA_TEXT
#undef LCBA_INT
#undef LCBA_REAL

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown key '" + key + "'");
}

void require_open_unit(const std::optional<Rational>& x, const char* name) {
  if (x && (*x <= 0 || *x >= 1)) throw ConfigError(std::string(name) + ": must lie in (0, 1)");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  field(key).set(c, value);
}

std::optional<std::string> config_value(const ExperimentConfig& c, const std::string& key) { return field(key).get(c); }

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto where = origin + ":" + std::to_string(line) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + key + ": empty value");
    try {
      set_config_value(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    if (auto v = f.get(c)) out += f.key + " = " + *v + "\n";
  }
  return out;
}

void validate_config(const ExperimentConfig& c) {
  if (c.protocol) catalog_entry(*c.protocol);  // throws on unknown names
  if (c.stage) parse_stage(*c.stage);
  if (c.regime) parse_regime(*c.regime);
  if (c.mode) parse_eval_mode(*c.mode);
  if (c.n && *c.n < 1) throw ConfigError("n: must be at least 1");
  if (c.t && *c.t < 0) throw ConfigError("t: must be non-negative");
  if (c.n && c.t && *c.t > *c.n) throw ConfigError("t: exceeds n");
  if (c.phase_limit && *c.phase_limit < 1) throw ConfigError("phase_limit: must be at least 1");
  if (c.q && *c.q < 1) throw ConfigError("q: must be at least 1");
  if (c.trials && *c.trials < 1) throw ConfigError("trials: must be at least 1");
  if (c.workers && *c.workers < 0) throw ConfigError("workers: must be non-negative");
  if (c.k && *c.k < 0) throw ConfigError("k: must be non-negative");
  if (c.radius && *c.radius < 0) throw ConfigError("radius: must be non-negative");
  if (c.n && c.k && *c.k > *c.n) throw ConfigError("k: exceeds n");
  require_open_unit(c.sigma, "sigma");
  require_open_unit(c.lambda, "lambda");
  require_open_unit(c.delta, "delta");
  require_open_unit(c.confidence, "confidence");
  if (c.eps_t && *c.eps_t <= 0) throw ConfigError("eps_t: must be positive");
  if (c.eps_gamma && *c.eps_gamma <= 0) throw ConfigError("eps_gamma: must be positive");
  if (c.inputs) {
    for (char ch : *c.inputs) {
      if (ch != '0' && ch != '1') throw ConfigError("inputs: expected a 0/1 string");
    }
    if (c.n && static_cast<long long>(c.inputs->size()) != *c.n) throw ConfigError("inputs: length differs from n");
  }
}

}  // namespace lcba
