#pragma once

#include "lcba/rational.hpp"
#include "lcba/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcba {

// Flat `key = value` file, one entry per line, `#` starts a comment.
// Keys (in canonical order):
//   protocol phase_limit q stage regime n t sigma lambda delta eps_t eps_gamma
//   trials seed confidence out workers family k radius mode attack inputs
// Reals accept decimals or p/q fractions and are kept exact.
struct ExperimentConfig {
  std::optional<std::string> protocol;
  std::optional<long long> phase_limit;
  std::optional<long long> q;
  std::optional<std::string> stage;
  std::optional<std::string> regime;
  std::optional<long long> n;
  std::optional<long long> t;
  std::optional<Rational> sigma;
  std::optional<Rational> lambda;
  std::optional<Rational> delta;
  std::optional<Rational> eps_t;
  std::optional<Rational> eps_gamma;
  std::optional<long long> trials;
  std::optional<unsigned long long> seed;
  std::optional<Rational> confidence;
  std::optional<std::string> out;
  std::optional<long long> workers;
  std::optional<std::string> family;
  std::optional<long long> k;
  std::optional<long long> radius;
  std::optional<std::string> mode;
  std::optional<std::string> attack;
  std::optional<std::string> inputs;

  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& config_keys();

// Throws ConfigError("<origin>:<line>: ...") on unknown keys, duplicates,
// missing '=' or unparsable values.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::string& path);

// Set a single key from its textual value; used for flag overrides.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
std::optional<std::string> config_value(const ExperimentConfig& c, const std::string& key);

// Only set keys, canonical order.
std::string emit_config(const ExperimentConfig& c);

// Field-level checks shared by every subcommand; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& c);

}  // namespace lcba
