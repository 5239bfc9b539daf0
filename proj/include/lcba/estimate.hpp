#pragma once

#include <cstddef>
#include <cstdint>

namespace lcba {

inline constexpr double kDefaultConfidence = 0.99;

// Two-sided Hoeffding radius for a mean of `trials` values in [0, 1].
double hoeffding_radius(std::size_t trials, double confidence = kDefaultConfidence);

struct Estimate {
  double point = 0;
  std::size_t trials = 0;
  double ci_radius = 0;
  double confidence = kDefaultConfidence;

  double lo() const { return point - ci_radius < 0 ? 0 : point - ci_radius; }
  double hi() const { return point + ci_radius > 1 ? 1 : point + ci_radius; }
  bool covers(double x) const { return x >= point - ci_radius && x <= point + ci_radius; }
};

Estimate make_estimate(std::uint64_t hits, std::size_t trials, double confidence = kDefaultConfidence);

}  // namespace lcba
