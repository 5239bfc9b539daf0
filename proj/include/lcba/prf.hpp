#pragma once

#include <cstdint>
#include <limits>

namespace lcba {

using Seed = std::uint64_t;

// Keys the counter-based generator.  Each purpose gets its own stream family
// so that, e.g., adversary draws never shift the honest coins.
enum class Purpose : std::uint64_t {
  setup = 1,
  coin = 2,
  adversary = 3,
  split = 4,
  trial = 5,
  estimation = 6,
  abort_set = 7,
  sampling = 8,
  builder = 9,
};

std::uint64_t mix64(std::uint64_t x);

std::uint64_t prf(Seed key, Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0,
                  std::uint64_t c = 0, std::uint64_t counter = 0);

Seed derive_seed(Seed key, Purpose purpose, std::uint64_t index);

class PrfStream {
 public:
  using result_type = std::uint64_t;

  PrfStream(Seed key, Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0)
      : key_(key), purpose_(purpose), a_(a), b_(b), c_(c) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next() { return prf(key_, purpose_, a_, b_, c_, counter_++); }
  // Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  bool fair_bit() { return (next() >> 63) != 0; }

 private:
  Seed key_;
  Purpose purpose_;
  std::uint64_t a_, b_, c_;
  std::uint64_t counter_ = 0;
};

}  // namespace lcba
