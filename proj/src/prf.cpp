#include "lcba/prf.hpp"

namespace lcba {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t prf(Seed key, Purpose purpose, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                  std::uint64_t counter) {
  std::uint64_t h = mix64(key ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x3c6ef372fe94f82bULL));
  h = mix64(h ^ (c + 0xa54ff53a5f1d36f1ULL));
  return mix64(h ^ counter);
}

Seed derive_seed(Seed key, Purpose purpose, std::uint64_t index) {
  return prf(key, purpose, index, 0, 0, 0xfeedULL);
}

std::uint64_t PrfStream::below(std::uint64_t bound) {
  // Rejection keeps the draw exactly uniform.
  std::uint64_t limit = max() - max() % bound;
  for (;;) {
    std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

}  // namespace lcba
