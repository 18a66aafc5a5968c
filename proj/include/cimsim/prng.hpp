#pragma once

#include <cstdint>
#include <string_view>

#include "cimsim/common.hpp"

namespace cimsim {

// All randomness in the project flows from a single run seed through named
// streams, so any module can be re-run in isolation with identical draws.
// The stream derivation is versioned: changing it invalidates recorded runs.
inline constexpr std::string_view kPrngVersion = "cimsim-prng-v1";

// splitmix64: small, fast, and statistically fine for synthetic data and
// seeded weights.
class Prng {
 public:
  explicit Prng(uint64_t state) : state_(state) {}

  static Prng stream(uint64_t seed, std::string_view name, uint64_t index = 0) {
    uint64_t h = fnv1a64(kPrngVersion);
    h = fnv1a64(name, h);
    h = fnv1a64(&seed, sizeof(seed), h);
    h = fnv1a64(&index, sizeof(index), h);
    return Prng(h);
  }

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  uint8_t next_u8() {
    return static_cast<uint8_t>(next() & 0xff);
  }

  // Uniform in [0, n). Modulo bias is irrelevant at the sizes used here.
  uint64_t next_below(uint64_t n) {
    return n == 0 ? 0 : next() % n;
  }

  bool next_bool(double p) {
    return next_double() < p;
  }

 private:
  uint64_t state_;
};

}  // namespace cimsim
