#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hesynth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed values, SSA violations, signature mismatches.
struct StructuralError : Error {
  using Error::Error;
};

// Bad files or configs.
struct ParseError : Error {
  using Error::Error;
};

constexpr bool is_power_of_two(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline bool is_prime(uint64_t x) {
  if (x < 2) return false;
  for (uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

// Plaintext-side ring parameters: n slots, residues mod a prime t.
// t is kept below 2^31 so slot arithmetic fits comfortably in uint32/uint64.
struct RingParams {
  int n = 16;
  uint32_t t = 65537;

  void validate() const {
    if (n < 2 || !is_power_of_two(static_cast<uint64_t>(n)))
      throw StructuralError("ring: n must be a power of two >= 2, got " + std::to_string(n));
    if (n > 4096)
      throw StructuralError("ring: n must be <= 4096, got " + std::to_string(n));
    if (t <= 2 || t >= (1u << 31) || !is_prime(t))
      throw StructuralError("ring: t must be a prime > 2, got " + std::to_string(t));
  }

  bool operator==(const RingParams&) const = default;
};

inline uint32_t mod_add(uint32_t a, uint32_t b, uint32_t t) {
  uint32_t s = a + b;
  return s >= t ? s - t : s;
}

inline uint32_t mod_sub(uint32_t a, uint32_t b, uint32_t t) {
  return a >= b ? a - b : a + t - b;
}

inline uint32_t mod_mul(uint32_t a, uint32_t b, uint32_t t) {
  return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % t);
}

inline uint32_t mod_neg(uint32_t a, uint32_t t) { return a == 0 ? 0 : t - a; }

inline uint32_t mod_pow(uint32_t base, uint64_t exp, uint32_t t) {
  uint64_t acc = 1, b = base % t;
  while (exp) {
    if (exp & 1) acc = acc * b % t;
    b = b * b % t;
    exp >>= 1;
  }
  return static_cast<uint32_t>(acc);
}

// Multiplicative inverse mod prime t; a must be nonzero.
inline uint32_t mod_inv(uint32_t a, uint32_t t) { return mod_pow(a, t - 2, t); }

// Normalize any integer rotation amount into a left rotation in [0, n).
inline int normalize_rotation(long long x, int n) {
  long long r = x % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

// Deterministic, platform-independent generator (splitmix64).
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) without modulo bias (Lemire rejection).
  uint64_t bounded(uint64_t bound) {
    if (bound == 0) return 0;
    while (true) {
      uint64_t x = next();
      __uint128_t m = static_cast<__uint128_t>(x) * bound;
      uint64_t lo = static_cast<uint64_t>(m);
      if (lo >= bound || lo >= (0 - bound) % bound) return static_cast<uint64_t>(m >> 64);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace hesynth
