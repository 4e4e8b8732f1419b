#pragma once

#include <cstdint>

#include "slp/common.hpp"

namespace slp {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b,
                                std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp,
                                std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Deterministic Miller-Rabin for the full 64-bit range. The witness set
/// {2,3,5,7,11,13,17,19,23,29,31,37} is known to be exact below 3.3e24.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Random-prime configuration for the coefficient-mod-p and evaluation-based
/// randomized procedures. Integers are drawn uniformly from
/// [2, 2^min(c_const*n, bit_cap)) where n is the size of the circuit under
/// test; the per-trial error analysis needs "c large enough", so c_const is a
/// documented soundness/efficiency dial rather than a proven constant. The
/// 62-bit cap keeps primality certification deterministic in 64 bits and
/// modular products safe in 128.
struct PrimeSampler {
  unsigned c_const = 3;
  unsigned bit_cap = 62;
  std::uint64_t seed = 0;

  unsigned bits_for(std::size_t circuit_size) const {
    std::uint64_t b = static_cast<std::uint64_t>(c_const) * circuit_size;
    if (b > bit_cap) b = bit_cap;
    if (b < 2) b = 2;
    return static_cast<unsigned>(b);
  }

  /// Uniform integer in [2, 2^bits). Composites are kept; the caller decides
  /// what a composite draw means for its trial.
  std::uint64_t draw_integer(Rng& rng, unsigned bits) const {
    const std::uint64_t span = (bits >= 64 ? ~0ULL : (1ULL << bits)) - 2;
    return 2 + rng.below(span);
  }

  /// Rejection-samples a certified prime in [max(lo,2), 2^bits).
  std::uint64_t draw_prime(Rng& rng, unsigned bits,
                           std::uint64_t lo = 2) const {
    const std::uint64_t hi = (bits >= 64 ? ~0ULL : (1ULL << bits));
    if (lo < 2) lo = 2;
    for (;;) {
      std::uint64_t v = lo + rng.below(hi - lo);
      if (is_prime_u64(v)) return v;
    }
  }
};

}  // namespace slp
