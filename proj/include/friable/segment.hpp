#pragma once

// Segmented factor passes over [lo, hi). Every integer in the window starts as
// its own cofactor; each base prime divides out its full power and reports
// (index, p, nu) to a visitor. Whatever cofactor survives is 1 or has only
// prime factors beyond the primes used.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "friable/common.hpp"

namespace friable {

// Segments never exceed kCountingCap + 1, so cofactors fit in 32 bits.
using Cofactors = std::vector<std::uint32_t>;

template <class Visit>
void divide_out_primes(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                       std::uint64_t prime_bound, Cofactors& rem, Visit&& visit) {
  rem.resize(hi - lo);
  for (std::uint64_t i = 0; i < hi - lo; ++i) rem[i] = static_cast<std::uint32_t>(lo + i);
  for (const std::uint32_t p : primes) {
    if (p > prime_bound) break;
    const std::uint64_t first = (lo + p - 1) / p * p;
    for (std::uint64_t m = first; m < hi; m += p) {
      std::uint32_t& r = rem[m - lo];
      std::uint32_t nu = 0;
      do {
        r /= p;
        ++nu;
      } while (r % p == 0);
      visit(m - lo, p, nu);
    }
  }
}

/// Flags n in [lo, hi) (lo >= 1) that are y-friable. `primes` must cover
/// every prime up to min(y, sqrt(hi - 1)).
inline void friable_flags(std::uint64_t lo, std::uint64_t hi, std::uint64_t y,
                          std::span<const std::uint32_t> primes, Cofactors& rem,
                          std::vector<std::uint8_t>& flags) {
  const std::uint64_t bound = std::min<std::uint64_t>(y, isqrt(hi - 1));
  divide_out_primes(lo, hi, primes, bound, rem, [](std::uint64_t, std::uint32_t, std::uint32_t) {});
  flags.resize(hi - lo);
  // After removing all primes <= bound the cofactor is 1, a prime above
  // sqrt(hi - 1), or (when y < sqrt) a product of primes above y.
  for (std::uint64_t i = 0; i < hi - lo; ++i) flags[i] = rem[i] <= y ? 1 : 0;
}

struct OmegaProfile {
  std::vector<std::uint8_t> omega;    // omega(n)
  std::vector<std::uint8_t> omega_y;  // omega(n, Y)
};

/// omega(n) and omega(n, Y) for n in [lo, hi), lo >= 1. `primes` must cover
/// sqrt(hi - 1).
inline void omega_profile(std::uint64_t lo, std::uint64_t hi, std::uint64_t cutoff_y,
                          std::span<const std::uint32_t> primes, Cofactors& rem,
                          OmegaProfile& out) {
  const std::uint64_t len = hi - lo;
  out.omega.assign(len, 0);
  out.omega_y.assign(len, 0);
  divide_out_primes(lo, hi, primes, isqrt(hi - 1), rem,
                    [&](std::uint64_t i, std::uint32_t p, std::uint32_t) {
                      ++out.omega[i];
                      if (p <= cutoff_y) ++out.omega_y[i];
                    });
  for (std::uint64_t i = 0; i < len; ++i) {
    if (rem[i] > 1) {
      ++out.omega[i];
      if (rem[i] <= cutoff_y) ++out.omega_y[i];
    }
  }
}

/// Number of kSegmentLength windows needed to cover [first, last].
inline std::uint64_t segment_count(std::uint64_t first, std::uint64_t last) {
  return last < first ? 0 : (last - first) / kSegmentLength + 1;
}

}  // namespace friable
