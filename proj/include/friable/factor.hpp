#pragma once

// Smallest-prime-factor sieve, factorization and elementary multiplicative
// functions.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "friable/common.hpp"
#include "friable/executor.hpp"

namespace friable {

/// Primes p <= limit, in increasing order.
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  require(limit <= 4'000'000'000ULL, "primes_up_to: limit too large");
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  // Odd-only sieve: index i stands for 2i+1.
  const std::uint64_t half = (limit - 1) / 2 + 1;
  std::vector<std::uint8_t> composite(half, 0);
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t j = (p * p) / 2; j < half; j += p) composite[j] = 1;
  }
  primes.push_back(2);
  for (std::uint64_t i = 1; i < half; ++i)
    if (!composite[i]) primes.push_back(static_cast<std::uint32_t>(2 * i + 1));
  return primes;
}

struct PrimePower {
  std::uint64_t prime = 0;
  std::uint32_t exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization as (p, nu) pairs with strictly increasing p. Empty for 1.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::vector<PrimePower> pairs) : pairs_(std::move(pairs)) {}

  const std::vector<PrimePower>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  std::uint64_t value() const {
    std::uint64_t n = 1;
    for (const auto& [p, nu] : pairs_)
      for (std::uint32_t k = 0; k < nu; ++k) n *= p;
    return n;
  }

  /// P(n), with P(1) = 1.
  std::uint64_t largest_prime() const { return pairs_.empty() ? 1 : pairs_.back().prime; }

  void push(std::uint64_t p, std::uint32_t nu) { pairs_.push_back({p, nu}); }

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  std::vector<PrimePower> pairs_;
};

// Immutable smallest-prime-factor table on [0, limit]. Entries 0 and 1 hold 0.
// Memory is 4 bytes per integer; the limit is capped at kEnumerationCap (1e8,
// i.e. 400 MB). Counting beyond that uses the segmented passes in segment.hpp.
class FactorSieve {
 public:
  explicit FactorSieve(std::uint64_t limit, const Executor& exec = Executor::serial())
      : limit_(limit) {
    require(limit >= 2, "build_sieve: limit must be >= 2");
    require(limit <= kEnumerationCap, "build_sieve: limit exceeds the 1e8 memory bound");
    spf_.assign(limit + 1, 0);
    const auto base = primes_up_to(isqrt(limit));
    const std::uint64_t segments = (limit + 1 + kSegmentLength - 1) / kSegmentLength;
    exec.for_each_index(segments, [&](std::size_t s) {
      const std::uint64_t lo = std::max<std::uint64_t>(2, s * kSegmentLength);
      const std::uint64_t hi = std::min<std::uint64_t>(limit + 1, (s + 1) * kSegmentLength);
      if (lo >= hi) return;
      for (const std::uint64_t p : base) {
        if (p * p >= hi) break;
        std::uint64_t m = std::max(p * p, (lo + p - 1) / p * p);
        for (; m < hi; m += p)
          if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(p);
      }
      for (std::uint64_t n = lo; n < hi; ++n)
        if (spf_[n] == 0) spf_[n] = static_cast<std::uint32_t>(n);
    });
  }

  std::uint64_t limit() const { return limit_; }

  std::uint64_t smallest_prime_factor(std::uint64_t n) const {
    require(n >= 2 && n <= limit_, "smallest_prime_factor: n out of range");
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }

  Factorization factorize(std::uint64_t n) const {
    require(n >= 1 && n <= limit_, "factorize: n = " + std::to_string(n) + " outside [1, " +
                                       std::to_string(limit_) + "]");
    Factorization f;
    while (n > 1) {
      const std::uint32_t p = spf_[n];
      std::uint32_t nu = 0;
      do {
        n /= p;
        ++nu;
      } while (n % p == 0);
      f.push(p, nu);
    }
    return f;
  }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
};

inline FactorSieve build_sieve(std::uint64_t limit, const Executor& exec = Executor::serial()) {
  return FactorSieve(limit, exec);
}

/// Trial-division factorization for parameters (moduli, m in local laws) that
/// need not lie inside a sieve. Intended for n up to ~1e12.
inline Factorization factorize_trial(std::uint64_t n) {
  require(n >= 1, "factorize_trial: n must be >= 1");
  Factorization f;
  auto strip = [&](std::uint64_t p) {
    if (n % p != 0) return;
    std::uint32_t nu = 0;
    while (n % p == 0) {
      n /= p;
      ++nu;
    }
    f.push(p, nu);
  };
  strip(2);
  strip(3);
  for (std::uint64_t p = 5; p * p <= n; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (n > 1) f.push(n, 1);
  return f;
}

inline std::uint64_t largest_prime_factor(std::uint64_t n, const FactorSieve& sieve) {
  return sieve.factorize(n).largest_prime();
}

/// q_y: the largest y-friable divisor of n.
inline std::uint64_t friable_part(const Factorization& f, std::uint64_t y) {
  std::uint64_t q = 1;
  for (const auto& [p, nu] : f) {
    if (p > y) break;
    for (std::uint32_t k = 0; k < nu; ++k) q *= p;
  }
  return q;
}

inline std::uint64_t friable_part(std::uint64_t n, std::uint64_t y) {
  return friable_part(factorize_trial(n), y);
}

struct MultiplicativeValues {
  std::uint64_t phi = 1;
  int mu = 1;
  std::uint64_t tau = 1;
  unsigned omega = 0;

  friend bool operator==(const MultiplicativeValues&, const MultiplicativeValues&) = default;
};

inline MultiplicativeValues mult_functions(const Factorization& f) {
  MultiplicativeValues v;
  for (const auto& [p, nu] : f) {
    std::uint64_t pk = 1;
    for (std::uint32_t k = 1; k < nu; ++k) pk *= p;
    v.phi *= pk * (p - 1);
    v.mu = nu >= 2 ? 0 : -v.mu;
    v.tau *= nu + 1;
    ++v.omega;
  }
  return v;
}

inline MultiplicativeValues mult_functions(std::uint64_t n, const FactorSieve& sieve) {
  return mult_functions(sieve.factorize(n));
}

/// All divisors of n, ascending.
inline std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> ds{1};
  for (const auto& [p, nu] : f) {
    const std::size_t base = ds.size();
    std::uint64_t pk = 1;
    for (std::uint32_t k = 1; k <= nu; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

}  // namespace friable
