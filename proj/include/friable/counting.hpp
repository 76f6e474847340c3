#pragma once

// Exact counts of y-friable integers: Psi(x,y), the coprime count Psi_q(x,y),
// counts in residue classes Psi(x,y;a,q) and the discrepancy sums built on them.
// All counts include n = 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "friable/common.hpp"
#include "friable/executor.hpp"
#include "friable/factor.hpp"
#include "friable/segment.hpp"

namespace friable {

namespace detail {

inline void check_counting(std::uint64_t x, std::uint64_t y) {
  require(y >= 2, "y must be >= 2");
  require(x <= kCountingCap, "x = " + std::to_string(x) + " exceeds the counting cap 1e9");
}

// Runs fn(lo, hi, flags) over [1, x] in fixed windows; returns per-window results.
template <class T, class Fn>
std::vector<T> map_friable_segments(std::uint64_t x, std::uint64_t y, const Executor& exec,
                                    Fn&& fn) {
  if (x == 0) return {};
  const auto primes = primes_up_to(std::min<std::uint64_t>(y, isqrt(x)));
  const std::uint64_t segments = segment_count(1, x);
  return exec.map<T>(segments, [&](std::size_t s) {
    const std::uint64_t lo = 1 + s * kSegmentLength;
    const std::uint64_t hi = std::min<std::uint64_t>(x + 1, lo + kSegmentLength);
    Cofactors rem;
    std::vector<std::uint8_t> flags;
    friable_flags(lo, hi, y, primes, rem, flags);
    return fn(lo, hi, flags);
  });
}

}  // namespace detail

/// Calls fn(n) for every n <= x with P(n) <= y, in increasing order, starting at 1.
template <class Fn>
void for_each_friable(std::uint64_t x, std::uint64_t y, Fn&& fn) {
  detail::check_counting(x, y);
  if (x == 0) return;
  const auto primes = primes_up_to(std::min<std::uint64_t>(y, isqrt(x)));
  Cofactors rem;
  std::vector<std::uint8_t> flags;
  for (std::uint64_t lo = 1; lo <= x; lo += kSegmentLength) {
    const std::uint64_t hi = std::min<std::uint64_t>(x + 1, lo + kSegmentLength);
    friable_flags(lo, hi, y, primes, rem, flags);
    for (std::uint64_t i = 0; i < hi - lo; ++i)
      if (flags[i]) fn(lo + i);
  }
}

/// Materializes S(x,y) in increasing order. x is capped at kEnumerationCap.
inline std::vector<std::uint32_t> enumerate_friable(std::uint64_t x, std::uint64_t y,
                                                    const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  require(x <= kEnumerationCap, "enumerate_friable: x exceeds the enumeration cap 1e8");
  auto parts = detail::map_friable_segments<std::vector<std::uint32_t>>(
      x, y, exec, [](std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint8_t>& flags) {
        std::vector<std::uint32_t> out;
        for (std::uint64_t i = 0; i < hi - lo; ++i)
          if (flags[i]) out.push_back(static_cast<std::uint32_t>(lo + i));
        return out;
      });
  std::vector<std::uint32_t> all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

/// Psi(x, y) by a segmented cofactor pass.
inline std::uint64_t psi(std::uint64_t x, std::uint64_t y, const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  if (y >= x) return x;
  const auto counts = detail::map_friable_segments<std::uint64_t>(
      x, y, exec, [](std::uint64_t, std::uint64_t, const std::vector<std::uint8_t>& flags) {
        return static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
      });
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

/// Psi_q(x, y): friable n <= x with (n, q) = 1. Only q_y matters.
inline std::uint64_t psi_coprime(std::uint64_t x, std::uint64_t y, std::uint64_t q,
                                 const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  require(q >= 1, "psi_coprime: q must be >= 1");
  std::vector<std::uint64_t> bad;
  for (const auto& [p, nu] : factorize_trial(q))
    if (p <= y) bad.push_back(p);
  const auto counts = detail::map_friable_segments<std::uint64_t>(
      x, y, exec, [&](std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t> flags) {
        for (const std::uint64_t p : bad)
          for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) flags[m - lo] = 0;
        return static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
      });
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

/// Psi(x, y; a, q), counted directly. a is reduced mod q first.
inline std::uint64_t psi_progression(std::uint64_t x, std::uint64_t y, std::int64_t a,
                                     std::uint64_t q, const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  require(q >= 1, "psi_progression: q must be >= 1");
  const std::uint64_t r = mod_normalize(a, q);
  const auto counts = detail::map_friable_segments<std::uint64_t>(
      x, y, exec, [&](std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint8_t>& flags) {
        std::uint64_t c = 0;
        std::uint64_t n = lo + (r + q - lo % q) % q;
        for (; n < hi; n += q) c += flags[n - lo];
        return c;
      });
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

/// Psi(x, y; a, q) for every a in [0, q).
inline std::vector<std::uint64_t> residue_counts(std::uint64_t x, std::uint64_t y, std::uint64_t q,
                                                 const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  require(q >= 1 && q <= 100'000'000ULL, "residue_counts: q out of range");
  const auto parts = detail::map_friable_segments<std::vector<std::uint64_t>>(
      x, y, exec, [&](std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint8_t>& flags) {
        std::vector<std::uint64_t> h(q, 0);
        std::uint64_t r = lo % q;
        for (std::uint64_t i = 0; i < hi - lo; ++i) {
          h[r] += flags[i];
          if (++r == q) r = 0;
        }
        return h;
      });
  std::vector<std::uint64_t> total(q, 0);
  for (const auto& h : parts)
    for (std::uint64_t a = 0; a < q; ++a) total[a] += h[a];
  return total;
}

/// Psi(x, y; a, q) through the gcd reduction: zero when d = (a, q) is not
/// y-friable, otherwise Psi(x/d, y; a/d, q/d). Used as a cross-check.
inline std::uint64_t psi_progression_reduced(std::uint64_t x, std::uint64_t y, std::int64_t a,
                                             std::uint64_t q,
                                             const Executor& exec = Executor::serial()) {
  require(q >= 1, "psi_progression_reduced: q must be >= 1");
  const std::uint64_t r = mod_normalize(a, q);
  const std::uint64_t d = std::gcd(r, q);  // gcd(0, q) = q
  if (factorize_trial(d).largest_prime() > y) return 0;
  return psi_progression(x / d, y, static_cast<std::int64_t>(r / d), q / d, exec);
}

/// A nonnegative weight on moduli, e.g. lambda(q) = tau(q)^3.
struct NamedWeight {
  std::string name;
  std::function<double(std::uint64_t)> fn;
};

inline NamedWeight unit_weight() {
  return {"one", [](std::uint64_t) { return 1.0; }};
}

inline NamedWeight tau_cubed_weight() {
  return {"tau3", [](std::uint64_t q) {
            const double t = static_cast<double>(mult_functions(factorize_trial(q)).tau);
            return t * t * t;
          }};
}

struct DiscrepancyRow {
  std::uint64_t q = 0;
  std::uint64_t psi_one_mod_q = 0;  // Psi(x, y; 1, q)
  std::uint64_t psi_coprime = 0;    // Psi_q(x, y)
  double expected = 0.0;            // Psi_q(x, y) / phi(q)
  double abs_gap = 0.0;             // |Psi(x,y;1,q) - expected|
  double max_gap = 0.0;             // max over (a, q) = 1
  double weight = 1.0;

  friend bool operator==(const DiscrepancyRow&, const DiscrepancyRow&) = default;
};

struct DiscrepancyReport {
  std::uint64_t x = 0, y = 0, Q = 0;
  std::uint64_t psi = 0;
  std::string weight_name = "one";
  std::vector<DiscrepancyRow> rows;
  double delta = 0.0;           // sum of abs_gap
  double weighted_total = 0.0;  // sum of weight * max_gap

  friend bool operator==(const DiscrepancyReport&, const DiscrepancyReport&) = default;
};

/// Delta(x, y; Q) together with the max-over-a weighted sum. Every class
/// coprime to q is scanned, so the max is exact.
inline DiscrepancyReport discrepancy(std::uint64_t x, std::uint64_t y, std::uint64_t Q,
                                     const NamedWeight& weight = unit_weight(),
                                     const Executor& exec = Executor::serial()) {
  require(Q >= 1, "discrepancy: Q must be >= 1");
  require(Q <= 1'000'000, "discrepancy: Q above 1e6 is not supported");
  const auto set = enumerate_friable(x, y, exec);
  DiscrepancyReport rep;
  rep.x = x;
  rep.y = y;
  rep.Q = Q;
  rep.psi = set.size();
  rep.weight_name = weight.name;
  std::vector<double> weights(Q);
  for (std::uint64_t q = 1; q <= Q; ++q) {
    weights[q - 1] = weight.fn(q);
    require(weights[q - 1] >= 0.0,
            "weight '" + weight.name + "' is negative at q = " + std::to_string(q));
  }
  rep.rows = exec.map<DiscrepancyRow>(Q, [&](std::size_t idx) {
    const std::uint64_t q = idx + 1;
    std::vector<std::uint64_t> hist(q, 0);
    for (const std::uint32_t n : set) ++hist[n % q];
    DiscrepancyRow row;
    row.q = q;
    row.weight = weights[idx];
    row.psi_one_mod_q = hist[1 % q];
    const auto phi = mult_functions(factorize_trial(q)).phi;
    for (std::uint64_t a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1) row.psi_coprime += hist[a];
    row.expected = static_cast<double>(row.psi_coprime) / static_cast<double>(phi);
    row.abs_gap = std::fabs(static_cast<double>(row.psi_one_mod_q) - row.expected);
    for (std::uint64_t a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1)
        row.max_gap = std::max(row.max_gap, std::fabs(static_cast<double>(hist[a]) - row.expected));
    return row;
  });
  CompensatedSum delta, weighted;
  for (const auto& row : rep.rows) {
    delta.add(row.abs_gap);
    weighted.add(row.weight * row.max_gap);
  }
  rep.delta = delta.value();
  rep.weighted_total = weighted.value();
  return rep;
}

/// sum_{q <= Q} lambda(q) max_{(a,q)=1} |Psi(x,y;a,q) - Psi_q(x,y)/phi(q)|.
inline double weighted_discrepancy(std::uint64_t x, std::uint64_t y, std::uint64_t Q,
                                   const NamedWeight& weight,
                                   const Executor& exec = Executor::serial()) {
  return discrepancy(x, y, Q, weight, exec).weighted_total;
}

/// H(u) = exp{u / log(u + 2)^2}.
inline double H_of_u(double u) {
  require(u >= 0.0, "H_of_u: u must be >= 0");
  const double l = std::log(u + 2.0);
  return std::exp(u / (l * l));
}

/// exp{(log log x)^(5/3 + eps)}, the lower end of the (H_eps) range.
inline double h_epsilon_lower(double log_x, double eps) {
  return std::exp(std::pow(std::log(log_x), 5.0 / 3.0 + eps));
}

/// 2 <= exp{(log_2 x)^(5/3+eps)} <= y <= x.
inline bool in_H_epsilon(double x, double y, double eps) {
  require(x >= 16.0, "in_H_epsilon: x must be >= 16");
  require(eps > 0.0, "in_H_epsilon: eps must be > 0");
  const double lower = h_epsilon_lower(std::log(x), eps);
  return 2.0 <= lower && lower <= y && y <= x;
}

/// Smallest log x on a geometric grid (ratio 1 + 1e-4, from log 16 up to
/// log_x_max) past which every grid point satisfies (x, x) in (H_eps).
/// Returns log_x_max when the diagonal still fails at the end of the grid.
inline double h_epsilon_diagonal_log_threshold(double eps, double log_x_max = 1e6) {
  require(eps > 0.0, "h_epsilon_diagonal_threshold: eps must be > 0");
  const double s = 5.0 / 3.0 + eps;
  double threshold = std::log(16.0);
  for (double t = std::log(16.0); t <= log_x_max; t *= 1.0001) {
    // Compare in log space: lower <= x  <=>  (log t)^s <= t.
    const double e = std::pow(std::log(t), s);
    const bool ok = e >= std::log(2.0) && e <= t;
    if (!ok) threshold = t * 1.0001;
  }
  return threshold;
}

}  // namespace friable
