#pragma once

// The saddle point alpha(x, y): the positive root of
//   sum_{p <= y} log p / (p^alpha - 1) = log x,
// and the local densities g_q(beta) = prod_{p | q} (1 - p^-beta).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "friable/common.hpp"
#include "friable/factor.hpp"

namespace friable {

struct SaddlePoint {
  double log_x = 0.0;
  std::uint64_t y = 0;
  double alpha = 0.0;
  double residual = 0.0;  // |F(alpha)|, F = sum - log x
  std::uint64_t primes_used = 0;
};

enum class SaddleMethod { kBisection, kBisectionNewton };

// Holds log p for p <= y so repeated solves at one y share the prime table.
class SaddleSolver {
 public:
  explicit SaddleSolver(std::uint64_t y) : y_(y) {
    require(y >= 2, "solve_alpha: y must be >= 2");
    require(y <= 4'000'000'000ULL, "solve_alpha: y too large to sieve");
    for (const std::uint32_t p : primes_up_to(y)) log_p_.push_back(std::log(static_cast<double>(p)));
  }

  std::uint64_t y() const { return y_; }
  std::size_t prime_count() const { return log_p_.size(); }

  /// sum_{p <= y} log p / (p^alpha - 1), compensated.
  double prime_sum(double alpha) const {
    CompensatedSum s;
    for (const double l : log_p_) s.add(l / std::expm1(alpha * l));
    return s.value();
  }

  /// d/d alpha of prime_sum.
  double prime_sum_derivative(double alpha) const {
    CompensatedSum s;
    for (const double l : log_p_) {
      const double e = std::expm1(alpha * l);
      s.add(-l * l * (e + 1.0) / (e * e));
    }
    return s.value();
  }

  SaddlePoint solve(double log_x, double tol = 1e-12,
                    SaddleMethod method = SaddleMethod::kBisectionNewton) const {
    require(log_x >= std::log(3.0), "solve_alpha: x must be >= 3");
    require(tol > 0.0, "solve_alpha: tol must be > 0");
    auto F = [&](double a) { return prime_sum(a) - log_x; };

    // F decreases strictly from +inf (alpha -> 0+) to -log x (alpha -> inf).
    double lo = 1.0, hi = 1.0;
    if (F(1.0) > 0.0) {
      do hi *= 2.0;
      while (F(hi) > 0.0);
      lo = hi / 2.0;
    } else {
      do lo /= 2.0;
      while (F(lo) <= 0.0);
      hi = lo * 2.0;
    }

    const double target = tol * log_x;
    double alpha = 0.5 * (lo + hi);
    if (method == SaddleMethod::kBisection) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (F(mid) > 0.0 ? lo : hi) = mid;
      }
      alpha = 0.5 * (lo + hi);
    } else {
      // Coarse bisection, then safeguarded Newton.
      for (int it = 0; it < 30 && (hi - lo) > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) > 0.0 ? lo : hi) = mid;
      }
      alpha = 0.5 * (lo + hi);
      for (int it = 0; it < 100; ++it) {
        const double f = F(alpha);
        if (f > 0.0) lo = alpha; else hi = alpha;
        const double step = f / prime_sum_derivative(alpha);
        double next = alpha - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == alpha) break;
        const bool tiny = std::fabs(next - alpha) <= 4e-16 * alpha;
        alpha = next;
        if (tiny && std::fabs(F(alpha)) <= target) break;
      }
    }

    SaddlePoint sp;
    sp.log_x = log_x;
    sp.y = y_;
    sp.alpha = alpha;
    sp.residual = std::fabs(F(alpha));
    sp.primes_used = log_p_.size();
    return sp;
  }

 private:
  std::uint64_t y_;
  std::vector<double> log_p_;
};

inline SaddlePoint solve_alpha(double x, std::uint64_t y, double tol = 1e-12,
                               SaddleMethod method = SaddleMethod::kBisectionNewton) {
  require(x >= 3.0, "solve_alpha: x must be >= 3");
  return SaddleSolver(y).solve(std::log(x), tol, method);
}

/// g_q(beta) = prod_{p | q} (1 - p^-beta).
inline double g_q(const Factorization& q, double beta) {
  double g = 1.0;
  for (const auto& [p, nu] : q) g *= -std::expm1(-beta * std::log(static_cast<double>(p)));
  return g;
}

inline double g_q(std::uint64_t q, double beta) {
  require(q >= 1, "g_q: q must be >= 1");
  require(beta >= 0.0 && beta <= 2.0, "g_q: beta must lie in [0, 2]");
  return g_q(factorize_trial(q), beta);
}

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational reduced(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

/// g_q(1) = prod_{p | q} (p - 1)/p as a reduced fraction.
inline Rational g_q_at_one_exact(std::uint64_t q) {
  require(q >= 1, "g_q: q must be >= 1");
  Rational r{1, 1};
  for (const auto& [p, nu] : factorize_trial(q)) r = reduced(r.num * (p - 1), r.den * p);
  return r;
}

struct AlphaGap {
  double one_minus_alpha = 0.0;
  double log_u1_over_log_y = 0.0;  // log(u + 1) / log y
  double ratio = 0.0;
  bool in_regime = false;  // (log x)^2 <= y
  SaddlePoint saddle;
};

/// Compares 1 - alpha with log(u + 1)/log y. Purely a diagnostic; outside
/// (log x)^2 <= y the flag is cleared but the numbers are still reported.
inline AlphaGap alpha_gap_diagnostic(double x, std::uint64_t y, double tol = 1e-12) {
  AlphaGap g;
  g.saddle = solve_alpha(x, y, tol);
  const double lx = std::log(x), ly = std::log(static_cast<double>(y));
  const double u = lx / ly;
  g.one_minus_alpha = 1.0 - g.saddle.alpha;
  g.log_u1_over_log_y = std::log(u + 1.0) / ly;
  g.ratio = g.one_minus_alpha / g.log_u1_over_log_y;
  g.in_regime = lx * lx <= static_cast<double>(y);
  return g;
}

}  // namespace friable
