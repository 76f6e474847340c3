#pragma once

// Mean of f(n - 1) over friable n and its predicted main term
//   sum_q lambda(q) g_q(alpha) / phi(q)
// as a truncated series with a certified tail, and for multiplicative f as an
// Euler product with a certified prime tail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "friable/arith_spec.hpp"
#include "friable/common.hpp"
#include "friable/counting.hpp"
#include "friable/executor.hpp"
#include "friable/factor.hpp"
#include "friable/saddle.hpp"
#include "friable/segment.hpp"

namespace friable {

inline constexpr std::uint64_t kSeriesCap = 10'000'000;
inline constexpr std::uint64_t kDirectLambdaCap = 1'000'000;

struct EmpiricalMean {
  std::uint64_t x = 0, y = 0;
  std::uint64_t psi = 0;  // includes n = 1
  double sum = 0.0;       // sum of f(n - 1) over n in S*(x, y)
  double mean = 0.0;      // sum / psi
};

namespace detail {

// fn(m) for every m in [1, x - 1] with m + 1 friable, as (psi, compensated sum)
// per segment; `fill(mlo, mhi, vals)` writes f(m) for m in [mlo, mhi).
template <class Fill>
EmpiricalMean shifted_mean(std::uint64_t x, std::uint64_t y, const Executor& exec, Fill&& fill) {
  check_counting(x, y);
  require(x >= 2, "empirical_mean: x must be >= 2");
  require(x <= kEnumerationCap, "empirical_mean: x exceeds the enumeration cap 1e8");
  struct Part {
    std::uint64_t count = 0;
    CompensatedSum sum;
  };
  const auto primes = primes_up_to(isqrt(x));
  const auto parts = exec.map<Part>(segment_count(1, x), [&](std::size_t s) {
    const std::uint64_t lo = 1 + s * kSegmentLength;
    const std::uint64_t hi = std::min<std::uint64_t>(x + 1, lo + kSegmentLength);
    Cofactors rem;
    std::vector<std::uint8_t> flags;
    friable_flags(lo, hi, y, primes, rem, flags);
    Part part;
    part.count = static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
    // n in [lo, hi) maps to m = n - 1; n = 1 (m = 0) is excluded.
    const std::uint64_t first = lo == 1 ? 1 : 0;
    const std::uint64_t mlo = lo - 1 + first, mhi = hi - 1;
    if (mlo >= mhi) return part;
    std::vector<double> vals;
    fill(mlo, mhi, vals, rem);
    for (std::uint64_t i = first; i < hi - lo; ++i)
      if (flags[i]) part.sum.add(vals[i - first]);
    return part;
  });
  EmpiricalMean out;
  out.x = x;
  out.y = y;
  CompensatedSum total;
  for (const auto& p : parts) {
    out.psi += p.count;
    total.add(p.sum);
  }
  out.sum = total.value();
  out.mean = out.sum / static_cast<double>(out.psi);
  return out;
}

}  // namespace detail

/// R_f(x, y) = (1/Psi(x, y)) sum_{n in S*(x, y)} f(n - 1) for an arbitrary f.
inline EmpiricalMean empirical_mean(std::uint64_t x, std::uint64_t y,
                                    const std::function<double(std::uint64_t)>& f,
                                    const Executor& exec = Executor::serial()) {
  return detail::shifted_mean(x, y, exec,
                              [&](std::uint64_t mlo, std::uint64_t mhi, std::vector<double>& vals,
                                  Cofactors&) {
                                vals.resize(mhi - mlo);
                                for (std::uint64_t m = mlo; m < mhi; ++m) vals[m - mlo] = f(m);
                              });
}

/// R_f(x, y) for a spec; multiplicative specs factor n - 1 with a segmented pass.
inline EmpiricalMean empirical_mean(std::uint64_t x, std::uint64_t y,
                                    const ArithmeticFunctionSpec& spec,
                                    const Executor& exec = Executor::serial()) {
  spec.validate();
  if (!spec.multiplicative()) return empirical_mean(x, y, spec.direct_f, exec);
  const auto primes = primes_up_to(isqrt(x));
  return detail::shifted_mean(
      x, y, exec,
      [&](std::uint64_t mlo, std::uint64_t mhi, std::vector<double>& vals, Cofactors& rem) {
        vals.assign(mhi - mlo, 1.0);
        divide_out_primes(mlo, mhi, primes, isqrt(mhi - 1), rem,
                          [&](std::uint64_t i, std::uint32_t p, std::uint32_t nu) {
                            vals[i] *= spec.f_prime_power(p, nu);
                          });
        for (std::uint64_t i = 0; i < mhi - mlo; ++i)
          if (rem[i] > 1) vals[i] *= spec.f_prime_power(rem[i], 1);
      });
}

/// sum_{q <= limit} |lambda(q)| / q^(1 - beta), the spot-check of the budget B.
inline double budget_partial_sum(const ArithmeticFunctionSpec& spec, std::uint64_t limit = 100'000) {
  spec.validate();
  CompensatedSum s;
  if (spec.multiplicative()) {
    const auto sieve = build_sieve(std::max<std::uint64_t>(limit, 2));
    for (std::uint64_t q = 1; q <= limit; ++q)
      s.add(std::fabs(spec.lambda(sieve.factorize(q))) / std::pow(static_cast<double>(q), 1.0 - spec.beta));
  } else {
    require(limit <= kDirectLambdaCap, "budget_partial_sum: direct specs are capped at 1e6");
    const auto lam = lambda_table(spec.direct_f, limit);
    for (std::uint64_t q = 1; q <= limit; ++q)
      s.add(std::fabs(lam[q]) / std::pow(static_cast<double>(q), 1.0 - spec.beta));
  }
  return s.value();
}

inline bool passes_budget(const ArithmeticFunctionSpec& spec, std::uint64_t limit = 100'000) {
  return budget_partial_sum(spec, limit) <= spec.B;
}

/// Upper bound for sum_{p > P} p^-s, s > 1, from pi(t) < 1.25506 t / log t.
inline double prime_power_sum_tail(double P, double s) {
  require(s > 1.0 && P >= 2.0, "prime_power_sum_tail: need s > 1, P >= 2");
  return 1.25506 * s * std::pow(P, 1.0 - s) / ((s - 1.0) * std::log(P));
}

/// Upper bound for sup_{q > Q} q^(1 - beta) / phi(q), valid for Q >= max(16, e^(1/beta)),
/// from n/phi(n) < e^gamma log log n + 2.50637 / log log n.
inline double sup_q_power_over_phi(double Q, double beta) {
  require(Q >= 16.0 && std::log(Q) * beta >= 1.0, "sup_q_power_over_phi: Q too small for beta");
  const double ll = std::log(std::log(Q));
  return std::pow(Q, -beta) * (std::exp(std::numbers::egamma) * ll + 2.50637 / ll);
}

struct MainTermOptions {
  double target_tail = 1e-8;
  std::uint64_t cap = kSeriesCap;            // most terms of the series
  std::uint64_t euler_prime_limit = kSeriesCap;
  std::uint64_t fixed_terms = 0;             // nonzero: sum exactly this many terms
  double agreement = 1e-6;                   // certification threshold
};

struct MainTerm {
  std::string spec;
  double alpha = 0.0;
  double series = 0.0;
  std::uint64_t terms = 0;
  double series_tail = 0.0;  // bound on |sum_{q > terms}|
  std::string tail_method;   // "rankin", "budget", "none"
  bool cap_hit = false;
  bool has_euler = false;
  double euler = 0.0;
  std::uint64_t euler_prime_limit = 0;
  double euler_tail = 0.0;
  double gap = 0.0;       // |series - euler|
  bool agree = true;      // gap <= series_tail + euler_tail
  bool certified = true;  // both tails <= options.agreement and agree
};

namespace detail {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

struct RankinData {
  double sigma = 0.0;
  double m_upper = std::numeric_limits<double>::infinity();
};

// M(sigma) = prod_p (1 + sum_nu |lambda(p^nu)| p^(nu sigma) / phi(p^nu)) bounded above.
inline RankinData rankin_constant(const ArithmeticFunctionSpec& spec,
                                  const std::vector<std::uint32_t>& primes, double P) {
  for (const double sigma : {0.5, 0.25, 0.1}) {
    const double s = 1.0 - sigma;
    const auto far = spec.abs_lambda_tail(s, 1, P);
    if (!std::isfinite(far.K) || (far.K > 0.0 && far.E >= -1.0)) continue;
    double log_m = 0.0;
    for (const std::uint32_t p : primes) {
      const double pd = p, corr = pd / (pd - 1.0);
      double a = 0.0, rest = 0.0;
      for (std::uint32_t nu = 1; nu <= 200; ++nu) {
        a += std::fabs(spec.lambda_prime_power(p, nu)) * std::pow(pd, -s * nu);
        const auto r = spec.abs_lambda_tail(s, nu + 1, pd);
        rest = r.K == 0.0 ? 0.0 : r.K * std::pow(pd, r.E);
        if (rest <= 1e-18 * std::max(a, 1e-300)) break;
      }
      log_m += std::log1p(corr * (a + rest));
    }
    const double far_sum =
        far.K == 0.0 ? 0.0 : (P / (P - 1.0)) * far.K * prime_power_sum_tail(P, -far.E);
    RankinData d;
    d.sigma = sigma;
    d.m_upper = std::exp(log_m + far_sum) * (1.0 + 4.0 * kUlp * (primes.size() + 8));
    return d;
  }
  return {};
}

}  // namespace detail

/// Evaluates the main term at alpha. `sieve` must cover options.cap.
inline MainTerm predicted_main_term(const ArithmeticFunctionSpec& spec, double alpha,
                                    const FactorSieve& sieve, const MainTermOptions& opt = {}) {
  spec.validate();
  require(alpha > 0.0 && alpha <= 2.0, "predicted_main_term: alpha must lie in (0, 2]");
  require(opt.cap >= 1 && opt.cap <= kSeriesCap, "predicted_main_term: cap must lie in [1, 1e7]");
  require(opt.fixed_terms <= opt.cap, "predicted_main_term: fixed_terms above cap");
  MainTerm mt;
  mt.spec = spec.name;
  mt.alpha = alpha;
  const std::uint64_t cap = spec.multiplicative() ? opt.cap : std::min(opt.cap, kDirectLambdaCap);
  require(sieve.limit() >= cap, "predicted_main_term: sieve smaller than cap");

  auto local = [&](std::uint64_t p) { return -std::expm1(-alpha * std::log(static_cast<double>(p))); };
  CompensatedSum series;
  std::uint64_t Q = 0;

  if (spec.mode == SpecMode::kLambdaPrimePowers) {
    const auto primes = primes_up_to(opt.euler_prime_limit);
    const double P = static_cast<double>(opt.euler_prime_limit);
    const auto rk = detail::rankin_constant(spec, primes, P);
    // h(q) = lambda(q) g_q(alpha) / phi(q) and r(q) = |lambda(q)| / phi(q),
    // both multiplicative, built from q = rest * p^nu with p = spf(q).
    std::vector<double> h(cap + 1, 0.0), r(cap + 1, 0.0);
    h[1] = r[1] = 1.0;
    CompensatedSum rankin;
    auto bound_at = [&](std::uint64_t q) {
      return std::pow(static_cast<double>(q), -rk.sigma) * std::max(0.0, rk.m_upper - rankin.value());
    };
    for (std::uint64_t q = 1; q <= cap; ++q) {
      if (q > 1) {
        const std::uint64_t p = sieve.smallest_prime_factor(q);
        std::uint64_t rest = q, pk = 1;
        std::uint32_t nu = 0;
        while (rest % p == 0) {
          rest /= p;
          pk *= p;
          ++nu;
        }
        if (rest > 1) {
          h[q] = h[rest] * h[pk];
          r[q] = r[rest] * r[pk];
        } else {
          const double phi = static_cast<double>(pk / p) * static_cast<double>(p - 1);
          const double lam = spec.lambda_prime_power(p, nu);
          h[q] = lam * local(p) / phi;
          r[q] = std::fabs(lam) / phi;
        }
      }
      series.add(h[q]);
      if (rk.sigma > 0.0 && r[q] != 0.0)
        rankin.add(r[q] * std::pow(static_cast<double>(q), rk.sigma));
      Q = q;
      if (opt.fixed_terms != 0) {
        if (q == opt.fixed_terms) break;
      } else if (rk.sigma > 0.0 && bound_at(q) < opt.target_tail) {
        break;
      }
    }
    mt.series_tail = rk.sigma > 0.0 ? bound_at(Q) : std::numeric_limits<double>::infinity();
    mt.tail_method = rk.sigma > 0.0 ? "rankin" : "none";

    // Euler product over p <= P with a certified tail.
    mt.has_euler = true;
    mt.euler_prime_limit = opt.euler_prime_limit;
    double log_abs = 0.0, rel = 0.0;
    int sign = 1;
    bool zero = false;
    for (const std::uint32_t p : primes) {
      const double pd = p;
      const double w = local(p) / (1.0 - 1.0 / pd);
      double a = 0.0, rest = 0.0;
      for (std::uint32_t nu = 1; nu <= 200; ++nu) {
        a += spec.lambda_prime_power(p, nu) * std::pow(pd, -static_cast<double>(nu));
        const auto b = spec.abs_lambda_tail(1.0, nu + 1, pd);
        rest = b.K == 0.0 ? 0.0 : (std::isfinite(b.K) ? b.K * std::pow(pd, b.E) : b.K);
        if (rest <= 1e-18 * std::max(std::fabs(a), 1e-300)) break;
      }
      const double factor = 1.0 + w * a;
      if (factor == 0.0) {
        zero = true;
        continue;
      }
      if (factor < 0.0) sign = -sign;
      log_abs += std::log(std::fabs(factor));
      rel += std::fabs(w) * rest / std::fabs(factor);
    }
    const auto far = spec.abs_lambda_tail(1.0, 1, P);
    double far_sum = 0.0;
    if (far.K > 0.0)
      far_sum = (std::isfinite(far.K) && far.E < -1.0)
                    ? (P / (P - 1.0)) * far.K * prime_power_sum_tail(P, -far.E)
                    : std::numeric_limits<double>::infinity();
    mt.euler = zero ? 0.0 : sign * std::exp(log_abs);
    rel += far_sum + 4.0 * detail::kUlp * (primes.size() + 8);
    mt.euler_tail = zero ? 0.0 : std::fabs(mt.euler) * std::expm1(rel);
  } else {
    // No prime-power bounds: the tail rests on the budget (B, beta).
    std::vector<double> lam;
    if (spec.mode == SpecMode::kDirectF) lam = lambda_table(spec.direct_f, cap);
    const double beta = spec.beta;
    const double q_min = std::max(16.0, std::ceil(std::exp(1.0 / beta)));
    CompensatedSum budget;
    double tail = std::numeric_limits<double>::infinity();
    for (std::uint64_t q = 1; q <= cap; ++q) {
      const auto fq = sieve.factorize(q);
      const double l = spec.mode == SpecMode::kDirectF ? lam[q] : spec.lambda(fq);
      if (l != 0.0) {
        const double phi = static_cast<double>(mult_functions(fq).phi);
        series.add(l * g_q(fq, alpha) / phi);
        budget.add(std::fabs(l) / std::pow(static_cast<double>(q), 1.0 - beta));
      }
      Q = q;
      if (static_cast<double>(q) >= q_min) {
        const double left = spec.B - budget.value();
        tail = left < 0.0 ? std::numeric_limits<double>::infinity()
                          : sup_q_power_over_phi(static_cast<double>(q), beta) * left;
      }
      if (opt.fixed_terms != 0 ? q == opt.fixed_terms : tail < opt.target_tail) break;
    }
    mt.series_tail = tail;
    mt.tail_method = "budget";
    if (spec.mode == SpecMode::kMultiplicativeF) {
      mt.has_euler = true;
      mt.euler_prime_limit = opt.euler_prime_limit;
      double prod = 1.0;
      for (const std::uint32_t p : primes_up_to(opt.euler_prime_limit)) {
        const double pd = p;
        double a = 0.0, pp = 1.0;
        for (std::uint32_t nu = 1; nu <= 60 && pp < 1e18; ++nu) {
          pp *= pd;
          a += spec.lambda_prime_power(p, nu) / pp;
        }
        prod *= 1.0 + local(p) / (1.0 - 1.0 / pd) * a;
      }
      mt.euler = prod;
      mt.euler_tail = std::numeric_limits<double>::infinity();  // no certificate
    }
  }

  mt.series = series.value();
  mt.terms = Q;
  mt.cap_hit = opt.fixed_terms == 0 && Q == cap && !(mt.series_tail < opt.target_tail);
  if (mt.has_euler) {
    mt.gap = std::fabs(mt.series - mt.euler);
    mt.agree = mt.gap <= mt.series_tail + mt.euler_tail + 1e-12;
  }
  mt.certified = mt.agree && mt.series_tail <= opt.agreement &&
                 (!mt.has_euler || mt.euler_tail <= opt.agreement);
  return mt;
}

inline MainTerm predicted_main_term(const ArithmeticFunctionSpec& spec, double alpha,
                                    const MainTermOptions& opt = {}) {
  const auto sieve = build_sieve(std::max<std::uint64_t>(opt.cap, 2));
  return predicted_main_term(spec, alpha, sieve, opt);
}

/// Q = ceil((x (log x)^2 / Psi(x, y))^(1/beta)).
inline std::uint64_t truncation_Q(double x, std::uint64_t psi_xy, double beta) {
  require(x >= 2.0 && psi_xy >= 1, "truncation_Q: need x >= 2, Psi >= 1");
  require(beta > 0.0 && beta <= 1.0, "truncation_Q: beta must lie in (0, 1]");
  const double lx = std::log(x);
  const double v = std::pow(x * lx * lx / static_cast<double>(psi_xy), 1.0 / beta);
  require(v < 1.8e19, "truncation_Q: value exceeds 64 bits");
  return static_cast<std::uint64_t>(std::ceil(v));
}

inline std::uint64_t truncation_Q(std::uint64_t x, std::uint64_t y, double beta,
                                  const Executor& exec = Executor::serial()) {
  return truncation_Q(static_cast<double>(x), psi(x, y, exec), beta);
}

struct MeanValueReport {
  std::string spec;
  std::uint64_t x = 0, y = 0;
  double u = 0.0;
  double alpha = 0.0;
  std::uint64_t psi = 0;
  double empirical = 0.0;
  MainTerm at_alpha;
  MainTerm at_one;
  std::uint64_t truncation_Q = 0;  // the paper's Q at this (x, y, beta)
  double budget = 0.0;             // min{1/u, log(u + 1)/log y}
  double observed_gap = 0.0;       // |empirical - at_alpha.series|
  double alpha_vs_one_gap = 0.0;   // |at_alpha.series - at_one.series|
  double log_u1_over_log_y = 0.0;
  double regime_c = 3.0;
  bool in_regime = false;  // (log x)^c <= y
};

struct ReportOptions {
  double regime_c = 3.0;
  MainTermOptions main_term;
};

/// Empirical mean, main term at alpha(x, y) and at 1, and the error budget.
inline MeanValueReport theorem1_report(std::uint64_t x, std::uint64_t y,
                                       const ArithmeticFunctionSpec& spec,
                                       const Executor& exec = Executor::serial(),
                                       const ReportOptions& opt = {}, const FactorSieve* sieve = nullptr) {
  require(x >= 3, "theorem1_report: x must be >= 3");
  require(opt.regime_c > 0.0, "theorem1_report: c must be > 0");
  MeanValueReport r;
  r.spec = spec.name;
  r.x = x;
  r.y = y;
  const auto emp = empirical_mean(x, y, spec, exec);
  r.psi = emp.psi;
  r.empirical = emp.mean;
  const double lx = std::log(static_cast<double>(x)), ly = std::log(static_cast<double>(y));
  r.u = lx / ly;
  r.alpha = solve_alpha(static_cast<double>(x), y).alpha;
  std::optional<FactorSieve> own;
  if (sieve == nullptr) sieve = &own.emplace(std::max<std::uint64_t>(opt.main_term.cap, 2), exec);
  r.at_alpha = predicted_main_term(spec, std::min(r.alpha, 2.0), *sieve, opt.main_term);
  r.at_one = predicted_main_term(spec, 1.0, *sieve, opt.main_term);
  r.truncation_Q = truncation_Q(static_cast<double>(x), r.psi, spec.beta);
  r.log_u1_over_log_y = std::log(r.u + 1.0) / ly;
  r.budget = std::min(1.0 / r.u, r.log_u1_over_log_y);
  r.observed_gap = std::fabs(r.empirical - r.at_alpha.series);
  r.alpha_vs_one_gap = std::fabs(r.at_alpha.series - r.at_one.series);
  r.regime_c = opt.regime_c;
  r.in_regime = std::pow(lx, opt.regime_c) <= static_cast<double>(y);
  return r;
}

/// lambda of a multiplicative spec as a discrepancy weight; negative values are
/// rejected when the weight is evaluated.
inline NamedWeight lambda_weight(const ArithmeticFunctionSpec& spec) {
  require(spec.multiplicative(), "lambda_weight: spec must be multiplicative");
  return {spec.name, [spec](std::uint64_t q) { return spec.lambda(factorize_trial(q)); }};
}

}  // namespace friable
