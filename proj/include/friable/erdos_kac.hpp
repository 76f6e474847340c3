#pragma once

// Distribution of omega(n - 1) over friable n against the Gaussian, and the
// objects around it: omega truncated at Y, the characteristic-function gap
// R(theta), a Berry-Esseen style diagnostic and Landreau's divisor check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "friable/common.hpp"
#include "friable/counting.hpp"
#include "friable/executor.hpp"
#include "friable/factor.hpp"
#include "friable/segment.hpp"

namespace friable {

/// Phi(t) = P(N(0,1) <= t).
inline double gaussian_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

struct EkConfig {
  std::uint64_t x = 0, y = 0;
  double c_Y = 2.0;
  double Y = 0.0;   // exp(log x / (log log x)^c_Y) unless overridden
  double xi = 0.0;  // log log Y

  /// Y from c_Y; pass Y_override > 0 to fix Y directly.
  static EkConfig make(std::uint64_t x, std::uint64_t y, double c_Y = 2.0, double Y_override = 0.0) {
    require(x >= 16, "erdos-kac: x must be >= 16");
    require(y >= 2, "erdos-kac: y must be >= 2");
    require(c_Y > 0.0, "erdos-kac: c_Y must be > 0");
    EkConfig c;
    c.x = x;
    c.y = y;
    c.c_Y = c_Y;
    const double lx = std::log(static_cast<double>(x));
    c.Y = Y_override > 0.0 ? Y_override : std::exp(lx / std::pow(std::log(lx), c_Y));
    require(c.Y >= 2.0 && c.Y <= static_cast<double>(x) * (1.0 + 1e-15),
            "erdos-kac: Y = " + std::to_string(c.Y) + " must lie in [2, x]");
    c.xi = std::log(std::log(c.Y));
    require(c.xi > 0.0, "erdos-kac: xi = log log Y must be > 0 (Y > e)");
    return c;
  }

  std::uint64_t cutoff() const { return static_cast<std::uint64_t>(std::floor(Y)); }
};

inline constexpr std::size_t kOmegaBins = 64;
using OmegaHistogram = std::array<std::uint64_t, kOmegaBins>;

/// Histograms of omega(n - 1) and omega(n - 1, Y) over n in S*(x, y).
struct OmegaCounts {
  std::uint64_t x = 0, y = 0, cutoff = 0;
  std::uint64_t psi = 0;  // Psi(x, y), including n = 1
  OmegaHistogram omega{};
  OmegaHistogram omega_y{};

  std::uint64_t sample_size() const { return psi - 1; }
};

/// One segmented pass over [1, x - 1]; cutoff is the integer part of Y.
inline OmegaCounts omega_counts(std::uint64_t x, std::uint64_t y, std::uint64_t cutoff,
                                const Executor& exec = Executor::serial()) {
  detail::check_counting(x, y);
  require(x >= 2, "omega_counts: x must be >= 2");
  require(x <= kEnumerationCap, "omega_counts: x exceeds the enumeration cap 1e8");
  struct Part {
    std::uint64_t psi = 0;
    OmegaHistogram omega{}, omega_y{};
  };
  const auto primes = primes_up_to(isqrt(x));
  const auto parts = exec.map<Part>(segment_count(1, x), [&](std::size_t s) {
    const std::uint64_t lo = 1 + s * kSegmentLength;
    const std::uint64_t hi = std::min<std::uint64_t>(x + 1, lo + kSegmentLength);
    Cofactors rem;
    std::vector<std::uint8_t> flags;
    friable_flags(lo, hi, y, primes, rem, flags);
    Part part;
    part.psi = static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
    const std::uint64_t first = lo == 1 ? 1 : 0;  // skip n = 1
    const std::uint64_t mlo = lo - 1 + first, mhi = hi - 1;
    if (mlo >= mhi) return part;
    OmegaProfile prof;
    omega_profile(mlo, mhi, cutoff, primes, rem, prof);
    for (std::uint64_t i = first; i < hi - lo; ++i)
      if (flags[i]) {
        ++part.omega[prof.omega[i - first]];
        ++part.omega_y[prof.omega_y[i - first]];
      }
    return part;
  });
  OmegaCounts out;
  out.x = x;
  out.y = y;
  out.cutoff = cutoff;
  for (const auto& p : parts) {
    out.psi += p.psi;
    for (std::size_t k = 0; k < kOmegaBins; ++k) {
      out.omega[k] += p.omega[k];
      out.omega_y[k] += p.omega_y[k];
    }
  }
  return out;
}

inline OmegaCounts omega_counts(const EkConfig& cfg, const Executor& exec = Executor::serial()) {
  return omega_counts(cfg.x, cfg.y, cfg.cutoff(), exec);
}

/// omega(n, Y): distinct primes p <= Y dividing n.
inline std::uint32_t omega_truncated(const Factorization& n, double Y) {
  std::uint32_t k = 0;
  for (const auto& [p, nu] : n)
    if (static_cast<double>(p) <= Y) ++k;
  return k;
}

inline std::uint32_t omega_truncated(std::uint64_t n, double Y) {
  require(n >= 1, "omega_truncated: n must be >= 1");
  return omega_truncated(factorize_trial(n), Y);
}

namespace detail {

// Count of samples with value <= k.
inline std::uint64_t cumulative(const OmegaHistogram& h, std::int64_t k) {
  std::uint64_t c = 0;
  for (std::int64_t j = 0; j <= k && j < static_cast<std::int64_t>(kOmegaBins); ++j) c += h[j];
  return c;
}

// #{samples with value <= center + t scale} / psi.
inline double histogram_cdf(const OmegaHistogram& h, std::uint64_t psi, double center, double scale,
                            double t) {
  const double bound = center + t * scale;
  if (bound < 0.0) return 0.0;
  const auto k = static_cast<std::int64_t>(std::floor(bound));
  return static_cast<double>(cumulative(h, k)) / static_cast<double>(psi);
}

}  // namespace detail

/// Psi(x, y; t) / Psi(x, y) with (omega(n - 1) - log log x) / sqrt(log log x) <= t.
inline double empirical_cdf(const OmegaCounts& c, double t) {
  const double L = std::log(std::log(static_cast<double>(c.x)));
  return detail::histogram_cdf(c.omega, c.psi, L, std::sqrt(L), t);
}

/// Psi*(x, y; t) / Psi(x, y) with omega(n - 1, Y) <= xi + t sqrt(xi).
inline double truncated_cdf(const OmegaCounts& c, const EkConfig& cfg, double t) {
  return detail::histogram_cdf(c.omega_y, c.psi, cfg.xi, std::sqrt(cfg.xi), t);
}

struct KsResult {
  double sup = 0.0;
  double t_at = 0.0;       // location of the sup (+inf for the tail term)
  bool left_limit = false; // sup attained as the left limit at t_at
  bool degenerate = false; // Psi <= 2
};

/// sup_t |F(t) - Phi(t)| for the step function F of a histogram, exact: F only
/// jumps at t_k = (k - center)/scale, so the sup is attained at a one-sided
/// limit of a jump or as t -> +inf, where F = (Psi - 1)/Psi.
inline KsResult ks_statistic(const OmegaHistogram& h, std::uint64_t psi, double center, double scale) {
  KsResult r;
  r.degenerate = psi <= 2;
  r.sup = 1.0 / static_cast<double>(psi);
  r.t_at = std::numeric_limits<double>::infinity();
  std::uint64_t below = 0;
  for (std::size_t k = 0; k < kOmegaBins; ++k) {
    if (h[k] == 0) continue;
    const double t = (static_cast<double>(k) - center) / scale;
    const double phi = gaussian_cdf(t);
    const double left = std::fabs(static_cast<double>(below) / static_cast<double>(psi) - phi);
    below += h[k];
    const double right = std::fabs(static_cast<double>(below) / static_cast<double>(psi) - phi);
    if (left > r.sup) {
      r.sup = left;
      r.t_at = t;
      r.left_limit = true;
    }
    if (right > r.sup) {
      r.sup = right;
      r.t_at = t;
      r.left_limit = false;
    }
  }
  return r;
}

inline KsResult ek_discrepancy(const OmegaCounts& c) {
  const double L = std::log(std::log(static_cast<double>(c.x)));
  return ks_statistic(c.omega, c.psi, L, std::sqrt(L));
}

inline KsResult ek_discrepancy(std::uint64_t x, std::uint64_t y, const Executor& exec = Executor::serial()) {
  require(x >= 16, "ek_discrepancy: x must be >= 16");
  return ek_discrepancy(omega_counts(x, y, 1, exec));
}

struct EkMoments {
  std::uint64_t sum = 0;     // sum of omega(n - 1, Y)
  std::uint64_t sum_sq = 0;  // sum of omega(n - 1, Y)^2
  double mean = 0.0;         // sum / (Psi - 1)
  double variance = 0.0;     // about the mean, over the Psi - 1 samples
  double centered = 0.0;     // (1/(xi Psi)) sum (omega(n - 1, Y) - xi)^2
};

inline EkMoments histogram_moments(const OmegaHistogram& h, std::uint64_t psi, double xi) {
  EkMoments m;
  std::uint64_t n = 0;
  CompensatedSum centered;
  for (std::size_t k = 0; k < kOmegaBins; ++k) {
    n += h[k];
    m.sum += h[k] * k;
    m.sum_sq += h[k] * k * k;
    const double d = static_cast<double>(k) - xi;
    centered.add(static_cast<double>(h[k]) * d * d);
  }
  if (n > 0) {
    m.mean = static_cast<double>(m.sum) / static_cast<double>(n);
    m.variance = std::max(0.0, static_cast<double>(m.sum_sq) / static_cast<double>(n) - m.mean * m.mean);
  }
  if (xi > 0.0) m.centered = centered.value() / (xi * static_cast<double>(psi));
  return m;
}

inline EkMoments ek_moments(const OmegaCounts& c, const EkConfig& cfg) {
  return histogram_moments(c.omega_y, c.psi, cfg.xi);
}

/// f_theta(d) = mu^2(d) (e^{i theta / sqrt xi} - 1)^omega(d).
inline std::complex<double> f_theta(const Factorization& d, double theta, double xi) {
  require(xi > 0.0, "f_theta: xi must be > 0");
  for (const auto& [p, nu] : d)
    if (nu > 1) return {0.0, 0.0};
  const std::complex<double> base = std::polar(1.0, theta / std::sqrt(xi)) - 1.0;
  std::complex<double> v{1.0, 0.0};
  for (std::size_t k = 0; k < d.size(); ++k) v *= base;
  return v;
}

inline std::complex<double> f_theta(std::uint64_t d, double theta, double xi) {
  require(d >= 1, "f_theta: d must be >= 1");
  return f_theta(factorize_trial(d), theta, xi);
}

/// sum_{d | m, P(d) <= Y} f_theta(d).
inline std::complex<double> f_theta_divisor_sum(std::uint64_t m, double theta, double xi, double Y) {
  const auto fm = factorize_trial(m);
  std::complex<double> s{0.0, 0.0};
  for (const std::uint64_t d : divisors(fm)) {
    const auto fd = factorize_trial(d);
    if (static_cast<double>(fd.largest_prime()) <= Y) s += f_theta(fd, theta, xi);
  }
  return s;
}

/// R(theta) = (1/Psi) sum_{n in S*} e^{i theta (omega(n-1, Y) - xi)/sqrt xi} - e^{-theta^2/2}.
inline std::complex<double> char_fn_R(const OmegaCounts& c, const EkConfig& cfg, double theta) {
  const double root = std::sqrt(cfg.xi);
  require(std::fabs(theta) <= root * (1.0 + 1e-12), "char_fn_R: |theta| must be <= sqrt(xi)");
  CompensatedSum re, im;
  for (std::size_t k = 0; k < kOmegaBins; ++k) {
    if (c.omega_y[k] == 0) continue;
    const double phase = theta * (static_cast<double>(k) - cfg.xi) / root;
    const double w = static_cast<double>(c.omega_y[k]);
    re.add(w * std::cos(phase));
    im.add(w * std::sin(phase));
  }
  const double psi = static_cast<double>(c.psi);
  return {re.value() / psi - std::exp(-0.5 * theta * theta), im.value() / psi};
}

/// |R'(0)| = |(1/Psi) sum (omega(n - 1, Y) - xi)| / sqrt(xi).
inline double char_fn_R_slope(const OmegaCounts& c, const EkConfig& cfg) {
  CompensatedSum s;
  for (std::size_t k = 0; k < kOmegaBins; ++k)
    s.add(static_cast<double>(c.omega_y[k]) * (static_cast<double>(k) - cfg.xi));
  return std::fabs(s.value()) / (static_cast<double>(c.psi) * std::sqrt(cfg.xi));
}

inline constexpr double kBerryEsseenCutoff = 1e-3;

struct BerryEsseen {
  double value = 0.0;      // 1/sqrt(xi) + eps0 |R'(0)| + int_{eps0}^{sqrt xi} |R|/theta
  double head = 0.0;       // eps0 |R'(0)|
  double integral = 0.0;   // the quadrature part
  std::uint32_t panels = 0;
  double last_change = 0.0;  // change on the final panel doubling
};

/// Composite Simpson on [eps0, sqrt xi] with `panels` panels (even).
inline double berry_esseen_integral(const OmegaCounts& c, const EkConfig& cfg, std::uint32_t panels,
                                    double eps0 = kBerryEsseenCutoff) {
  require(panels >= 2 && panels % 2 == 0, "berry_esseen_integral: panels must be even");
  const double a = eps0, b = std::sqrt(cfg.xi);
  if (b <= a) return 0.0;
  const double h = (b - a) / panels;
  auto g = [&](double t) { return std::abs(char_fn_R(c, cfg, t)) / t; };
  CompensatedSum s;
  s.add(g(a));
  s.add(g(b));
  for (std::uint32_t i = 1; i < panels; ++i) s.add((i % 2 ? 4.0 : 2.0) * g(a + i * h));
  return s.value() * h / 3.0;
}

/// The bracketed Berry-Esseen expression with constant 1; a diagnostic only.
inline BerryEsseen berry_esseen_bound(const OmegaCounts& c, const EkConfig& cfg, double tol = 1e-9,
                                      double eps0 = kBerryEsseenCutoff) {
  require(eps0 > 0.0, "berry_esseen_bound: eps0 must be > 0");
  BerryEsseen be;
  be.head = std::min(eps0, std::sqrt(cfg.xi)) * char_fn_R_slope(c, cfg);
  std::uint32_t n = 64;
  double prev = berry_esseen_integral(c, cfg, n, eps0);
  for (;;) {
    const double next = berry_esseen_integral(c, cfg, 2 * n, eps0);
    be.last_change = std::fabs(next - prev);
    prev = next;
    n *= 2;
    if (be.last_change <= tol || n >= (1u << 22)) break;
  }
  be.integral = prev;
  be.panels = n;
  be.value = 1.0 / std::sqrt(cfg.xi) + be.head + be.integral;
  return be;
}

struct LandreauResult {
  std::uint64_t N = 0;
  std::uint64_t argmax = 0;      // smallest n attaining the max
  std::uint64_t tau_n = 0;       // numerator at argmax
  std::uint64_t denominator = 0; // sum_{d | n, d^3 <= n} tau(d)^3 at argmax
  double max_ratio = 0.0;
  bool primes_equal_two = true;  // ratio is exactly 2 at every prime <= N
};

/// max_{2 <= n <= N} tau(n) / sum_{d | n, d^3 <= n} tau(d)^3.
inline LandreauResult landreau_check(std::uint64_t N) {
  require(N >= 2 && N <= 10'000'000, "landreau_check: N must lie in [2, 1e7]");
  std::vector<std::uint32_t> tau(N + 1, 0);
  for (std::uint64_t d = 1; d <= N; ++d)
    for (std::uint64_t m = d; m <= N; m += d) ++tau[m];
  std::vector<std::uint64_t> den(N + 1, 0);
  for (std::uint64_t d = 1; d * d * d <= N; ++d) {
    const std::uint64_t t3 = static_cast<std::uint64_t>(tau[d]) * tau[d] * tau[d];
    for (std::uint64_t m = d * d * d; m <= N; m += d) den[m] += t3;
  }
  LandreauResult r;
  r.N = N;
  for (std::uint64_t n = 2; n <= N; ++n) {
    if (tau[n] == 2 && !(den[n] == 1)) r.primes_equal_two = false;
    // tau[n] / den[n] > best, compared exactly.
    if (r.argmax == 0 || static_cast<std::uint64_t>(tau[n]) * r.denominator > r.tau_n * den[n]) {
      r.argmax = n;
      r.tau_n = tau[n];
      r.denominator = den[n];
    }
  }
  r.max_ratio = static_cast<double>(r.tau_n) / static_cast<double>(r.denominator);
  return r;
}

struct EkGridRow {
  double t = 0.0;
  double empirical = 0.0;
  double phi = 0.0;
  double gap = 0.0;  // empirical - phi
};

struct EkReport {
  std::uint64_t x = 0, y = 0;
  double c_Y = 0.0, Y = 0.0, xi = 0.0;
  std::uint64_t psi = 0;
  std::vector<EkGridRow> grid;
  KsResult ks;
  double omega_mean = 0.0, omega_variance = 0.0;  // omega(n - 1)
  EkMoments truncated;                           // omega(n - 1, Y)
  BerryEsseen berry_esseen;
  double budget = 0.0;  // log log log x / sqrt(log log x)
};

inline std::vector<double> default_t_grid() {
  std::vector<double> g;
  for (int i = -12; i <= 12; ++i) g.push_back(0.25 * i);
  return g;
}

inline EkReport ek_report(const EkConfig& cfg, const std::vector<double>& t_grid = default_t_grid(),
                          const Executor& exec = Executor::serial()) {
  const auto c = omega_counts(cfg, exec);
  EkReport r;
  r.x = cfg.x;
  r.y = cfg.y;
  r.c_Y = cfg.c_Y;
  r.Y = cfg.Y;
  r.xi = cfg.xi;
  r.psi = c.psi;
  for (const double t : t_grid) {
    EkGridRow row;
    row.t = t;
    row.empirical = empirical_cdf(c, t);
    row.phi = gaussian_cdf(t);
    row.gap = row.empirical - row.phi;
    r.grid.push_back(row);
  }
  r.ks = ek_discrepancy(c);
  const auto full = histogram_moments(c.omega, c.psi, 0.0);
  r.omega_mean = full.mean;
  r.omega_variance = full.variance;
  r.truncated = ek_moments(c, cfg);
  r.berry_esseen = berry_esseen_bound(c, cfg);
  const double L = std::log(std::log(static_cast<double>(cfg.x)));
  r.budget = std::log(L) / std::sqrt(L);
  return r;
}

}  // namespace friable
