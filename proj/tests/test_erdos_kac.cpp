#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "friable/erdos_kac.hpp"

using namespace friable;

namespace {

std::uint64_t lpf(std::uint64_t n) {
  std::uint64_t best = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    while (n % d == 0) {
      best = d;
      n /= d;
    }
  return n > 1 ? n : best;
}

// omega(m) and omega(m, Y) by trial division.
std::pair<unsigned, unsigned> omegas(std::uint64_t m, double Y) {
  unsigned all = 0, small = 0;
  for (std::uint64_t d = 2; d * d <= m; ++d)
    if (m % d == 0) {
      ++all;
      small += static_cast<double>(d) <= Y;
      while (m % d == 0) m /= d;
    }
  if (m > 1) {
    ++all;
    small += static_cast<double>(m) <= Y;
  }
  return {all, small};
}

}  // namespace

TEST(Gaussian, MatchesQuadrature) {
  // Simpson on the density over [-10, 1].
  const int n = 20000;
  const double a = -10.0, b = 1.0, h = (b - a) / n;
  auto dens = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  double s = dens(a) + dens(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * dens(a + i * h);
  EXPECT_NEAR(gaussian_cdf(1.0), s * h / 3.0, 1e-13);
  EXPECT_EQ(gaussian_cdf(0.0), 0.5);
  EXPECT_NEAR(gaussian_cdf(-1.5) + gaussian_cdf(1.5), 1.0, 1e-15);
}

TEST(EkConfig, Values) {
  const auto c = EkConfig::make(100'000, 1000);
  EXPECT_NEAR(c.Y, 6.877714641205025, 1e-12);  // independent computation
  EXPECT_NEAR(c.xi, 0.6566317445526902, 1e-13);
  EXPECT_EQ(c.cutoff(), 6u);
  EXPECT_THROW(EkConfig::make(10, 10), InputError);
  EXPECT_THROW(EkConfig::make(100'000, 1000, 2.0, 2.5), InputError);  // log log 2.5 < 0
  EXPECT_THROW(EkConfig::make(100'000, 1000, 2.0, 2e5), InputError);  // Y > x
}

TEST(OmegaCounts, MatchesBruteForce) {
  const std::uint64_t x = 300'000, y = 200;
  const double Y = 11.5;
  const auto c = omega_counts(x, y, 11, Executor(3));
  OmegaHistogram all{}, small{};
  std::uint64_t psi = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (lpf(n) > y) continue;
    ++psi;
    if (n == 1) continue;
    const auto [a, s] = omegas(n - 1, Y);
    ++all[a];
    ++small[s];
  }
  EXPECT_EQ(c.psi, psi);
  EXPECT_EQ(c.omega, all);
  EXPECT_EQ(c.omega_y, small);
}

TEST(OmegaCounts, HistogramSumsToSample) {
  const auto c = omega_counts(EkConfig::make(1'000'000, 500));
  std::uint64_t a = 0, b = 0;
  for (std::size_t k = 0; k < kOmegaBins; ++k) {
    a += c.omega[k];
    b += c.omega_y[k];
  }
  EXPECT_EQ(a, c.psi - 1);
  EXPECT_EQ(b, c.psi - 1);
  EXPECT_EQ(c.sample_size(), c.psi - 1);
}

TEST(OmegaCounts, FullCutoffAgrees) {
  const auto c = omega_counts(200'000, 1000, 200'000);
  EXPECT_EQ(c.omega, c.omega_y);
}

TEST(OmegaCounts, ThreadIndependent) {
  const auto a = omega_counts(3'000'000, 3'000'000, 9);
  const auto b = omega_counts(3'000'000, 3'000'000, 9, Executor(6));
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_EQ(a.omega_y, b.omega_y);
  EXPECT_EQ(a.psi, b.psi);
}

TEST(OmegaTruncated, Examples) {
  EXPECT_EQ(omega_truncated(1, 10.0), 0u);
  EXPECT_EQ(omega_truncated(2 * 3 * 5 * 7 * 11, 7.0), 4u);
  EXPECT_EQ(omega_truncated(2 * 3 * 5 * 7 * 11, 7.5), 4u);
  EXPECT_EQ(omega_truncated(1024, 2.0), 1u);
}

TEST(Cdf, FrozenValues) {
  // Counts from an independent sieve.
  const auto d = omega_counts(EkConfig::make(100'000, 100'000));
  EXPECT_EQ(d.psi, 100'000u);
  EXPECT_DOUBLE_EQ(empirical_cdf(d, 0.0), 43459.0 / 100'000.0);
  const auto cfg = EkConfig::make(100'000, 1000);
  const auto c = omega_counts(cfg);
  EXPECT_EQ(c.psi, 53323u);
  EXPECT_DOUBLE_EQ(truncated_cdf(c, cfg, 0.0), 16934.0 / 53323.0);
  const auto m = ek_moments(c, cfg);
  EXPECT_EQ(m.sum, 49411u);
  EXPECT_EQ(m.sum_sq, 78043u);
}

TEST(Cdf, LimitsAndMonotone) {
  const auto c = omega_counts(EkConfig::make(100'000, 300));
  EXPECT_EQ(empirical_cdf(c, -100.0), 0.0);
  EXPECT_DOUBLE_EQ(empirical_cdf(c, 100.0), static_cast<double>(c.psi - 1) / static_cast<double>(c.psi));
  double prev = 0.0;
  for (double t = -4.0; t <= 4.0; t += 0.01) {
    const double v = empirical_cdf(c, t);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Ks, AgreesWithDenseGrid) {
  for (const auto& [x, y] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
           {100'000, 100'000}, {100'000, 1000}, {30'000, 50}}) {
    const auto c = omega_counts(x, y, 1);
    const auto ks = ek_discrepancy(c);
    double grid = 0.0;
    for (int i = 0; i <= 10'000; ++i) {
      const double t = -5.0 + i * 1e-3;
      grid = std::max(grid, std::fabs(empirical_cdf(c, t) - gaussian_cdf(t)));
    }
    grid = std::max(grid, 1.0 / static_cast<double>(c.psi));
    // The grid only samples, and one-sided limits are approached within 1e-3 in t.
    EXPECT_LE(grid, ks.sup + 1e-15) << x << " " << y;
    EXPECT_GE(grid, ks.sup - 1e-3) << x << " " << y;
  }
}

TEST(Ks, SyntheticHistogram) {
  // All mass at k = 2 with center 2, scale 1: sup is 1/2 at t = 0 from both sides.
  OmegaHistogram h{};
  h[2] = 9;
  const auto r = ks_statistic(h, 10, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(r.sup, 0.5);
  EXPECT_EQ(r.t_at, 0.0);
  EXPECT_TRUE(r.left_limit);
}

TEST(Moments, MertensDrift) {
  // The mean of omega(n - 1) exceeds log log x by a bounded amount.
  for (const std::uint64_t x : {100'000ULL, 1'000'000ULL, 10'000'000ULL}) {
    const std::uint64_t y = x;
    const auto r = ek_report(EkConfig::make(x, y), default_t_grid(), Executor(4));
    const double drift = r.omega_mean - std::log(std::log(static_cast<double>(x)));
    EXPECT_GE(drift, 0.0) << x << " " << y;
    EXPECT_LE(drift, 1.0) << x << " " << y;
    EXPECT_GT(r.omega_variance, 0.0);
  }
}

TEST(FTheta, DivisorSumIdentity) {
  // sum_{d | m, P(d) <= Y} f_theta(d) = e^{i theta omega(m, Y) / sqrt xi}.
  const double xi = 0.8, Y = 13.0;
  for (const double theta : {0.3, -0.7, 0.89})
    for (std::uint64_t m = 1; m <= 3000; ++m) {
      const auto s = f_theta_divisor_sum(m, theta, xi, Y);
      const auto expect = std::polar(1.0, theta * omegas(m, Y).second / std::sqrt(xi));
      ASSERT_NEAR(std::abs(s - expect), 0.0, 1e-12) << m << " " << theta;
    }
  EXPECT_EQ(f_theta(4, 0.5, 1.0), std::complex<double>(0.0, 0.0));
  EXPECT_EQ(f_theta(1, 0.5, 1.0), std::complex<double>(1.0, 0.0));
}

TEST(CharFn, Properties) {
  const auto cfg = EkConfig::make(1'000'000, 2000);
  const auto c = omega_counts(cfg);
  EXPECT_NEAR(char_fn_R(c, cfg, 0.0).real(), -1.0 / static_cast<double>(c.psi), 1e-15);
  EXPECT_EQ(char_fn_R(c, cfg, 0.0).imag(), 0.0);
  const double root = std::sqrt(cfg.xi);
  for (double t = 0.01; t <= root; t += 0.01) {
    const auto a = char_fn_R(c, cfg, t), b = char_fn_R(c, cfg, -t);
    EXPECT_NEAR(a.real(), b.real(), 1e-14);
    EXPECT_NEAR(a.imag(), -b.imag(), 1e-14);
    EXPECT_LE(std::abs(a), 2.0);
  }
  EXPECT_THROW(char_fn_R(c, cfg, root * 1.01), InputError);
  // Slope at 0 by a central difference of the imaginary part.
  const double h = 1e-5;
  const double fd = (char_fn_R(c, cfg, h).imag() - char_fn_R(c, cfg, -h).imag()) / (2 * h);
  EXPECT_NEAR(std::fabs(fd), char_fn_R_slope(c, cfg), 1e-8);
}

TEST(BerryEsseen, BoundAndConvergence) {
  const auto cfg = EkConfig::make(1'000'000, 1000);
  const auto c = omega_counts(cfg);
  const auto be = berry_esseen_bound(c, cfg);
  EXPECT_GE(be.value, 1.0 / std::sqrt(cfg.xi));
  EXPECT_LE(be.last_change, 1e-9);
  EXPECT_NEAR(be.value, 1.0 / std::sqrt(cfg.xi) + be.head + be.integral, 1e-15);
  const double coarse = berry_esseen_integral(c, cfg, 16), fine = berry_esseen_integral(c, cfg, 32);
  EXPECT_LT(std::fabs(coarse - fine), 1e-3);
  EXPECT_NEAR(fine, be.integral, 1e-3);
  EXPECT_THROW(berry_esseen_integral(c, cfg, 3), InputError);
}

TEST(Landreau, BruteForce) {
  const std::uint64_t N = 3000;
  auto tau = [](std::uint64_t n) {
    std::uint64_t t = 0;
    for (std::uint64_t d = 1; d <= n; ++d) t += n % d == 0;
    return t;
  };
  std::uint64_t best_n = 0, best_num = 0, best_den = 1;
  for (std::uint64_t n = 2; n <= N; ++n) {
    std::uint64_t den = 0;
    for (std::uint64_t d = 1; d * d * d <= n; ++d)
      if (n % d == 0) den += tau(d) * tau(d) * tau(d);
    const auto num = tau(n);
    if (best_n == 0 || num * best_den > best_num * den) {
      best_n = n;
      best_num = num;
      best_den = den;
    }
  }
  const auto r = landreau_check(N);
  EXPECT_EQ(r.argmax, best_n);
  EXPECT_EQ(r.tau_n, best_num);
  EXPECT_EQ(r.denominator, best_den);
  EXPECT_TRUE(r.primes_equal_two);
  EXPECT_THROW(landreau_check(1), InputError);
}

TEST(Landreau, Golden) {
  std::ifstream in(std::string(FRIABLE_GOLDEN_DIR) + "/landreau_N100000.txt");
  ASSERT_TRUE(in) << "missing golden file";
  std::map<std::string, std::string> kv;
  std::string k, v;
  while (in >> k >> v) kv[k] = v;
  const auto r = landreau_check(100'000);
  EXPECT_EQ(std::to_string(r.N), kv["N"]);
  EXPECT_EQ(std::to_string(r.argmax), kv["argmax"]);
  EXPECT_EQ(std::to_string(r.tau_n), kv["tau_n"]);
  EXPECT_EQ(std::to_string(r.denominator), kv["denominator"]);
}

TEST(Report, Fields) {
  const auto cfg = EkConfig::make(1'000'000, 1000);
  const auto r = ek_report(cfg);
  EXPECT_EQ(r.grid.size(), 25u);
  for (const auto& row : r.grid) EXPECT_DOUBLE_EQ(row.gap, row.empirical - row.phi);
  const double L = std::log(std::log(1e6));
  EXPECT_NEAR(r.budget, std::log(L) / std::sqrt(L), 1e-15);
  EXPECT_GE(r.ks.sup, 1.0 / static_cast<double>(r.psi));
  for (const auto& row : r.grid) EXPECT_LE(std::fabs(row.gap), r.ks.sup + 1e-15);
}
