#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "friable/saddle.hpp"

using namespace friable;

namespace {

// Oracle: plain sieve, long double sums and 200 bisection steps.
long double oracle_alpha(double x, unsigned y) {
  std::vector<bool> composite(y + 1, false);
  std::vector<long double> logs;
  for (unsigned p = 2; p <= y; ++p) {
    if (composite[p]) continue;
    logs.push_back(std::log(static_cast<long double>(p)));
    for (unsigned long long m = static_cast<unsigned long long>(p) * p; m <= y; m += p) composite[m] = true;
  }
  const long double lx = std::log(static_cast<long double>(x));
  auto F = [&](long double a) {
    long double s = 0;
    for (const auto l : logs) s += l / std::expm1(a * l);
    return s - lx;
  };
  long double lo = 1e-6L, hi = 8.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (F(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

}  // namespace

TEST(Saddle, MatchesOracle) {
  const std::pair<double, unsigned> grid[] = {
      {1e4, 10}, {1e5, 100}, {1e6, 1000}, {1e7, 1000}, {1e6, 1'000'000}, {1e20, 30}, {1e7, 2}};
  for (const auto& [x, y] : grid) {
    const auto sp = solve_alpha(x, y);
    EXPECT_NEAR(sp.alpha, static_cast<double>(oracle_alpha(x, y)), 1e-12 * sp.alpha) << x << " " << y;
    EXPECT_LE(sp.residual, 1e-12 * std::log(x));
  }
}

TEST(Saddle, MethodsAgree) {
  for (const unsigned y : {5u, 100u, 10'000u}) {
    const SaddleSolver s(y);
    for (const double lx : {5.0, 20.0, 60.0}) {
      const auto a = s.solve(lx, 1e-13, SaddleMethod::kBisection);
      const auto b = s.solve(lx, 1e-13, SaddleMethod::kBisectionNewton);
      EXPECT_NEAR(a.alpha, b.alpha, 1e-12 * a.alpha);
    }
  }
}

TEST(Saddle, TwoFriableClosedForm) {
  // With y = 2: log 2 / (2^alpha - 1) = log x, so alpha = log2(1 + log 2 / log x).
  for (const double x : {10.0, 1e3, 1e9}) {
    const double expect = std::log2(1.0 + std::log(2.0) / std::log(x));
    EXPECT_NEAR(solve_alpha(x, 2).alpha, expect, 1e-13);
  }
}

TEST(Saddle, Monotone) {
  double prev = 0.0;
  for (const unsigned y : {10u, 30u, 100u, 300u, 1000u, 3000u}) {
    const double a = solve_alpha(1e8, y).alpha;
    EXPECT_GT(a, prev);
    prev = a;
  }
  prev = 10.0;
  for (double x = 1e3; x <= 1e15; x *= 10.0) {
    const double a = solve_alpha(x, 500).alpha;
    EXPECT_LT(a, prev);
    prev = a;
  }
}

TEST(Saddle, Errors) {
  EXPECT_THROW(solve_alpha(1e6, 1), InputError);
  EXPECT_THROW(solve_alpha(2.0, 10), InputError);
  EXPECT_THROW(SaddleSolver(10).solve(5.0, 0.0), InputError);
}

TEST(Saddle, DerivativeMatchesFiniteDifference) {
  const SaddleSolver s(1000);
  for (const double a : {0.3, 0.7, 1.2}) {
    const double h = 1e-6;
    const double fd = (s.prime_sum(a + h) - s.prime_sum(a - h)) / (2.0 * h);
    EXPECT_NEAR(s.prime_sum_derivative(a), fd, 1e-6 * std::fabs(fd));
  }
}

TEST(GQ, Values) {
  EXPECT_EQ(g_q(1, 0.7), 1.0);
  EXPECT_NEAR(g_q(6, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g_q(12, 1.0), g_q(6, 1.0), 1e-15);
  EXPECT_EQ(g_q(30, 0.0), 0.0);
  EXPECT_NEAR(g_q(10, 0.5), (1 - 1 / std::sqrt(2.0)) * (1 - 1 / std::sqrt(5.0)), 1e-15);
  EXPECT_THROW(g_q(0, 1.0), InputError);
  EXPECT_THROW(g_q(6, -0.1), InputError);
}

TEST(GQ, ExactAtOne) {
  EXPECT_EQ(g_q_at_one_exact(1), (Rational{1, 1}));
  EXPECT_EQ(g_q_at_one_exact(12), (Rational{1, 3}));
  EXPECT_EQ(g_q_at_one_exact(30), (Rational{4, 15}));
  for (std::uint64_t q = 1; q <= 2000; ++q) {
    const auto r = g_q_at_one_exact(q);
    EXPECT_NEAR(static_cast<double>(r.num) / static_cast<double>(r.den), g_q(q, 1.0), 1e-14);
  }
}

TEST(AlphaGap, Diagnostic) {
  const auto in = alpha_gap_diagnostic(1e4, 100);  // (log 1e4)^2 = 84.8 <= 100
  EXPECT_TRUE(in.in_regime);
  EXPECT_GT(in.one_minus_alpha, 0.0);
  EXPECT_NEAR(in.ratio, in.one_minus_alpha / in.log_u1_over_log_y, 1e-15);
  const auto out = alpha_gap_diagnostic(1e6, 100);
  EXPECT_FALSE(out.in_regime);
  EXPECT_TRUE(std::isfinite(out.ratio));
}

TEST(AlphaGap, RatioBoundedInRegime) {
  // 1 - alpha is comparable to log(u+1)/log y once (log x)^2 <= y.
  for (const double x : {1e3, 1e5, 1e7})
    for (const unsigned y : {1000u, 100'000u, 1'000'000u}) {
      const auto g = alpha_gap_diagnostic(x, y);
      if (!g.in_regime || y > x) continue;
      EXPECT_GT(g.ratio, 0.1);
      EXPECT_LT(g.ratio, 10.0);
    }
}
