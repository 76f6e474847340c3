#pragma once

// The acceptance suite as a library call: criteria 1-9, each reduced to one
// pass/fail line, plus the report files they produce. Criterion 10 compares
// two such runs and lives with the caller.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "friable/counting.hpp"
#include "friable/erdos_kac.hpp"
#include "friable/mean_value.hpp"
#include "friable/report_io.hpp"
#include "friable/rho.hpp"
#include "friable/saddle.hpp"

namespace friable {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values against thresholds
};

struct ReportFile {
  std::string name;
  std::string content;
};

struct SelfcheckResult {
  std::vector<CriterionResult> criteria;
  std::vector<ReportFile> files;

  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return true;
  }
};

// Frozen values. The calibration run behind them is described in
// docs/calibration.md.
namespace frozen {
inline constexpr double kMeanValueConstant = 10.0;
inline constexpr double kEkThresholdDiagonal = 0.25;  // x = 1e7, y = x
inline constexpr double kEkThresholdFriable = 0.30;   // x = 1e7, y = 1e3
inline constexpr std::uint64_t kLandreauN = 100'000;
inline constexpr std::uint64_t kLandreauArgmax = 6;
inline constexpr std::uint64_t kLandreauTau = 4;
inline constexpr std::uint64_t kLandreauDenominator = 1;
}  // namespace frozen

namespace detail {

inline std::string describe(const std::string& label, double measured, const char* op, double bound) {
  return label + " = " + fmt(measured) + " " + op + " " + fmt(bound);
}

// 2^a 3^b 5^c <= 100, sorted.
inline std::vector<std::uint32_t> five_smooth_to_100() {
  std::vector<std::uint32_t> v;
  for (std::uint32_t a = 1; a <= 100; a *= 2)
    for (std::uint32_t b = a; b <= 100; b *= 3)
      for (std::uint32_t c = b; c <= 100; c *= 5) v.push_back(c);
  std::sort(v.begin(), v.end());
  return v;
}

// Li2(z) = sum z^k / k^2 for |z| <= 1/2.
inline double dilog_small(double z) {
  double s = 0.0, p = z;
  for (int k = 1; k < 200 && std::fabs(p) > 1e-300; ++k, p *= z) s += p / (static_cast<double>(k) * k);
  return s;
}

// On [2, 3]: rho(u) = 1 - (1 - log(u - 1)) log u + Li2(1 - u) + pi^2/12; at
// u = 3 the inversion Li2(-2) = -pi^2/6 - log(2)^2/2 - Li2(-1/2) applies.
inline double rho_three_closed_form() {
  const double pi2 = std::numbers::pi * std::numbers::pi, l2 = std::numbers::ln2;
  const double li2_m2 = -pi2 / 6.0 - 0.5 * l2 * l2 - dilog_small(-0.5);
  return 1.0 - (1.0 - l2) * std::log(3.0) + li2_m2 + pi2 / 12.0;
}

// rho(3) = 1 - log 3 + int_1^2 log(s)/(1 + s) ds by 10-point Gauss-Legendre
// on 32 panels.
inline double rho_three_quadrature() {
  static constexpr double x[] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                 0.8650633666889845, 0.9739065285171717};
  static constexpr double w[] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};
  auto f = [](double s) { return std::log(s) / (1.0 + s); };
  const int panels = 32;
  const double h = 1.0 / panels;
  CompensatedSum sum;
  for (int k = 0; k < panels; ++k) {
    const double mid = 1.0 + (k + 0.5) * h, half = 0.5 * h;
    for (int i = 0; i < 5; ++i) sum.add(half * w[i] * (f(mid - half * x[i]) + f(mid + half * x[i])));
  }
  return 1.0 - std::log(3.0) + sum.value();
}

}  // namespace detail

struct SelfcheckOptions {
  std::uint64_t series_cap = kSeriesCap;
};

inline SelfcheckResult run_selfcheck(const Executor& exec, const SelfcheckOptions& opt = {}) {
  SelfcheckResult out;
  auto add = [&](int id, std::string title, bool pass, std::string detail) {
    out.criteria.push_back({id, std::move(title), pass, std::move(detail)});
  };

  // 1. Partition and coprime identities.
  {
    bool ok = true;
    std::uint64_t checked = 0;
    const std::pair<std::uint64_t, std::uint64_t> grid[] = {{100'000, 30}, {100'000, 100}, {100'000, 100'000}};
    for (const auto& [x, y] : grid) {
      const auto total = psi(x, y, exec);
      for (std::uint64_t q = 1; q <= 50; ++q) {
        const auto classes = residue_counts(x, y, q, exec);
        std::uint64_t all = 0, coprime = 0;
        for (std::uint64_t a = 0; a < q; ++a) {
          all += classes[a];
          if (std::gcd(a, q) == 1) coprime += classes[a];
        }
        ok = ok && all == total && coprime == psi_coprime(x, y, q, exec);
        ++checked;
      }
    }
    add(1, "exact identities", ok, std::to_string(checked) + " (x, y, q) cases, all exact: " + fmt(ok));
  }

  // 2. Oracle equivalence.
  {
    const auto list = enumerate_friable(100, 5, exec);
    const bool list_ok = list == detail::five_smooth_to_100();
    const auto segmented = psi(1'000'000, 100, exec);
    const auto sieve = build_sieve(1'000'000, exec);
    std::uint64_t by_spf = 0;
    for (std::uint64_t n = 1; n <= 1'000'000; ++n)
      if (largest_prime_factor(n, sieve) <= 100) ++by_spf;
    add(2, "oracle equivalence", list_ok && list.size() == 34 && segmented == by_spf,
        "Psi(100,5) = " + std::to_string(list.size()) + ", list matches 2^a3^b5^c: " + fmt(list_ok) +
            "; Psi(1e6,100) segmented = " + std::to_string(segmented) + ", SPF = " + std::to_string(by_spf));
  }

  // 3. Dickman rho.
  {
    const double tol = 1e-10;
    const auto table = build_rho(50.0, tol);
    const auto finer = build_rho(50.0, tol / 10.0);
    const double at2 = std::fabs(table(2.0) - (1.0 - std::numbers::ln2));
    const double self = max_node_difference(table, finer);
    const double at3 = std::fabs(table(3.0) - detail::rho_three_quadrature());
    const double at3_closed = std::fabs(table(3.0) - detail::rho_three_closed_form());
    add(3, "Dickman rho", at2 <= 1e-9 && self <= 10.0 * tol && at3 <= 1e-8 && at3_closed <= 1e-8,
        detail::describe("|rho(2)-(1-ln2)|", at2, "<=", 1e-9) + "; " +
            detail::describe("self-convergence", self, "<=", 10.0 * tol) + "; " +
            detail::describe("|rho(3)-quadrature|", at3, "<=", 1e-8) + "; " +
            detail::describe("|rho(3)-dilogarithm form|", at3_closed, "<=", 1e-8));
  }

  // 4. Saddle point.
  {
    const double xs[] = {1e3, 1e6, 1e9, 1e12, 1e20};
    const std::uint64_t ys[] = {10, 100, 1'000, 10'000, 100'000};
    double worst_res = 0.0, worst_split = 0.0;
    for (const std::uint64_t y : ys) {
      const SaddleSolver solver(y);
      for (const double x : xs) {
        const double lx = std::log(x);
        const auto polished = solver.solve(lx, 1e-12, SaddleMethod::kBisectionNewton);
        const auto bisect = solver.solve(lx, 1e-12, SaddleMethod::kBisection);
        worst_res = std::max(worst_res, polished.residual / lx);
        worst_split = std::max(worst_split, std::fabs(polished.alpha - bisect.alpha));
      }
    }
    bool exact = true;
    for (std::uint64_t q = 1; q <= 10'000; ++q)
      exact = exact && g_q_at_one_exact(q) == reduced(mult_functions(factorize_trial(q)).phi, q);
    add(4, "saddle point", worst_res <= 1e-12 && worst_split <= 1e-11 && exact,
        detail::describe("max residual/log x", worst_res, "<=", 1e-12) + "; " +
            detail::describe("bisection vs polished", worst_split, "<=", 1e-11) +
            "; g_q(1) = phi(q)/q exact for q <= 1e4: " + fmt(exact));
  }

  // 5. Mean value. 6. Series/product consistency.
  {
    const auto sieve = build_sieve(opt.series_cap, exec);
    ReportOptions ropt;
    ropt.main_term.cap = opt.series_cap;
    ropt.main_term.euler_prime_limit = opt.series_cap;
    const double diag = empirical_mean(1'000'000, 1'000'000, builtin::phi_over_n(), exec).mean;
    const double diag_gap = std::fabs(diag - 6.0 / (std::numbers::pi * std::numbers::pi));
    std::ostringstream csv;
    csv_header(csv, "meanvalue", meanvalue_columns());
    bool within = true;
    std::string worst;
    double worst_ratio = 0.0;
    double gap_1e6 = 0.0;
    for (const auto& spec : builtin::catalog()) {
      const auto r = theorem1_report(1'000'000, 1'000, spec, exec, ropt, &sieve);
      write_csv_row(csv, r);
      const double ratio = r.observed_gap / r.budget;
      within = within && r.observed_gap <= frozen::kMeanValueConstant * r.budget;
      if (ratio >= worst_ratio) {
        worst_ratio = ratio;
        worst = spec.name;
      }
      if (spec.name == "phi_over_n") gap_1e6 = r.observed_gap;
    }
    const auto small = theorem1_report(100'000, 1'000, builtin::phi_over_n(), exec, ropt, &sieve);
    write_csv_row(csv, small);
    out.files.push_back({"meanvalue.csv", csv.str()});
    const bool shrinks = gap_1e6 < small.observed_gap;
    add(5, "mean value", diag_gap <= 0.01 && within && shrinks,
        detail::describe("|R_f - 6/pi^2| at (1e6,1e6)", diag_gap, "<=", 0.01) +
            "; max gap/budget = " + fmt(worst_ratio) + " (" + worst + ") <= " +
            fmt(frozen::kMeanValueConstant) + ": " + fmt(within) + "; phi_over_n gap 1e6 = " + fmt(gap_1e6) +
            " < gap 1e5 = " + fmt(small.observed_gap) + ": " + fmt(shrinks));

    std::ostringstream sp;
    csv_header(sp, "seriesproduct", {"spec", "alpha", "series", "terms", "series_tail", "euler",
                                     "euler_tail", "gap", "agree", "certified"});
    bool ok = true;
    double worst_tail = 0.0;
    for (const auto& spec : builtin::catalog()) {
      for (const double alpha : {0.6, 0.8, 1.0}) {
        const auto m = predicted_main_term(spec, alpha, sieve, ropt.main_term);
        csv_row(sp, spec.name, fmt(alpha), fmt(m.series), m.terms, fmt(m.series_tail), fmt(m.euler),
                fmt(m.euler_tail), fmt(m.gap), fmt(m.agree), fmt(m.certified));
        ok = ok && m.has_euler && m.agree && m.series_tail + m.euler_tail <= 1e-6;
        worst_tail = std::max(worst_tail, m.series_tail + m.euler_tail);
      }
    }
    out.files.push_back({"series_product.csv", sp.str()});
    add(6, "series/product consistency", ok,
        "all agree within tails; " + detail::describe("max combined tail", worst_tail, "<=", 1e-6));
  }

  // 7. Erdos-Kac.
  {
    auto run = [&](std::uint64_t x, std::uint64_t y, const std::string& file) {
      const auto r = ek_report(EkConfig::make(x, y), default_t_grid(), exec);
      std::ostringstream os;
      write_csv(os, r);
      out.files.push_back({file, os.str()});
      return r.ks.sup;
    };
    const double diag7 = run(10'000'000, 10'000'000, "erdoskac_1e7_1e7.csv");
    const double fri7 = run(10'000'000, 1'000, "erdoskac_1e7_1e3.csv");
    const double diag6 = run(1'000'000, 1'000'000, "erdoskac_1e6_1e6.csv");
    add(7, "Erdos-Kac",
        diag7 <= frozen::kEkThresholdDiagonal && fri7 <= frozen::kEkThresholdFriable && diag6 > diag7,
        detail::describe("D(1e7,1e7)", diag7, "<=", frozen::kEkThresholdDiagonal) + "; " +
            detail::describe("D(1e7,1e3)", fri7, "<=", frozen::kEkThresholdFriable) + "; " +
            detail::describe("D(1e6,1e6)", diag6, ">", diag7));
  }

  // 8. Characteristic-function identity.
  {
    const auto cfg = EkConfig::make(1'000'000, 1'000'000);
    std::mt19937_64 rng(20'261'016);
    std::uniform_int_distribution<std::uint64_t> pick(1, 1'000'000);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const std::uint64_t m = pick(rng);
      for (const double theta : {0.3, 1.0}) {
        const auto lhs = f_theta_divisor_sum(m, theta, cfg.xi, cfg.Y);
        const auto rhs = std::polar(1.0, theta * omega_truncated(m, cfg.Y) / std::sqrt(cfg.xi));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    const auto ek = EkConfig::make(100'000, 1'000);
    const auto counts = omega_counts(ek, exec);
    const auto r0 = char_fn_R(counts, ek, 0.0);
    const double r0_err = std::abs(r0 - std::complex<double>(-1.0 / static_cast<double>(counts.psi), 0.0));
    add(8, "characteristic-function identity", worst <= 1e-10 && r0_err <= 1e-14,
        detail::describe("max divisor-sum error", worst, "<=", 1e-10) + "; " +
            detail::describe("|R(0) + 1/Psi|", r0_err, "<=", 1e-14));
  }

  // 9. Landreau.
  {
    const auto l = landreau_check(frozen::kLandreauN);
    std::ostringstream os;
    write_csv(os, l);
    out.files.push_back({"landreau.csv", os.str()});
    const bool golden = l.argmax == frozen::kLandreauArgmax && l.tau_n == frozen::kLandreauTau &&
                        l.denominator == frozen::kLandreauDenominator;
    add(9, "Landreau", golden && l.primes_equal_two,
        "max ratio " + std::to_string(l.tau_n) + "/" + std::to_string(l.denominator) + " at n = " +
            std::to_string(l.argmax) + " matches golden: " + fmt(golden) +
            "; ratio 2 at every prime: " + fmt(l.primes_equal_two));
  }

  std::ostringstream summary;
  csv_header(summary, "selfcheck", {"criterion", "title", "status", "detail"});
  for (const auto& c : out.criteria)
    csv_row(summary, c.id, c.title, c.pass ? "PASS" : "FAIL", "\"" + c.detail + "\"");
  out.files.insert(out.files.begin(), {"selfcheck.csv", summary.str()});
  return out;
}

inline void write_files(const std::filesystem::path& dir, const std::vector<ReportFile>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& f : files) {
    std::ofstream os(dir / f.name, std::ios::binary);
    require(bool(os), "cannot write " + (dir / f.name).string());
    os << f.content;
  }
}

inline std::string criterion_line(const CriterionResult& c) {
  return "criterion " + std::to_string(c.id) + " " + (c.pass ? "PASS" : "FAIL") + "  " + c.title + ": " +
         c.detail;
}

}  // namespace friable
