#pragma once

#include <cmath>
#include <cstdint>

#include "friable/counting.hpp"
#include "friable/saddle.hpp"

namespace friable {

struct LocalLawReport {
  std::uint64_t x = 0, y = 0;
  std::uint64_t m = 0;         // as given
  std::uint64_t m_friable = 0; // m_y, the part that matters
  double alpha = 0.0;
  double g_m_alpha = 0.0;
  std::uint64_t psi = 0;
  std::uint64_t psi_m = 0;
  double ratio = 0.0;        // Psi_m / (g_m(alpha) Psi)
  double gamma_m = 0.0;      // log(omega(m) + 2) log(u + 1) / log y
  double e_m_bracket = 0.0;  // (exp(2 gamma_m) - 1) / log u; +inf at u = 1
};

/// Measured Psi_m(x, y) against Psi(x, y) g_m(alpha). The E_m column is the
/// bracketed expression only; no implied constant is attached.
inline LocalLawReport local_law_report(std::uint64_t x, std::uint64_t y, std::uint64_t m,
                                       const Executor& exec = Executor::serial()) {
  require(x >= 3, "local_law_report: x must be >= 3");
  require(m >= 1, "local_law_report: m must be >= 1");
  LocalLawReport r;
  r.x = x;
  r.y = y;
  r.m = m;
  const auto mf = factorize_trial(friable_part(m, y));
  r.m_friable = mf.value();
  r.alpha = solve_alpha(static_cast<double>(x), y).alpha;
  r.g_m_alpha = g_q(mf, r.alpha);
  r.psi = psi(x, y, exec);
  r.psi_m = r.m_friable == 1 ? r.psi : psi_coprime(x, y, r.m_friable, exec);
  r.ratio = static_cast<double>(r.psi_m) / (r.g_m_alpha * static_cast<double>(r.psi));
  const double ly = std::log(static_cast<double>(y));
  const double u = std::log(static_cast<double>(x)) / ly;
  r.gamma_m = std::log(static_cast<double>(mf.size()) + 2.0) * std::log(u + 1.0) / ly;
  r.e_m_bracket = std::expm1(2.0 * r.gamma_m) / std::log(u);
  return r;
}

}  // namespace friable
