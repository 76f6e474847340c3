#pragma once

// CSV and JSON forms of the report records. Every CSV starts with the line
// "# friable-report v1 <kind>"; column orders are listed in docs/formats.md.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "friable/counting.hpp"
#include "friable/erdos_kac.hpp"
#include "friable/local_law.hpp"
#include "friable/mean_value.hpp"
#include "friable/rho.hpp"
#include "friable/saddle.hpp"

namespace friable {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "friable-report v1";

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }

inline void csv_header(std::ostream& os, const std::string& kind, const std::vector<std::string>& cols) {
  os << "# " << kFormatVersion << ' ' << kind << '\n';
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

template <class... T>
void csv_row(std::ostream& os, const T&... v) {
  bool first = true;
  ((os << (first ? "" : ",") << v, first = false), ...);
  os << '\n';
}

// JSON cannot hold inf/nan; non-finite doubles travel as strings.
inline Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(fmt(v)); }
inline double jget(const Json& j) {
  if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
  return j.get<double>();
}

// psi ------------------------------------------------------------------------

struct PsiResult {
  std::uint64_t x = 0, y = 0, q = 1;
  std::int64_t a = 0;
  std::uint64_t psi = 0, psi_coprime = 0, psi_progression = 0;

  friend bool operator==(const PsiResult&, const PsiResult&) = default;
};

inline void write_csv(std::ostream& os, const PsiResult& r) {
  csv_header(os, "psi", {"x", "y", "q", "a", "psi", "psi_coprime", "psi_progression"});
  csv_row(os, r.x, r.y, r.q, r.a, r.psi, r.psi_coprime, r.psi_progression);
}

inline Json to_json(const PsiResult& r) {
  return {{"kind", "psi"}, {"x", r.x}, {"y", r.y}, {"q", r.q}, {"a", r.a},
          {"psi", r.psi}, {"psi_coprime", r.psi_coprime}, {"psi_progression", r.psi_progression}};
}

inline void from_json(const Json& j, PsiResult& r) {
  r.x = j.at("x");
  r.y = j.at("y");
  r.q = j.at("q");
  r.a = j.at("a");
  r.psi = j.at("psi");
  r.psi_coprime = j.at("psi_coprime");
  r.psi_progression = j.at("psi_progression");
}

// discrepancy ----------------------------------------------------------------

inline void write_csv(std::ostream& os, const DiscrepancyReport& r) {
  os << "# " << kFormatVersion << " discrepancy\n";
  os << "# x=" << r.x << " y=" << r.y << " Q=" << r.Q << " psi=" << r.psi << " weight=" << r.weight_name
     << " delta=" << fmt(r.delta) << " weighted_total=" << fmt(r.weighted_total) << '\n';
  os << "q,psi_one_mod_q,psi_coprime,expected,abs_gap,max_gap,weight\n";
  for (const auto& row : r.rows)
    csv_row(os, row.q, row.psi_one_mod_q, row.psi_coprime, fmt(row.expected), fmt(row.abs_gap),
            fmt(row.max_gap), fmt(row.weight));
}

inline Json to_json(const DiscrepancyReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"q", row.q}, {"psi_one_mod_q", row.psi_one_mod_q}, {"psi_coprime", row.psi_coprime},
                    {"expected", row.expected}, {"abs_gap", row.abs_gap}, {"max_gap", row.max_gap},
                    {"weight", row.weight}});
  return {{"kind", "discrepancy"}, {"x", r.x}, {"y", r.y}, {"Q", r.Q}, {"psi", r.psi},
          {"weight", r.weight_name}, {"delta", r.delta}, {"weighted_total", r.weighted_total},
          {"rows", rows}};
}

inline void from_json(const Json& j, DiscrepancyReport& r) {
  r.x = j.at("x");
  r.y = j.at("y");
  r.Q = j.at("Q");
  r.psi = j.at("psi");
  r.weight_name = j.at("weight");
  r.delta = j.at("delta");
  r.weighted_total = j.at("weighted_total");
  r.rows.clear();
  for (const auto& e : j.at("rows")) {
    DiscrepancyRow row;
    row.q = e.at("q");
    row.psi_one_mod_q = e.at("psi_one_mod_q");
    row.psi_coprime = e.at("psi_coprime");
    row.expected = e.at("expected");
    row.abs_gap = e.at("abs_gap");
    row.max_gap = e.at("max_gap");
    row.weight = e.at("weight");
    r.rows.push_back(row);
  }
}

// alpha ----------------------------------------------------------------------

inline void write_csv(std::ostream& os, const AlphaGap& g) {
  csv_header(os, "alpha", {"log_x", "y", "alpha", "residual", "primes_used", "one_minus_alpha",
                           "log_u1_over_log_y", "ratio", "in_regime"});
  csv_row(os, fmt(g.saddle.log_x), g.saddle.y, fmt(g.saddle.alpha), fmt(g.saddle.residual),
          g.saddle.primes_used, fmt(g.one_minus_alpha), fmt(g.log_u1_over_log_y), fmt(g.ratio),
          fmt(g.in_regime));
}

inline Json to_json(const AlphaGap& g) {
  return {{"kind", "alpha"}, {"log_x", g.saddle.log_x}, {"y", g.saddle.y}, {"alpha", g.saddle.alpha},
          {"residual", g.saddle.residual}, {"primes_used", g.saddle.primes_used},
          {"one_minus_alpha", g.one_minus_alpha}, {"log_u1_over_log_y", g.log_u1_over_log_y},
          {"ratio", g.ratio}, {"in_regime", g.in_regime}};
}

inline void from_json(const Json& j, AlphaGap& g) {
  g.saddle.log_x = j.at("log_x");
  g.saddle.y = j.at("y");
  g.saddle.alpha = j.at("alpha");
  g.saddle.residual = j.at("residual");
  g.saddle.primes_used = j.at("primes_used");
  g.one_minus_alpha = j.at("one_minus_alpha");
  g.log_u1_over_log_y = j.at("log_u1_over_log_y");
  g.ratio = j.at("ratio");
  g.in_regime = j.at("in_regime");
}

inline bool operator==(const AlphaGap& a, const AlphaGap& b) {
  return a.saddle.log_x == b.saddle.log_x && a.saddle.y == b.saddle.y && a.saddle.alpha == b.saddle.alpha &&
         a.saddle.residual == b.saddle.residual && a.saddle.primes_used == b.saddle.primes_used &&
         a.one_minus_alpha == b.one_minus_alpha && a.log_u1_over_log_y == b.log_u1_over_log_y &&
         a.ratio == b.ratio && a.in_regime == b.in_regime;
}

// local law ------------------------------------------------------------------

inline void write_csv(std::ostream& os, const LocalLawReport& r) {
  csv_header(os, "locallaw", {"x", "y", "m", "m_friable", "alpha", "g_m_alpha", "psi", "psi_m", "ratio",
                              "gamma_m", "e_m_bracket"});
  csv_row(os, r.x, r.y, r.m, r.m_friable, fmt(r.alpha), fmt(r.g_m_alpha), r.psi, r.psi_m, fmt(r.ratio),
          fmt(r.gamma_m), fmt(r.e_m_bracket));
}

// mean value -----------------------------------------------------------------

inline Json to_json(const MainTerm& m) {
  return {{"alpha", m.alpha}, {"series", m.series}, {"terms", m.terms},
          {"series_tail", jnum(m.series_tail)}, {"tail_method", m.tail_method}, {"cap_hit", m.cap_hit},
          {"has_euler", m.has_euler}, {"euler", m.euler}, {"euler_prime_limit", m.euler_prime_limit},
          {"euler_tail", jnum(m.euler_tail)}, {"gap", m.gap}, {"agree", m.agree},
          {"certified", m.certified}};
}

inline void from_json(const Json& j, MainTerm& m) {
  m.alpha = j.at("alpha");
  m.series = j.at("series");
  m.terms = j.at("terms");
  m.series_tail = jget(j.at("series_tail"));
  m.tail_method = j.at("tail_method");
  m.cap_hit = j.at("cap_hit");
  m.has_euler = j.at("has_euler");
  m.euler = j.at("euler");
  m.euler_prime_limit = j.at("euler_prime_limit");
  m.euler_tail = jget(j.at("euler_tail"));
  m.gap = j.at("gap");
  m.agree = j.at("agree");
  m.certified = j.at("certified");
}

inline bool operator==(const MainTerm& a, const MainTerm& b) {
  return a.alpha == b.alpha && a.series == b.series && a.terms == b.terms &&
         a.series_tail == b.series_tail && a.tail_method == b.tail_method && a.cap_hit == b.cap_hit &&
         a.has_euler == b.has_euler && a.euler == b.euler && a.euler_prime_limit == b.euler_prime_limit &&
         a.euler_tail == b.euler_tail && a.gap == b.gap && a.agree == b.agree && a.certified == b.certified;
}

inline const std::vector<std::string>& meanvalue_columns() {
  static const std::vector<std::string> cols = {
      "spec", "x", "y", "u", "alpha", "psi", "empirical",
      "predicted_alpha", "series_tail_alpha", "terms_alpha", "euler_alpha", "euler_tail_alpha",
      "certified_alpha", "predicted_one", "series_tail_one", "euler_one", "certified_one",
      "truncation_Q", "budget", "observed_gap", "alpha_vs_one_gap", "log_u1_over_log_y", "regime_c",
      "in_regime"};
  return cols;
}

inline void write_csv_row(std::ostream& os, const MeanValueReport& r) {
  csv_row(os, r.spec, r.x, r.y, fmt(r.u), fmt(r.alpha), r.psi, fmt(r.empirical), fmt(r.at_alpha.series),
          fmt(r.at_alpha.series_tail), r.at_alpha.terms, fmt(r.at_alpha.euler), fmt(r.at_alpha.euler_tail),
          fmt(r.at_alpha.certified), fmt(r.at_one.series), fmt(r.at_one.series_tail), fmt(r.at_one.euler),
          fmt(r.at_one.certified), r.truncation_Q, fmt(r.budget), fmt(r.observed_gap),
          fmt(r.alpha_vs_one_gap), fmt(r.log_u1_over_log_y), fmt(r.regime_c), fmt(r.in_regime));
}

inline void write_csv(std::ostream& os, const MeanValueReport& r) {
  csv_header(os, "meanvalue", meanvalue_columns());
  write_csv_row(os, r);
}

inline Json to_json(const MeanValueReport& r) {
  return {{"kind", "meanvalue"}, {"spec", r.spec}, {"x", r.x}, {"y", r.y}, {"u", r.u},
          {"alpha", r.alpha}, {"psi", r.psi}, {"empirical", r.empirical},
          {"at_alpha", to_json(r.at_alpha)}, {"at_one", to_json(r.at_one)},
          {"truncation_Q", r.truncation_Q}, {"budget", r.budget}, {"observed_gap", r.observed_gap},
          {"alpha_vs_one_gap", r.alpha_vs_one_gap}, {"log_u1_over_log_y", r.log_u1_over_log_y},
          {"regime_c", r.regime_c}, {"in_regime", r.in_regime}};
}

inline void from_json(const Json& j, MeanValueReport& r) {
  r.spec = j.at("spec");
  r.x = j.at("x");
  r.y = j.at("y");
  r.u = j.at("u");
  r.alpha = j.at("alpha");
  r.psi = j.at("psi");
  r.empirical = j.at("empirical");
  from_json(j.at("at_alpha"), r.at_alpha);
  from_json(j.at("at_one"), r.at_one);
  r.at_alpha.spec = r.at_one.spec = r.spec;
  r.truncation_Q = j.at("truncation_Q");
  r.budget = j.at("budget");
  r.observed_gap = j.at("observed_gap");
  r.alpha_vs_one_gap = j.at("alpha_vs_one_gap");
  r.log_u1_over_log_y = j.at("log_u1_over_log_y");
  r.regime_c = j.at("regime_c");
  r.in_regime = j.at("in_regime");
}

inline bool operator==(const MeanValueReport& a, const MeanValueReport& b) {
  return a.spec == b.spec && a.x == b.x && a.y == b.y && a.u == b.u && a.alpha == b.alpha &&
         a.psi == b.psi && a.empirical == b.empirical && a.at_alpha == b.at_alpha && a.at_one == b.at_one &&
         a.truncation_Q == b.truncation_Q && a.budget == b.budget && a.observed_gap == b.observed_gap &&
         a.alpha_vs_one_gap == b.alpha_vs_one_gap && a.log_u1_over_log_y == b.log_u1_over_log_y &&
         a.regime_c == b.regime_c && a.in_regime == b.in_regime;
}

// erdos-kac ------------------------------------------------------------------

inline void write_csv(std::ostream& os, const EkReport& r) {
  os << "# " << kFormatVersion << " erdoskac\n";
  os << "# x=" << r.x << " y=" << r.y << " c_Y=" << fmt(r.c_Y) << " Y=" << fmt(r.Y) << " xi=" << fmt(r.xi)
     << " psi=" << r.psi << " discrepancy=" << fmt(r.ks.sup)
     << " berry_esseen=" << fmt(r.berry_esseen.value) << " budget=" << fmt(r.budget) << '\n';
  os << "t,empirical_cdf,phi,gap\n";
  for (const auto& g : r.grid) csv_row(os, fmt(g.t), fmt(g.empirical), fmt(g.phi), fmt(g.gap));
}

inline Json to_json(const EkReport& r) {
  Json grid = Json::array();
  for (const auto& g : r.grid)
    grid.push_back({{"t", g.t}, {"empirical_cdf", g.empirical}, {"phi", g.phi}, {"gap", g.gap}});
  return {{"kind", "erdoskac"}, {"x", r.x}, {"y", r.y}, {"c_Y", r.c_Y}, {"Y", r.Y}, {"xi", r.xi},
          {"psi", r.psi},
          {"discrepancy", {{"sup", r.ks.sup}, {"t", jnum(r.ks.t_at)}, {"left_limit", r.ks.left_limit},
                           {"degenerate", r.ks.degenerate}}},
          {"moments", {{"omega_mean", r.omega_mean}, {"omega_variance", r.omega_variance},
                       {"omega_Y_sum", r.truncated.sum}, {"omega_Y_sum_sq", r.truncated.sum_sq},
                       {"omega_Y_mean", r.truncated.mean}, {"omega_Y_variance", r.truncated.variance},
                       {"omega_Y_centered", r.truncated.centered}}},
          {"berry_esseen_bound", {{"value", r.berry_esseen.value}, {"head", r.berry_esseen.head},
                                  {"integral", r.berry_esseen.integral}, {"panels", r.berry_esseen.panels},
                                  {"last_change", r.berry_esseen.last_change}}},
          {"budget", r.budget}, {"grid", grid}};
}

inline void from_json(const Json& j, EkReport& r) {
  r.x = j.at("x");
  r.y = j.at("y");
  r.c_Y = j.at("c_Y");
  r.Y = j.at("Y");
  r.xi = j.at("xi");
  r.psi = j.at("psi");
  const auto& d = j.at("discrepancy");
  r.ks.sup = d.at("sup");
  r.ks.t_at = jget(d.at("t"));
  r.ks.left_limit = d.at("left_limit");
  r.ks.degenerate = d.at("degenerate");
  const auto& m = j.at("moments");
  r.omega_mean = m.at("omega_mean");
  r.omega_variance = m.at("omega_variance");
  r.truncated.sum = m.at("omega_Y_sum");
  r.truncated.sum_sq = m.at("omega_Y_sum_sq");
  r.truncated.mean = m.at("omega_Y_mean");
  r.truncated.variance = m.at("omega_Y_variance");
  r.truncated.centered = m.at("omega_Y_centered");
  const auto& b = j.at("berry_esseen_bound");
  r.berry_esseen.value = b.at("value");
  r.berry_esseen.head = b.at("head");
  r.berry_esseen.integral = b.at("integral");
  r.berry_esseen.panels = b.at("panels");
  r.berry_esseen.last_change = b.at("last_change");
  r.budget = j.at("budget");
  r.grid.clear();
  for (const auto& g : j.at("grid")) r.grid.push_back({g.at("t"), g.at("empirical_cdf"), g.at("phi"), g.at("gap")});
}

inline bool operator==(const EkReport& a, const EkReport& b) {
  auto grid_eq = [&] {
    if (a.grid.size() != b.grid.size()) return false;
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      if (a.grid[i].t != b.grid[i].t || a.grid[i].empirical != b.grid[i].empirical ||
          a.grid[i].phi != b.grid[i].phi || a.grid[i].gap != b.grid[i].gap)
        return false;
    return true;
  };
  return a.x == b.x && a.y == b.y && a.c_Y == b.c_Y && a.Y == b.Y && a.xi == b.xi && a.psi == b.psi &&
         a.ks.sup == b.ks.sup && a.ks.t_at == b.ks.t_at && a.ks.left_limit == b.ks.left_limit &&
         a.ks.degenerate == b.ks.degenerate && a.omega_mean == b.omega_mean &&
         a.omega_variance == b.omega_variance && a.truncated.sum == b.truncated.sum &&
         a.truncated.sum_sq == b.truncated.sum_sq && a.truncated.mean == b.truncated.mean &&
         a.truncated.variance == b.truncated.variance && a.truncated.centered == b.truncated.centered &&
         a.berry_esseen.value == b.berry_esseen.value && a.berry_esseen.head == b.berry_esseen.head &&
         a.berry_esseen.integral == b.berry_esseen.integral && a.berry_esseen.panels == b.berry_esseen.panels &&
         a.berry_esseen.last_change == b.berry_esseen.last_change && a.budget == b.budget && grid_eq();
}

// landreau -------------------------------------------------------------------

inline void write_csv(std::ostream& os, const LandreauResult& r) {
  csv_header(os, "landreau", {"N", "max_ratio", "argmax", "tau_n", "denominator", "primes_equal_two"});
  csv_row(os, r.N, fmt(r.max_ratio), r.argmax, r.tau_n, r.denominator, fmt(r.primes_equal_two));
}

inline Json to_json(const LandreauResult& r) {
  return {{"kind", "landreau"}, {"N", r.N}, {"max_ratio", r.max_ratio}, {"argmax", r.argmax},
          {"tau_n", r.tau_n}, {"denominator", r.denominator}, {"primes_equal_two", r.primes_equal_two}};
}

// rho ------------------------------------------------------------------------

inline Json to_json(const RhoTable& t, std::size_t stride) {
  Json u = Json::array(), v = Json::array();
  for (std::size_t j = 0; j < t.size(); j += std::max<std::size_t>(stride, 1)) {
    u.push_back(t.node(j));
    v.push_back(t.node_value(j));
  }
  return {{"kind", "rho"}, {"u_max", t.u_max()}, {"steps_per_unit", t.steps_per_unit()},
          {"tolerance", t.tolerance()}, {"convergence_gap", t.convergence_gap()},
          {"underflow_u", jnum(t.underflow_u())}, {"u", u}, {"rho", v}};
}

}  // namespace friable
