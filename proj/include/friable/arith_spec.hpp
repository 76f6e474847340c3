#pragma once

// Arithmetic functions f and their Moebius transforms lambda = f * mu, with
// the growth budget sum_q |lambda(q)| / q^(1 - beta) <= B.

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "friable/common.hpp"
#include "friable/factor.hpp"

namespace friable {

/// lambda(p^nu) = coef * p^(p_per_nu * nu + p_const) * (p - 1)^pm1 for
/// nu in [nu_min, nu_max] (nu_max = 0 means unbounded).
struct PrimePowerRule {
  std::uint32_t nu_min = 1;
  std::uint32_t nu_max = 0;
  double coef = 1.0;
  std::string coef_text = "1";
  int p_per_nu = 0;
  int p_const = 0;
  int pm1 = 0;

  bool matches(std::uint32_t nu) const { return nu >= nu_min && (nu_max == 0 || nu <= nu_max); }

  double value(std::uint64_t p, std::uint32_t nu) const {
    const double pd = static_cast<double>(p);
    return coef * std::pow(pd, p_per_nu * static_cast<int>(nu) + p_const) * std::pow(pd - 1.0, pm1);
  }

  // |value| <= magnitude() * p^(p_per_nu nu + exponent_shift()), using
  // (p - 1)^k <= p^k for k >= 0 and (p - 1)^k <= 2^-k p^k for k < 0.
  double magnitude() const { return std::fabs(coef) * std::pow(2.0, std::max(0, -pm1)); }
  int exponent_shift() const { return p_const + pm1; }
};

enum class SpecMode {
  kDirectF,            // f given on all n; lambda by divisor sums
  kLambdaPrimePowers,  // multiplicative, lambda(p^nu) by rules
  kMultiplicativeF,    // multiplicative, f(p^nu) by a callable
};

inline std::string to_string(SpecMode m) {
  switch (m) {
    case SpecMode::kDirectF: return "direct-f";
    case SpecMode::kLambdaPrimePowers: return "lambda-at-prime-powers";
    case SpecMode::kMultiplicativeF: return "multiplicative-f-at-prime-powers";
  }
  return "?";
}

class ArithmeticFunctionSpec {
 public:
  std::string name;
  SpecMode mode = SpecMode::kLambdaPrimePowers;
  double B = 1.0;
  double beta = 1.0;
  std::vector<PrimePowerRule> rules;                         // kLambdaPrimePowers
  std::function<double(std::uint64_t)> direct_f;             // kDirectF
  std::function<double(std::uint64_t, std::uint32_t)> f_pp;  // kMultiplicativeF

  bool multiplicative() const { return mode != SpecMode::kDirectF; }

  void validate() const {
    require(B > 0.0, "spec '" + name + "': B must be > 0");
    require(beta > 0.0 && beta <= 1.0, "spec '" + name + "': beta must lie in (0, 1]");
    if (mode == SpecMode::kDirectF) require(bool(direct_f), "spec '" + name + "': missing f");
    if (mode == SpecMode::kMultiplicativeF) require(bool(f_pp), "spec '" + name + "': missing f(p^nu)");
  }

  /// lambda(p^nu), nu >= 1, for multiplicative specs.
  double lambda_prime_power(std::uint64_t p, std::uint32_t nu) const {
    switch (mode) {
      case SpecMode::kLambdaPrimePowers:
        for (const auto& r : rules)
          if (r.matches(nu)) return r.value(p, nu);
        return 0.0;
      case SpecMode::kMultiplicativeF:
        return f_pp(p, nu) - (nu == 1 ? 1.0 : f_pp(p, nu - 1));
      case SpecMode::kDirectF:
        break;
    }
    throw InputError("lambda_prime_power: spec '" + name + "' is not multiplicative");
  }

  /// f(p^nu) = sum_{j <= nu} lambda(p^j).
  double f_prime_power(std::uint64_t p, std::uint32_t nu) const {
    if (mode == SpecMode::kMultiplicativeF) return f_pp(p, nu);
    double s = 1.0;
    for (std::uint32_t j = 1; j <= nu; ++j) s += lambda_prime_power(p, j);
    return s;
  }

  /// f(n) from the factorization of n.
  double f(const Factorization& n) const {
    if (mode == SpecMode::kDirectF) return direct_f(n.value());
    double v = 1.0;
    for (const auto& [p, nu] : n) v *= f_prime_power(p, nu);
    return v;
  }

  /// lambda(n) for multiplicative specs.
  double lambda(const Factorization& n) const {
    double v = 1.0;
    for (const auto& [p, nu] : n) {
      v *= lambda_prime_power(p, nu);
      if (v == 0.0) break;
    }
    return v;
  }

  // Upper bound for sum_{nu >= nu_from} |lambda(p^nu)| p^(-s nu), valid for
  // every prime p >= p_min, written as K * p^E. Returns K = inf when the rule
  // set does not converge at this s.
  struct PowerBound {
    double K = 0.0;
    double E = -std::numeric_limits<double>::infinity();
  };
  PowerBound abs_lambda_tail(double s, std::uint32_t nu_from, double p_min) const {
    PowerBound out;
    for (const auto& r : rules) {
      if (r.coef == 0.0) continue;
      const std::uint32_t a = std::max(r.nu_min, nu_from);
      if (r.nu_max != 0 && a > r.nu_max) continue;
      const double c = r.p_per_nu - s;  // exponent per nu
      double k = r.magnitude();
      double e = 0.0;
      if (c < 0.0) {
        e = r.exponent_shift() + c * a;
        k /= 1.0 - std::pow(p_min, c);  // geometric over nu >= a
      } else if (r.nu_max != 0) {
        e = r.exponent_shift() + c * r.nu_max;
        k *= static_cast<double>(r.nu_max - a + 1);
      } else {
        return {std::numeric_limits<double>::infinity(), 0.0};
      }
      // Merge K1 p^E1 + K2 p^E2 <= (K1 + K2) p^max(E1, E2) for p >= 1.
      out.K += k;
      out.E = std::max(out.E, e);
    }
    if (out.K == 0.0) out.E = -std::numeric_limits<double>::infinity();
    return out;
  }
};

/// lambda(n) = sum_{d | n} f(d) mu(n / d) for an arbitrary f.
inline double lambda_from_f(const std::function<double(std::uint64_t)>& f, const Factorization& n) {
  // Only squarefree n/d contribute: d = n / r with r | rad(n).
  const auto& pairs = n.pairs();
  const std::uint64_t value = n.value();
  CompensatedSum s;
  const std::size_t k = pairs.size();
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    std::uint64_t r = 1;
    int sign = 1;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1ULL << i)) {
        r *= pairs[i].prime;
        sign = -sign;
      }
    s.add(sign * f(value / r));
  }
  return s.value();
}

/// lambda = f * mu for every n in [1, limit] by a Dirichlet-convolution sieve.
inline std::vector<double> lambda_table(const std::function<double(std::uint64_t)>& f,
                                        std::uint64_t limit) {
  require(limit <= 10'000'000, "lambda_table: limit above 1e7");
  std::vector<int> mu(limit + 1, 1);
  {
    std::vector<std::uint8_t> composite(limit + 1, 0);
    for (std::uint64_t p = 2; p <= limit; ++p) {
      if (composite[p]) continue;
      for (std::uint64_t m = p; m <= limit; m += p) {
        if (m > p) composite[m] = 1;
        mu[m] = -mu[m];
      }
      for (std::uint64_t m = p * p; m <= limit; m += p * p) mu[m] = 0;
    }
  }
  std::vector<double> fv(limit + 1, 0.0), lam(limit + 1, 0.0);
  for (std::uint64_t n = 1; n <= limit; ++n) fv[n] = f(n);
  for (std::uint64_t d = 1; d <= limit; ++d) {
    if (fv[d] == 0.0) continue;
    for (std::uint64_t m = d, k = 1; m <= limit; m += d, ++k)
      if (mu[k] != 0) lam[m] += mu[k] * fv[d];
  }
  return lam;
}

namespace builtin {

inline ArithmeticFunctionSpec one() {
  ArithmeticFunctionSpec s;
  s.name = "one";
  s.B = 1.0;
  s.beta = 1.0;
  return s;
}

/// f(n) = phi(n)/n: lambda(p) = -1/p, lambda(p^nu) = 0 for nu >= 2.
inline ArithmeticFunctionSpec phi_over_n() {
  ArithmeticFunctionSpec s;
  s.name = "phi_over_n";
  s.B = 2.2;  // prod_p (1 + p^-3/2) = zeta(3/2)/zeta(3) = 2.1732...
  s.beta = 0.5;
  s.rules.push_back({1, 1, -1.0, "-1", -1, 0, 0});
  return s;
}

/// f(n) = sigma(n)/n: lambda(p^nu) = p^-nu.
inline ArithmeticFunctionSpec sigma_over_n() {
  ArithmeticFunctionSpec s;
  s.name = "sigma_over_n";
  s.B = 2.7;  // zeta(3/2) = 2.6124...
  s.beta = 0.5;
  s.rules.push_back({1, 0, 1.0, "1", -1, 0, 0});
  return s;
}

/// f(n) = n/phi(n): lambda(p) = 1/(p - 1), lambda(p^nu) = 0 for nu >= 2.
inline ArithmeticFunctionSpec n_over_phi() {
  ArithmeticFunctionSpec s;
  s.name = "n_over_phi";
  s.B = 3.1;  // prod_p (1 + 1/((p - 1) sqrt p)) = 3.0716...
  s.beta = 0.5;
  s.rules.push_back({1, 1, 1.0, "1", 0, 0, -1});
  return s;
}

inline std::vector<ArithmeticFunctionSpec> catalog() {
  return {one(), phi_over_n(), sigma_over_n(), n_over_phi()};
}

}  // namespace builtin

inline ArithmeticFunctionSpec builtin_spec(const std::string& name) {
  for (auto& s : builtin::catalog())
    if (s.name == name) return s;
  throw InputError("unknown built-in function '" + name +
                   "' (expected one, phi_over_n, sigma_over_n, n_over_phi)");
}

namespace detail {

inline double parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      require(used == text.size(), "bad number '" + text + "'");
      return v;
    }
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    const double num = std::stod(a, &used);
    require(used == a.size(), "bad numerator in '" + text + "'");
    const double den = std::stod(b, &used);
    require(used == b.size() && den != 0.0, "bad denominator in '" + text + "'");
    return num / den;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("bad number '" + text + "'");
  }
}

inline int parse_int(const std::string& text) {
  std::size_t used = 0;
  try {
    const int v = std::stoi(text, &used);
    require(used == text.size(), "bad integer '" + text + "'");
    return v;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("bad integer '" + text + "'");
  }
}

}  // namespace detail

/// Parses the plain-text spec format (see docs/spec-files.md).
inline ArithmeticFunctionSpec parse_spec(std::istream& in) {
  ArithmeticFunctionSpec spec;
  bool have_builtin = false, have_rules = false, have_B = false, have_beta = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw InputError("spec line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "rule") {
      PrimePowerRule r;
      bool have_nu = false;
      std::string tok;
      while (ls >> tok) {
        if (tok.rfind("nu>=", 0) == 0) {
          r.nu_min = static_cast<std::uint32_t>(detail::parse_int(tok.substr(4)));
          r.nu_max = 0;
          have_nu = true;
          continue;
        }
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "nu") {
            r.nu_min = r.nu_max = static_cast<std::uint32_t>(detail::parse_int(val));
            have_nu = true;
          } else if (key == "coef") {
            r.coef = detail::parse_rational(val);
            r.coef_text = val;
          } else if (key == "p_nu") {
            r.p_per_nu = detail::parse_int(val);
          } else if (key == "p") {
            r.p_const = detail::parse_int(val);
          } else if (key == "pm1") {
            r.pm1 = detail::parse_int(val);
          } else {
            fail("unknown rule key '" + key + "'");
          }
        } catch (const InputError& e) {
          fail(e.what());
        }
      }
      if (!have_nu) fail("rule needs nu=k or nu>=k");
      if (r.nu_min < 1) fail("nu must be >= 1");
      spec.rules.push_back(r);
      have_rules = true;
      continue;
    }
    std::string eq, value;
    if (!(ls >> eq) || eq != "=" || !(ls >> value)) fail("expected '<key> = <value>'");
    try {
      if (head == "name") {
        spec.name = value;
      } else if (head == "builtin") {
        const auto keep_name = spec.name;
        const auto keep_B = spec.B, keep_beta = spec.beta;
        spec = builtin_spec(value);
        if (!keep_name.empty()) spec.name = keep_name;
        if (have_B) spec.B = keep_B;
        if (have_beta) spec.beta = keep_beta;
        have_builtin = true;
      } else if (head == "B") {
        spec.B = detail::parse_rational(value);
        have_B = true;
      } else if (head == "beta") {
        spec.beta = detail::parse_rational(value);
        have_beta = true;
      } else {
        fail("unknown key '" + head + "'");
      }
    } catch (const InputError& e) {
      if (std::string(e.what()).rfind("spec line", 0) == 0) throw;
      fail(e.what());
    }
  }
  if (have_builtin && have_rules) throw InputError("spec: 'builtin' and 'rule' lines are exclusive");
  if (!have_builtin) {
    if (!have_B || !have_beta) throw InputError("spec: B and beta are required");
    spec.mode = SpecMode::kLambdaPrimePowers;
    if (spec.name.empty()) spec.name = "custom";
  }
  spec.validate();
  return spec;
}

inline ArithmeticFunctionSpec parse_spec(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

}  // namespace friable
