// friable: command-line front end for the friable library.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "friable/arith_spec.hpp"
#include "friable/counting.hpp"
#include "friable/erdos_kac.hpp"
#include "friable/executor.hpp"
#include "friable/local_law.hpp"
#include "friable/mean_value.hpp"
#include "friable/report_io.hpp"
#include "friable/rho.hpp"
#include "friable/saddle.hpp"
#include "friable/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace friable;

namespace {

constexpr const char* kOutDirEnv = "FRIABLE_OUT_DIR";

// Exact integer from "123", "1e6" or "2.5e3"; fractional values are rejected.
// Values are returned as decimal digit strings so 1e20 survives.
std::string integer_digits(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)(?:\.(\d*))?(?:[eE]\+?(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw InputError("'" + text + "' is not a nonnegative integer");
  std::string whole = m[1], frac = m[2];
  const int exp = m[3].matched ? std::stoi(m[3]) : 0;
  if (exp > 40) throw InputError("'" + text + "' is too large");
  for (int i = 0; i < exp; ++i) {
    if (!frac.empty()) {
      whole += frac[0];
      frac.erase(0, 1);
    } else {
      whole += '0';
    }
  }
  if (frac.find_first_not_of('0') != std::string::npos)
    throw InputError("'" + text + "' is not an integer (fractional values are rejected)");
  const auto nz = whole.find_first_not_of('0');
  return nz == std::string::npos ? "0" : whole.substr(nz);
}

std::uint64_t parse_count(const std::string& text) {
  const std::string d = integer_digits(text);
  if (d.size() > 20 || (d.size() == 20 && d > "18446744073709551615"))
    throw InputError("'" + text + "' exceeds 64 bits");
  return std::stoull(d);
}

// For alpha, where x may exceed 64 bits: the integer as a double.
double parse_large(const std::string& text) { return std::stod(integer_digits(text)); }

std::int64_t parse_signed(const std::string& text) {
  if (!text.empty() && text[0] == '-') return -static_cast<std::int64_t>(parse_count(text.substr(1)));
  return static_cast<std::int64_t>(parse_count(text));
}

struct Common {
  unsigned threads = 1;
  std::string format = "text";
  std::string out;
};

// Destination for a report of the given kind: --out, else $FRIABLE_OUT_DIR/<kind>.<ext>,
// else stdout.
void emit(const Common& c, const std::string& kind, const std::string& body) {
  std::string path = c.out;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir && c.format != "text") {
      fs::create_directories(dir);
      path = (fs::path(dir) / (kind + "." + c.format)).string();
    }
  }
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os << body;
  std::cerr << "wrote " << path << '\n';
}

template <class R>
std::string render(const Common& c, const R& report) {
  std::ostringstream os;
  if (c.format == "json")
    os << to_json(report).dump(2) << '\n';
  else
    write_csv(os, report);
  return os.str();
}

ArithmeticFunctionSpec load_spec(const std::string& name) {
  if (fs::exists(name)) {
    std::ifstream in(name);
    return parse_spec(in);
  }
  return builtin_spec(name);
}

NamedWeight load_weight(const std::string& name) {
  if (name == "one") return unit_weight();
  if (name == "tau3") return tau_cubed_weight();
  return lambda_weight(load_spec(name));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"friable: friable-number statistics against their analytic predictions"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--format", common.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--out", common.out, "output file (selfcheck: directory)");

  std::string x_text, y_text, q_text = "1", a_text = "0", Q_text, n_text;
  std::string spec_name = "phi_over_n", weight_name = "one";
  double tol = 0.0, u_max = 50.0, c_Y = 2.0, regime_c = 3.0, t_min = -3.0, t_max = 3.0, t_step = 0.25;
  std::size_t stride = 100;
  std::string method = "newton";
  std::uint64_t cap = kSeriesCap;

  auto* psi_cmd = app.add_subcommand("psi", "Psi(x,y), Psi_q(x,y) and Psi(x,y;a,q)");
  psi_cmd->add_option("--x", x_text)->required();
  psi_cmd->add_option("--y", y_text)->required();
  psi_cmd->add_option("--q", q_text);
  psi_cmd->add_option("--a", a_text);

  auto* disc_cmd = app.add_subcommand("discrepancy", "Delta(x,y;Q) and the weighted max-over-a sum");
  disc_cmd->add_option("--x", x_text)->required();
  disc_cmd->add_option("--y", y_text)->required();
  disc_cmd->add_option("--Q", Q_text)->required();
  disc_cmd->add_option("--weight", weight_name, "one, tau3, a built-in spec or a spec file");

  auto* rho_cmd = app.add_subcommand("rho", "Dickman rho table");
  rho_cmd->add_option("--u-max", u_max);
  rho_cmd->add_option("--tol", tol);
  rho_cmd->add_option("--stride", stride, "emit every stride-th grid node");
  std::string u_text;
  rho_cmd->add_option("--u", u_text, "evaluate at one point instead");

  auto* alpha_cmd = app.add_subcommand("alpha", "saddle point alpha(x,y)");
  alpha_cmd->add_option("--x", x_text)->required();
  alpha_cmd->add_option("--y", y_text)->required();
  alpha_cmd->add_option("--tol", tol);
  alpha_cmd->add_option("--method", method)->check(CLI::IsMember({"newton", "bisection"}));

  auto* ll_cmd = app.add_subcommand("locallaw", "Psi_m(x,y) against g_m(alpha) Psi(x,y)");
  ll_cmd->add_option("--x", x_text)->required();
  ll_cmd->add_option("--y", y_text)->required();
  ll_cmd->add_option("--m", n_text)->required();

  auto* mv_cmd = app.add_subcommand("meanvalue", "mean of f(n-1) over friable n against the main term");
  mv_cmd->add_option("--x", x_text)->required();
  mv_cmd->add_option("--y", y_text)->required();
  mv_cmd->add_option("--f", spec_name, "built-in name or spec file");
  mv_cmd->add_option("--c", regime_c, "regime exponent: flag (log x)^c <= y");
  mv_cmd->add_option("--cap", cap, "series term cap")->check(CLI::Range(std::uint64_t{1}, kSeriesCap));

  auto* ek_cmd = app.add_subcommand("erdoskac", "distribution of omega(n-1) over friable n");
  ek_cmd->add_option("--x", x_text)->required();
  ek_cmd->add_option("--y", y_text)->required();
  ek_cmd->add_option("--cY", c_Y, "exponent c in Y = exp(log x/(log log x)^c)");
  ek_cmd->add_option("--t-min", t_min);
  ek_cmd->add_option("--t-max", t_max);
  ek_cmd->add_option("--t-step", t_step);

  auto* lan_cmd = app.add_subcommand("landreau", "max of tau(n)/sum_{d|n, d^3<=n} tau(d)^3");
  lan_cmd->add_option("--N", n_text)->required();

  auto* self_cmd = app.add_subcommand("selfcheck", "run the acceptance suite and write its reports");
  self_cmd->add_option("--cap", cap, "series term cap")->check(CLI::Range(std::uint64_t{1}, kSeriesCap));

  CLI11_PARSE(app, argc, argv);

  try {
    const Executor exec(common.threads);
    if (psi_cmd->parsed()) {
      PsiResult r;
      r.x = parse_count(x_text);
      r.y = parse_count(y_text);
      r.q = parse_count(q_text);
      r.a = parse_signed(a_text);
      r.psi = psi(r.x, r.y, exec);
      r.psi_coprime = psi_coprime(r.x, r.y, r.q, exec);
      r.psi_progression = psi_progression(r.x, r.y, r.a, r.q, exec);
      if (common.format == "text") {
        std::cout << r.psi << '\n';
        if (r.q != 1)
          std::cout << "psi_coprime " << r.psi_coprime << "\npsi_progression " << r.psi_progression << '\n';
      } else {
        emit(common, "psi", render(common, r));
      }
    } else if (disc_cmd->parsed()) {
      const auto rep = discrepancy(parse_count(x_text), parse_count(y_text), parse_count(Q_text),
                                   load_weight(weight_name), exec);
      if (common.format == "text")
        std::cout << "psi " << rep.psi << "\ndelta " << fmt(rep.delta) << "\ndelta_over_psi "
                  << fmt(rep.delta / static_cast<double>(rep.psi)) << "\nweighted_total "
                  << fmt(rep.weighted_total) << '\n';
      else
        emit(common, "discrepancy", render(common, rep));
    } else if (rho_cmd->parsed()) {
      const auto table = build_rho(u_max, tol > 0.0 ? tol : 1e-10);
      if (!u_text.empty()) {
        std::cout << fmt(table(std::stod(u_text))) << '\n';
      } else if (common.format == "json") {
        emit(common, "rho", to_json(table, stride).dump(2) + "\n");
      } else {
        std::ostringstream os;
        write_rho_csv(os, table, stride);
        emit(common, "rho", os.str());
      }
    } else if (alpha_cmd->parsed()) {
      const double x = parse_large(x_text);
      const std::uint64_t y = parse_count(y_text);
      AlphaGap g;
      g.saddle = SaddleSolver(y).solve(std::log(x), tol > 0.0 ? tol : 1e-12,
                                       method == "bisection" ? SaddleMethod::kBisection
                                                             : SaddleMethod::kBisectionNewton);
      const double ly = std::log(static_cast<double>(y)), u = std::log(x) / ly;
      g.one_minus_alpha = 1.0 - g.saddle.alpha;
      g.log_u1_over_log_y = std::log(u + 1.0) / ly;
      g.ratio = g.one_minus_alpha / g.log_u1_over_log_y;
      g.in_regime = std::log(x) * std::log(x) <= static_cast<double>(y);
      if (common.format == "text")
        std::cout << "alpha " << fmt(g.saddle.alpha) << "\nresidual " << fmt(g.saddle.residual)
                  << "\nprimes_used " << g.saddle.primes_used << '\n';
      else
        emit(common, "alpha", render(common, g));
    } else if (ll_cmd->parsed()) {
      const auto r = local_law_report(parse_count(x_text), parse_count(y_text), parse_count(n_text), exec);
      std::ostringstream os;
      write_csv(os, r);
      emit(common, "locallaw", os.str());
    } else if (mv_cmd->parsed()) {
      const auto spec = load_spec(spec_name);
      ReportOptions opt;
      opt.regime_c = regime_c;
      opt.main_term.cap = cap;
      opt.main_term.euler_prime_limit = cap;
      const auto r = theorem1_report(parse_count(x_text), parse_count(y_text), spec, exec, opt);
      if (common.format == "text")
        std::cout << "empirical " << fmt(r.empirical) << "\npredicted " << fmt(r.at_alpha.series)
                  << "\nobserved_gap " << fmt(r.observed_gap) << "\nbudget " << fmt(r.budget)
                  << "\ncertified " << fmt(r.at_alpha.certified) << "\nin_regime " << fmt(r.in_regime) << '\n';
      else
        emit(common, "meanvalue", render(common, r));
    } else if (ek_cmd->parsed()) {
      if (!(t_step > 0.0) || t_max < t_min) throw InputError("erdoskac: need t-step > 0 and t-max >= t-min");
      std::vector<double> grid;
      for (long i = 0; t_min + i * t_step <= t_max + 1e-12; ++i) grid.push_back(t_min + i * t_step);
      const auto cfg = EkConfig::make(parse_count(x_text), parse_count(y_text), c_Y);
      const auto r = ek_report(cfg, grid, exec);
      if (common.format == "text")
        std::cout << "psi " << r.psi << "\ndiscrepancy " << fmt(r.ks.sup) << "\nberry_esseen "
                  << fmt(r.berry_esseen.value) << "\nbudget " << fmt(r.budget) << '\n';
      else
        emit(common, "erdoskac", render(common, r));
    } else if (lan_cmd->parsed()) {
      const auto r = landreau_check(parse_count(n_text));
      if (common.format == "text") {
        std::cout << "max_ratio " << fmt(r.max_ratio) << "\nargmax " << r.argmax << '\n';
      } else if (common.format == "json") {
        emit(common, "landreau", to_json(r).dump(2) + "\n");
      } else {
        std::ostringstream os;
        write_csv(os, r);
        emit(common, "landreau", os.str());
      }
    } else if (self_cmd->parsed()) {
      fs::path dir = common.out;
      if (dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        dir = env && *env ? fs::path(env) : fs::path("selfcheck-reports");
      }
      SelfcheckOptions opt;
      opt.series_cap = cap;
      const auto result = run_selfcheck(exec, opt);
      write_files(dir, result.files);
      for (const auto& c : result.criteria) std::cout << criterion_line(c) << '\n';
      std::cout << "reports in " << dir.string() << '\n';
      return result.all_pass() ? 0 : 3;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
