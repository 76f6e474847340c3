#pragma once

// Dickman's function: u rho'(u) + rho(u - 1) = 0, rho = 1 on [0, 1],
// rho = 0 for u < 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "friable/common.hpp"
#include "friable/counting.hpp"

namespace friable {

/// Values below this are reported as 0 and flagged.
inline constexpr double kRhoUnderflow = 1e-60;

// Dense grid on [0, u_max] with step 1/steps_per_unit. Values between nodes are
// cubic Hermite interpolants using the ODE slope at each node, with the
// Fritsch-Carlson limiter so the interpolant never increases.
class RhoTable {
 public:
  double u_max() const { return u_max_; }
  double step() const { return 1.0 / static_cast<double>(steps_); }
  std::uint32_t steps_per_unit() const { return steps_; }
  double tolerance() const { return tol_; }
  /// Largest change observed between the last two refinements.
  double convergence_gap() const { return convergence_gap_; }
  /// First grid point where rho fell below kRhoUnderflow, or +inf.
  double underflow_u() const { return underflow_u_; }
  bool underflowed() const { return std::isfinite(underflow_u_); }

  std::size_t size() const { return values_.size(); }
  double node(std::size_t j) const { return static_cast<double>(j) * step(); }
  double node_value(std::size_t j) const { return values_[j] < kRhoUnderflow ? 0.0 : values_[j]; }

  double operator()(double u) const {
    if (u < 0.0) return 0.0;
    if (u <= 1.0) return 1.0;
    require(u <= u_max_ + 1e-12, "rho: u = " + std::to_string(u) + " beyond table u_max");
    if (u >= underflow_u_) return 0.0;
    const double v = raw(std::min(u, u_max_));
    return v < kRhoUnderflow ? 0.0 : v;
  }

  static RhoTable solve(double u_max, std::uint32_t steps_per_unit) {
    RhoTable t;
    t.u_max_ = u_max;
    t.steps_ = steps_per_unit;
    t.integrate();
    return t;
  }

 private:
  friend RhoTable build_rho(double, double);

  // Interpolates inside cell c = [c h, (c+1) h].
  double cell_value(std::size_t c, double u) const {
    if (c < steps_) return 1.0;  // [0, 1]
    const double h = step();
    const double s = (u - node(c)) / h;
    const double y0 = values_[c], y1 = values_[c + 1];
    double m0 = slopes_[c] * h, m1 = slopes_[c + 1] * h;
    const double delta = y1 - y0;
    if (delta == 0.0) {
      m0 = m1 = 0.0;
    } else {
      const double a = m0 / delta, b = m1 / delta;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double k = 3.0 / std::sqrt(r2);
        m0 *= k;
        m1 *= k;
      }
    }
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * m1;
  }

  double raw(double u) const {
    const double h = step();
    auto c = static_cast<std::size_t>(u / h);
    if (c + 1 >= values_.size()) c = values_.size() - 2;
    return cell_value(c, u);
  }

  // Marches the equivalent integral form u rho(u) = int_{u-1}^{u} rho(t) dt.
  // Each cell integral is the exact integral of its Hermite cubic; the unknown
  // node value enters only through the last cell, so each step is explicit.
  // The sliding window is summed from precomputed block sums rather than by
  // adding and removing cells, which would leave early rounding in the sum.
  void integrate() {
    const std::size_t n_nodes = static_cast<std::size_t>(std::ceil(u_max_ * steps_)) + 1;
    const double h = step();
    const std::size_t one = steps_;  // node index of u = 1
    values_.assign(n_nodes, 1.0);
    slopes_.assign(n_nodes, 0.0);
    if (one < n_nodes) slopes_[one] = -1.0;  // right derivative at u = 1
    std::vector<double> cell(n_nodes, h);    // cells inside [0, 1] integrate to h
    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(one)));
    // Blocks ending at or before u = 1 hold only flat cells.
    std::vector<double> block_sum(one / block, static_cast<double>(block) * h);
    auto window = [&](std::size_t first, std::size_t last) {  // cells [first, last)
      CompensatedSum s;
      std::size_t i = first;
      while (i < last && i % block != 0) s.add(cell[i++]);
      while (i + block <= last) {
        s.add(block_sum[i / block]);
        i += block;
      }
      while (i < last) s.add(cell[i++]);
      return s.value();
    };
    for (std::size_t j = one + 1; j < n_nodes; ++j) {
      const double u = node(j);
      const double d1 = -values_[j - one] / u;
      const double d0 = slopes_[j - 1];
      const double y0 = values_[j - 1];
      const double earlier = window(j - one, j - 1);
      const double y1 = (earlier + 0.5 * h * y0 + h * h * (d0 - d1) / 12.0) / (u - 0.5 * h);
      values_[j] = y1;
      slopes_[j] = d1;
      cell[j - 1] = 0.5 * h * (y0 + y1) + h * h * (d0 - d1) / 12.0;
      if (j % block == 0) {
        CompensatedSum s;
        for (std::size_t i = j - block; i < j; ++i) s.add(cell[i]);
        block_sum.resize(j / block, 0.0);
        block_sum[j / block - 1] = s.value();
      }
    }
    underflow_u_ = INFINITY;
    for (std::size_t j = one; j < n_nodes; ++j)
      if (values_[j] < kRhoUnderflow) {
        underflow_u_ = node(j);
        break;
      }
  }

  double u_max_ = 0.0;
  std::uint32_t steps_ = 0;
  double tol_ = 0.0;
  double convergence_gap_ = 0.0;
  double underflow_u_ = INFINITY;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// Largest |a(u) - b(u)| over the nodes of the coarser table.
inline double max_node_difference(const RhoTable& coarse, const RhoTable& fine) {
  double worst = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    const double u = std::min(coarse.node(j), fine.u_max());
    worst = std::max(worst, std::fabs(coarse.node_value(j) - fine(u)));
  }
  return worst;
}

/// Builds a table whose step is halved until two successive refinements agree
/// to within tol at every node of the coarser grid.
inline RhoTable build_rho(double u_max = 50.0, double tol = 1e-10) {
  require(u_max >= 1.0 && u_max <= 50.0, "build_rho: u_max must lie in [1, 50]");
  require(tol >= 1e-14 && tol <= 1e-6, "build_rho: tol must lie in [1e-14, 1e-6]");
  // Hermite error ~ h^4 max|rho''''| / 384 with max|rho''''| = 6 on [1, 2].
  auto steps = static_cast<std::uint32_t>(std::ceil(std::pow(tol * 64.0, -0.25)));
  steps = std::max<std::uint32_t>(steps, 16);
  constexpr std::uint32_t kMaxSteps = 1u << 15;
  RhoTable coarse = RhoTable::solve(u_max, steps);
  for (;;) {
    RhoTable fine = RhoTable::solve(u_max, coarse.steps_per_unit() * 2);
    const double gap = max_node_difference(coarse, fine);
    fine.tol_ = tol;
    fine.convergence_gap_ = gap;
    if (gap <= tol || fine.steps_per_unit() >= kMaxSteps) return fine;
    coarse = std::move(fine);
  }
}

inline double rho(double u, const RhoTable& table) { return table(u); }

/// Psi(x, y) / (x rho(u)), u = log x / log y.
inline double hildebrand_ratio(std::uint64_t x, std::uint64_t y, const RhoTable& table,
                               const Executor& exec = Executor::serial()) {
  require(x >= 2 && y >= 2, "hildebrand_ratio: x, y must be >= 2");
  const double u = std::log(static_cast<double>(x)) / std::log(static_cast<double>(y));
  require(u <= table.u_max(), "hildebrand_ratio: u beyond table");
  const double r = table(u);
  require(r > 0.0, "hildebrand_ratio: rho(u) underflows");
  return static_cast<double>(psi(x, y, exec)) / (static_cast<double>(x) * r);
}

/// Writes the grid as CSV (u, rho), every `stride`-th node.
inline void write_rho_csv(std::ostream& os, const RhoTable& table, std::size_t stride = 1) {
  os << "# friable-report v1 rho\n";
  os << "u,rho\n";
  char buf[96];
  for (std::size_t j = 0; j < table.size(); j += std::max<std::size_t>(stride, 1)) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", table.node(j), table.node_value(j));
    os << buf;
  }
}

}  // namespace friable
