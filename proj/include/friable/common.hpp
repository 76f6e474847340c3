#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace friable {

/// Raised when an argument violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

/// Largest x accepted by the segmented counters.
inline constexpr std::uint64_t kCountingCap = 1'000'000'000ULL;
/// Largest x for which S(x,y) may be materialized, and largest full SPF table.
inline constexpr std::uint64_t kEnumerationCap = 100'000'000ULL;
/// Fixed segment length. Work is split on these boundaries regardless of the
/// thread count, so floating-point reductions are reproducible.
inline constexpr std::uint64_t kSegmentLength = 1ULL << 18;

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Largest d with d^3 <= n.
inline std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  while (r > 0 && r * r * r > n) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::uint64_t mod_normalize(std::int64_t a, std::uint64_t q) {
  const auto sq = static_cast<std::int64_t>(q);
  auto r = a % sq;
  if (r < 0) r += sq;
  return static_cast<std::uint64_t>(r);
}

}  // namespace friable
