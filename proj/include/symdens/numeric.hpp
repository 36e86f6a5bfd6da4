#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace symdens {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Relative tolerance for conservation, reciprocity and level merging.
inline constexpr double kRelTol = 1e-9;
// Tolerance on distribution normalization.
inline constexpr double kNormTol = 1e-12;

// Compensated summation; callers feed terms in a fixed order.
class KahanSum {
 public:
  void add(double term) {
    const double y = term - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Ratio with the conventions 0/0 = 0 and x/0 = +inf for x > 0.
inline double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : kInfinity;
  return num / den;
}

inline bool approx_equal(double a, double b, double rel, double abs = 0.0) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace symdens
