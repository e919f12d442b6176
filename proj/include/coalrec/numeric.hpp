#pragma once

#include <cmath>
#include <cstdint>

namespace coalrec {

/// Neumaier-compensated running sum; the inclusion-exclusion sums mix signs.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// m choose 2 over integers.
inline std::int64_t choose2(std::int64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

}  // namespace coalrec
