#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace eec {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise sum with a fixed split order, independent of how values were produced.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace eec
