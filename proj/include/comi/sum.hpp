#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace comi {

// Neumaier's variant of compensated summation. Expectations in this library
// are asserted to tolerances near 1e-12, so plain accumulation is not enough
// once supports mix magnitudes; this keeps errors at a few ulps of the sum.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double compensated_dot(std::span<const double> a, std::span<const double> b) noexcept {
  NeumaierSum s;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) s.add(a[i] * b[i]);
  return s.value();
}

}  // namespace comi
