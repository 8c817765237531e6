#pragma once

// Test-side reference computations. Everything here is deliberately naive
// (grid search, fixed composite Simpson) and shares no code with the library
// so the two can disagree when the library is wrong.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace oracle {

// sup_{x in [lo, hi]} (x*y - f(x)) on an index-based grid (no accumulated
// drift). f may throw outside its domain; such points are skipped.
inline double conjugate_sup(const std::function<double(double)>& f, double y,
                            double lo, double hi, double step) {
  double best = -1e300;
  const std::uint64_t n = static_cast<std::uint64_t>((hi - lo) / step) + 1;
  for (std::uint64_t i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi) break;
    double v;
    try {
      v = x * y - f(x);
    } catch (...) {
      continue;
    }
    if (std::isfinite(v) && v > best) best = v;
  }
  return best;
}

// Composite Simpson with panel doubling until successive values agree.
inline double simpson_integral(const std::function<double(double)>& g,
                               double a, double b, double tol = 1e-8) {
  auto composite = [&](std::uint64_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double sum = g(a) + g(b);
    for (std::uint64_t i = 1; i < panels; ++i) {
      const double x = a + static_cast<double>(i) * h;
      sum += (i % 2 == 1 ? 4.0 : 2.0) * g(x);
    }
    return sum * h / 3.0;
  };
  std::uint64_t panels = 64;
  double prev = composite(panels);
  while (panels <= (1ull << 22)) {
    panels *= 2;
    const double cur = composite(panels);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("simpson_integral: no convergence");
}

}  // namespace oracle
