#pragma once

// Adaptive Simpson quadrature with Richardson error control: a panel is
// accepted when |S(left)+S(right) - S(whole)| <= 15 * (its share of the
// tolerance), and the extrapolated correction delta/15 is folded into the
// result. Depth exhaustion flips `converged` instead of throwing so callers
// can decide whether the refinement cap is an error.

#include <cmath>
#include <cstddef>

#include "comi/errors.hpp"

namespace comi {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

namespace detail {

template <class F>
void adaptive_simpson_rec(F& f, double a, double fa, double m, double fm, double b, double fb,
                          double whole, double tol, int depth, QuadratureResult& out) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) {
    out.converged = false;
    out.value += left + right;
    return;
  }
  if (std::fabs(delta) <= 15.0 * tol || depth <= 0) {
    if (std::fabs(delta) > 15.0 * tol) out.converged = false;
    out.value += left + right + delta / 15.0;
    out.error_estimate += std::fabs(delta) / 15.0;
    return;
  }
  adaptive_simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, out);
  adaptive_simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b, errc::bad_parameter,
          "integration limits must be finite with a <= b");
  require(std::isfinite(abs_tol) && abs_tol > 0.0, errc::bad_parameter,
          "tolerance must be positive");
  require(max_depth >= 1, errc::bad_parameter, "max_depth must be >= 1");
  QuadratureResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  out.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::adaptive_simpson_rec(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth, out);
  return out;
}

}  // namespace comi
