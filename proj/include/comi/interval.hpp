#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace comi {

// Real interval with independently open or closed endpoints; infinite
// endpoints model unbounded sides. Used for conjugate domains and for the
// admissible range of test functions per inequality.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  static Interval whole_line() noexcept { return Interval{}; }

  bool contains(double x) const noexcept {
    if (!std::isfinite(x)) return false;
    if (x < lo || (lo_open && x == lo)) return false;
    if (x > hi || (hi_open && x == hi)) return false;
    return true;
  }

  // True when [lo, hi] (closed) fits inside this interval.
  bool contains_closed_range(double range_lo, double range_hi) const noexcept {
    return contains(range_lo) && contains(range_hi);
  }

  std::string describe() const {
    std::ostringstream os;
    os << (lo_open ? '(' : '[');
    if (std::isinf(lo)) {
      os << "-inf";
    } else {
      os << lo;
    }
    os << ", ";
    if (std::isinf(hi)) {
      os << "inf";
    } else {
      os << hi;
    }
    os << (hi_open ? ')' : ']');
    return os.str();
  }
};

}  // namespace comi
