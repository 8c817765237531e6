#pragma once

// The f-divergence catalog: generators f, their convex conjugates f*, the
// divergence sums themselves, and the variational lower bound
//   D_f(Q||P) >= E_Q[phi] - E_P[f*(phi)].
//
// Every generator is normalized so f(1) = 0. For points where P has no mass
// the measure-theoretic convention applies: a singular part of Q contributes
// q * lim_{t->inf} f(t)/t, which is infinite exactly when f grows
// superlinearly. Divergences are therefore reported through DivergenceValue,
// which carries an explicit infinite marker instead of a floating-point inf
// so downstream bounds can report vacuousness distinctly.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "comi/discrete.hpp"
#include "comi/errors.hpp"
#include "comi/interval.hpp"
#include "comi/sum.hpp"

namespace comi {

enum class DivergenceFamily {
  kl,                // t log t - t + 1
  reverse_kl,        // -log t
  pearson_chi2,      // (t - 1)^2
  neyman_chi2,       // (1 - t)^2 / t
  total_variation,   // |t - 1| / 2
  squared_hellinger, // (sqrt(t) - 1)^2
  alpha,             // (t^a - 1) / (a (a - 1)), a > 1
  pseudo_alpha,      // |t - 1|^a, a > 1
  phi_p,             // t^p - 1, p > 1
};

class DivergenceKind {
 public:
  static DivergenceKind kl() { return DivergenceKind(DivergenceFamily::kl); }
  static DivergenceKind reverse_kl() { return DivergenceKind(DivergenceFamily::reverse_kl); }
  static DivergenceKind pearson_chi2() { return DivergenceKind(DivergenceFamily::pearson_chi2); }
  static DivergenceKind neyman_chi2() { return DivergenceKind(DivergenceFamily::neyman_chi2); }
  static DivergenceKind total_variation() {
    return DivergenceKind(DivergenceFamily::total_variation);
  }
  static DivergenceKind squared_hellinger() {
    return DivergenceKind(DivergenceFamily::squared_hellinger);
  }
  static DivergenceKind alpha(double a) {
    require(std::isfinite(a) && a > 1.0, errc::bad_parameter, "alpha must exceed 1");
    return DivergenceKind(DivergenceFamily::alpha, a);
  }
  static DivergenceKind pseudo_alpha(double a) {
    require(std::isfinite(a) && a > 1.0, errc::bad_parameter, "alpha must exceed 1");
    return DivergenceKind(DivergenceFamily::pseudo_alpha, a);
  }
  static DivergenceKind phi_p(double p) {
    require(std::isfinite(p) && p > 1.0, errc::bad_parameter, "p must exceed 1");
    return DivergenceKind(DivergenceFamily::phi_p, p);
  }

  DivergenceFamily family() const noexcept { return family_; }

  bool parameterized() const noexcept {
    return family_ == DivergenceFamily::alpha || family_ == DivergenceFamily::pseudo_alpha ||
           family_ == DivergenceFamily::phi_p;
  }

  // alpha for the alpha families, p for phi_p.
  double parameter() const {
    require(parameterized(), errc::internal, "divergence kind has no parameter");
    return param_;
  }

  std::string token() const {
    switch (family_) {
      case DivergenceFamily::kl: return "kl";
      case DivergenceFamily::reverse_kl: return "reverse-kl";
      case DivergenceFamily::pearson_chi2: return "pearson-chi2";
      case DivergenceFamily::neyman_chi2: return "neyman-chi2";
      case DivergenceFamily::total_variation: return "tv";
      case DivergenceFamily::squared_hellinger: return "hellinger2";
      case DivergenceFamily::alpha: return "alpha:" + param_token();
      case DivergenceFamily::pseudo_alpha: return "pseudo-alpha:" + param_token();
      case DivergenceFamily::phi_p: return "phi-p:" + param_token();
    }
    return "?";
  }

  static DivergenceKind parse(std::string_view token);

 private:
  explicit DivergenceKind(DivergenceFamily family, double param = 0.0)
      : family_(family), param_(param) {}

  std::string param_token() const {
    std::string s = std::to_string(param_);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  DivergenceFamily family_;
  double param_;
};

// A divergence evaluation: a non-negative real, or the explicit infinite
// marker used when Q fails to be absolutely continuous w.r.t. P (for kinds
// whose generator grows superlinearly). Tiny negative rounding residue in
// [-1e-12, 0) is clamped to zero.
class DivergenceValue {
 public:
  static DivergenceValue finite(double v) {
    require(std::isfinite(v), errc::internal, "divergence value is not finite");
    if (v < 0.0) {
      require(v >= -1e-12, errc::internal, "divergence value below -1e-12");
      v = 0.0;
    }
    return DivergenceValue(v, false);
  }

  // Same envelope for a signed real: bound right-hand sides ride along with
  // divergences but may legitimately be negative, so no clamping applies.
  static DivergenceValue real(double v) {
    require(std::isfinite(v), errc::internal, "value is not finite");
    return DivergenceValue(v, false);
  }

  static DivergenceValue infinite() { return DivergenceValue(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }

  double value() const {
    require(!infinite_, errc::internal, "value() called on an infinite divergence");
    return value_;
  }

  // The value as a double, mapping the marker to +inf; for ordering and
  // display only.
  double as_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

 private:
  DivergenceValue(double v, bool inf) : value_(v), infinite_(inf) {}

  double value_;
  bool infinite_;
};

namespace detail {

inline void check_ratio_arg(const DivergenceKind& kind, double t) {
  require(std::isfinite(t) && t >= 0.0, errc::domain_error, "ratio t must be finite and >= 0");
  if (t == 0.0) {
    const auto fam = kind.family();
    require(fam != DivergenceFamily::reverse_kl && fam != DivergenceFamily::neyman_chi2,
            errc::domain_error, "generator for " + kind.token() + " needs t > 0");
  }
}

// lim_{t->inf} f(t)/t for the sublinear-at-infinity generators; the kinds
// absent here diverge on any singular part of Q.
inline bool linear_growth_rate(DivergenceFamily fam, double& rate) noexcept {
  switch (fam) {
    case DivergenceFamily::total_variation: rate = 0.5; return true;
    case DivergenceFamily::squared_hellinger: rate = 1.0; return true;
    case DivergenceFamily::neyman_chi2: rate = 1.0; return true;
    case DivergenceFamily::reverse_kl: rate = 0.0; return true;
    default: return false;
  }
}

}  // namespace detail

// Generator f evaluated at a density ratio t. f(1) == 0 for every kind.
inline double generator_f(const DivergenceKind& kind, double t) {
  detail::check_ratio_arg(kind, t);
  switch (kind.family()) {
    case DivergenceFamily::kl:
      return t == 0.0 ? 1.0 : t * std::log(t) - t + 1.0;
    case DivergenceFamily::reverse_kl:
      return -std::log(t);
    case DivergenceFamily::pearson_chi2:
      return (t - 1.0) * (t - 1.0);
    case DivergenceFamily::neyman_chi2:
      return (1.0 - t) * (1.0 - t) / t;
    case DivergenceFamily::total_variation:
      return 0.5 * std::fabs(t - 1.0);
    case DivergenceFamily::squared_hellinger: {
      const double d = std::sqrt(t) - 1.0;
      return d * d;
    }
    case DivergenceFamily::alpha: {
      const double a = kind.parameter();
      return (std::pow(t, a) - 1.0) / (a * (a - 1.0));
    }
    case DivergenceFamily::pseudo_alpha:
      return std::pow(std::fabs(t - 1.0), kind.parameter());
    case DivergenceFamily::phi_p:
      return std::pow(t, kind.parameter()) - 1.0;
  }
  raise(errc::internal, "unhandled divergence family");
}

// Domain on which conjugate_fstar is defined. Unsupported kinds
// (total variation, pseudo-alpha, phi-p) have no closed form here.
inline Interval conjugate_domain(const DivergenceKind& kind) {
  switch (kind.family()) {
    case DivergenceFamily::kl:
    case DivergenceFamily::pearson_chi2:
      return Interval::whole_line();
    case DivergenceFamily::alpha:
      return Interval{0.0, std::numeric_limits<double>::infinity(), false, false};
    case DivergenceFamily::squared_hellinger:
    case DivergenceFamily::neyman_chi2:
    case DivergenceFamily::reverse_kl:
      return Interval{-std::numeric_limits<double>::infinity(), 1.0, false, true};
    default:
      raise(errc::unsupported, "no closed-form conjugate for " + kind.token());
  }
}

// Convex conjugate f*(y) = sup_{x} (x y - f(x)) in closed form.
//
// For reverse KL the shifted variant sup_x (x y - x f(1/x)) is exposed,
// log(1/(1 - y)); it is the form the corresponding upper bound consumes and
// equals 1 + fstar(y - 1) of the raw generator.
inline double conjugate_fstar(const DivergenceKind& kind, double y) {
  require(std::isfinite(y), errc::domain_error, "conjugate argument must be finite");
  require(conjugate_domain(kind).contains(y), errc::domain_error,
          "y = " + std::to_string(y) + " outside conjugate domain " +
              conjugate_domain(kind).describe() + " for " + kind.token());
  switch (kind.family()) {
    case DivergenceFamily::kl:
      return std::expm1(y);
    case DivergenceFamily::pearson_chi2:
      return y + 0.25 * y * y;
    case DivergenceFamily::alpha: {
      const double a = kind.parameter();
      const double r = a / (a - 1.0);
      return std::pow(a - 1.0, r) / a * std::pow(y, r) + 1.0 / (a * (a - 1.0));
    }
    case DivergenceFamily::squared_hellinger:
      return y / (1.0 - y);
    case DivergenceFamily::neyman_chi2:
      return 2.0 - 2.0 * std::sqrt(1.0 - y);
    case DivergenceFamily::reverse_kl:
      return -std::log1p(-y);
    default:
      raise(errc::unsupported, "no closed-form conjugate for " + kind.token());
  }
}

// D_f(Q||P) = sum_i p_i f(q_i / p_i) with the radon_nikodym ratio
// conventions; singular mass of Q is weighted by lim f(t)/t as described in
// the header comment. KL uses the equivalent direct sum q log(q/p) with
// 0 log 0 = 0, which is better conditioned near q = p.
inline DivergenceValue f_divergence(const DivergenceKind& kind, const DiscreteDistribution& q,
                                    const DiscreteDistribution& p) {
  require_same_support(q, p);
  const auto fam = kind.family();
  NeumaierSum sum;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double qi = q.probs()[i];
    const double pi = p.probs()[i];
    if (fam == DivergenceFamily::total_variation) {
      sum.add(0.5 * std::fabs(qi - pi));
      continue;
    }
    if (fam == DivergenceFamily::kl) {
      if (qi == 0.0) continue;
      if (pi == 0.0) return DivergenceValue::infinite();
      sum.add(qi * std::log(qi / pi));
      continue;
    }
    if (pi == 0.0) {
      if (qi == 0.0) continue;  // ratio convention: f(1) = 0
      double rate = 0.0;
      if (!detail::linear_growth_rate(fam, rate)) return DivergenceValue::infinite();
      sum.add(qi * rate);
      continue;
    }
    if (qi == 0.0 &&
        (fam == DivergenceFamily::reverse_kl || fam == DivergenceFamily::neyman_chi2)) {
      return DivergenceValue::infinite();  // f(0+) = +inf
    }
    sum.add(pi * generator_f(kind, qi / pi));
  }
  return DivergenceValue::finite(sum.value());
}

// |.|^alpha pseudo divergence, sum_i p_i |q_i/p_i - 1|^alpha.
inline DivergenceValue pseudo_alpha_divergence(double alpha, const DiscreteDistribution& q,
                                               const DiscreteDistribution& p) {
  return f_divergence(DivergenceKind::pseudo_alpha(alpha), q, p);
}

// Best Young-Fenchel lower bound over a grid of test functions:
// max_phi E_Q[phi] - E_P[f*(phi)]. Each grid entry must lie inside the
// conjugate domain for the kind. Never exceeds D_f(Q||P) beyond rounding.
inline double variational_lower_bound(const DivergenceKind& kind, const DiscreteDistribution& q,
                                      const DiscreteDistribution& p,
                                      const std::vector<TestFunction>& grid) {
  require_same_support(q, p);
  require(!grid.empty(), errc::domain_error, "empty test-function grid");
  double best = -std::numeric_limits<double>::infinity();
  for (const TestFunction& phi : grid) {
    require_aligned(q, phi);
    NeumaierSum gain;
    for (std::size_t i = 0; i < q.size(); ++i) {
      gain.add(q.probs()[i] * phi[i]);
      gain.add(-p.probs()[i] * conjugate_fstar(kind, phi[i]));
    }
    const double value = gain.value();
    if (value > best) best = value;
  }
  return best;
}

// lambda |x-1|^a + (1-lambda) |y-1|^a - |lambda x + (1-lambda) y - 1|^a.
// Non-negative for a > 1 by convexity of |t - 1|^a; exposed as a probe so
// the property can be swept directly.
inline double convexity_probe(double alpha, double x, double y, double lambda) {
  require(std::isfinite(alpha) && alpha > 1.0, errc::bad_parameter, "alpha must exceed 1");
  require(std::isfinite(x) && x >= 0.0, errc::bad_parameter, "x must be >= 0");
  require(std::isfinite(y) && y >= 0.0, errc::bad_parameter, "y must be >= 0");
  require(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, errc::bad_parameter,
          "lambda must be in [0, 1]");
  const double mix = lambda * x + (1.0 - lambda) * y;
  return lambda * std::pow(std::fabs(x - 1.0), alpha) +
         (1.0 - lambda) * std::pow(std::fabs(y - 1.0), alpha) -
         std::pow(std::fabs(mix - 1.0), alpha);
}

inline DivergenceKind DivergenceKind::parse(std::string_view token) {
  const auto colon = token.find(':');
  std::string_view head = token.substr(0, colon);
  double param = 0.0;
  bool has_param = colon != std::string_view::npos;
  if (has_param) {
    const std::string tail(token.substr(colon + 1));
    try {
      std::size_t used = 0;
      param = std::stod(tail, &used);
      require(used == tail.size(), errc::bad_parameter, "trailing characters");
    } catch (const Error&) {
      raise(errc::bad_parameter, "bad numeric parameter in divergence token: " + std::string(token));
    } catch (const std::exception&) {
      raise(errc::bad_parameter, "bad numeric parameter in divergence token: " + std::string(token));
    }
  }
  if (head == "kl" && !has_param) return kl();
  if (head == "reverse-kl" && !has_param) return reverse_kl();
  if (head == "pearson-chi2" && !has_param) return pearson_chi2();
  if (head == "neyman-chi2" && !has_param) return neyman_chi2();
  if (head == "tv" && !has_param) return total_variation();
  if (head == "hellinger2" && !has_param) return squared_hellinger();
  if (head == "alpha" && has_param) return alpha(param);
  if (head == "pseudo-alpha" && has_param) return pseudo_alpha(param);
  if (head == "phi-p" && has_param) return phi_p(param);
  raise(errc::bad_parameter, "unknown divergence token: " + std::string(token));
}

}  // namespace comi
