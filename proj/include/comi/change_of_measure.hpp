#pragma once

// The catalog of change-of-measure upper bounds on E_Q[phi] (or on the mean
// gap |E_Q[phi] - E_P[phi]| for the Hammersley-Chapman-Robbins style ids).
// Each inequality pairs a divergence with a moment functional of phi under P
// and an admissible range for phi; verify() evaluates both sides and reports
// the slack. An infinite divergence makes the bound vacuous, which is
// reported, not thrown.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "comi/discrete.hpp"
#include "comi/divergences.hpp"
#include "comi/errors.hpp"
#include "comi/interval.hpp"
#include "comi/sum.hpp"

namespace comi {

enum class InequalityFamily {
  kl_constrained,             // KL + log E_P[e^phi]
  kl_unconstrained,           // KL + E_P[e^phi] - 1
  pearson_chi2_constrained,   // chi2 + E_P[phi] + Var_P[phi]/4
  pearson_chi2_unconstrained, // chi2 + E_P[phi] + E_P[phi^2]/4
  tv_constrained,             // TV + E_P[phi], phi in [0, 1]
  alpha_unconstrained,        // D_a + c_a E_P[phi^(a/(a-1))] + 1/(a(a-1)), phi >= 0
  hellinger2_unconstrained,   // H2 + E_P[phi/(1-phi)], phi < 1
  reverse_kl_unconstrained,   // RKL + E_P[log(1/(1-phi))], phi < 1
  neyman_chi2_unconstrained,  // NChi2 + 2 - 2 E_P[sqrt(1-phi)], phi < 1
  multiplicative_chi2,        // sqrt((chi2 + 1) E_P[phi^2])
  multiplicative_alpha,       // (a(a-1)D_a + 1)^(1/a) (E_P|phi|^(a/(a-1)))^((a-1)/a)
  hcr_chi2,                   // gap <= sqrt(chi2 Var_P[phi])
  hcr_generalized,            // gap <= Dpa^(1/a) (E_P|phi - mu_P|^(a/(a-1)))^((a-1)/a)
};

// An inequality selector. The three alpha families carry a parameter; it may
// be left unpinned when the id names a family for a sweep, but evaluation
// requires a pinned value.
class InequalityId {
 public:
  static InequalityId kl_constrained() { return InequalityId(InequalityFamily::kl_constrained); }
  static InequalityId kl_unconstrained() {
    return InequalityId(InequalityFamily::kl_unconstrained);
  }
  static InequalityId pearson_chi2_constrained() {
    return InequalityId(InequalityFamily::pearson_chi2_constrained);
  }
  static InequalityId pearson_chi2_unconstrained() {
    return InequalityId(InequalityFamily::pearson_chi2_unconstrained);
  }
  static InequalityId tv_constrained() { return InequalityId(InequalityFamily::tv_constrained); }
  static InequalityId alpha_unconstrained(std::optional<double> a = std::nullopt) {
    return parameterized(InequalityFamily::alpha_unconstrained, a);
  }
  static InequalityId hellinger2_unconstrained() {
    return InequalityId(InequalityFamily::hellinger2_unconstrained);
  }
  static InequalityId reverse_kl_unconstrained() {
    return InequalityId(InequalityFamily::reverse_kl_unconstrained);
  }
  static InequalityId neyman_chi2_unconstrained() {
    return InequalityId(InequalityFamily::neyman_chi2_unconstrained);
  }
  static InequalityId multiplicative_chi2() {
    return InequalityId(InequalityFamily::multiplicative_chi2);
  }
  static InequalityId multiplicative_alpha(std::optional<double> a = std::nullopt) {
    return parameterized(InequalityFamily::multiplicative_alpha, a);
  }
  static InequalityId hcr_chi2() { return InequalityId(InequalityFamily::hcr_chi2); }
  static InequalityId hcr_generalized(std::optional<double> a = std::nullopt) {
    return parameterized(InequalityFamily::hcr_generalized, a);
  }

  InequalityFamily family() const noexcept { return family_; }

  bool parameterized_family() const noexcept {
    return family_ == InequalityFamily::alpha_unconstrained ||
           family_ == InequalityFamily::multiplicative_alpha ||
           family_ == InequalityFamily::hcr_generalized;
  }

  bool pinned() const noexcept { return !parameterized_family() || alpha_.has_value(); }

  double alpha() const {
    require(parameterized_family(), errc::internal, "inequality has no alpha parameter");
    require(alpha_.has_value(), errc::bad_parameter,
            "alpha parameter required for " + family_token());
    return *alpha_;
  }

  InequalityId with_alpha(double a) const {
    require(parameterized_family(), errc::bad_parameter,
            family_token() + " takes no alpha parameter");
    return parameterized(family_, a);
  }

  std::string family_token() const {
    switch (family_) {
      case InequalityFamily::kl_constrained: return "kl-constrained";
      case InequalityFamily::kl_unconstrained: return "kl-unconstrained";
      case InequalityFamily::pearson_chi2_constrained: return "pearson-chi2-constrained";
      case InequalityFamily::pearson_chi2_unconstrained: return "pearson-chi2-unconstrained";
      case InequalityFamily::tv_constrained: return "tv-constrained";
      case InequalityFamily::alpha_unconstrained: return "alpha-unconstrained";
      case InequalityFamily::hellinger2_unconstrained: return "hellinger2-unconstrained";
      case InequalityFamily::reverse_kl_unconstrained: return "reverse-kl-unconstrained";
      case InequalityFamily::neyman_chi2_unconstrained: return "neyman-chi2-unconstrained";
      case InequalityFamily::multiplicative_chi2: return "multiplicative-chi2";
      case InequalityFamily::multiplicative_alpha: return "multiplicative-alpha";
      case InequalityFamily::hcr_chi2: return "hcr-chi2";
      case InequalityFamily::hcr_generalized: return "hcr-generalized";
    }
    return "?";
  }

  std::string token() const {
    if (parameterized_family() && alpha_.has_value()) {
      std::string s = std::to_string(*alpha_);
      while (s.size() > 1 && s.back() == '0') s.pop_back();
      if (!s.empty() && s.back() == '.') s.pop_back();
      return family_token() + ":" + s;
    }
    return family_token();
  }

  static InequalityId parse(std::string_view token);

  static const std::vector<InequalityFamily>& all_families() {
    static const std::vector<InequalityFamily> families = {
        InequalityFamily::kl_constrained,
        InequalityFamily::kl_unconstrained,
        InequalityFamily::pearson_chi2_constrained,
        InequalityFamily::pearson_chi2_unconstrained,
        InequalityFamily::tv_constrained,
        InequalityFamily::alpha_unconstrained,
        InequalityFamily::hellinger2_unconstrained,
        InequalityFamily::reverse_kl_unconstrained,
        InequalityFamily::neyman_chi2_unconstrained,
        InequalityFamily::multiplicative_chi2,
        InequalityFamily::multiplicative_alpha,
        InequalityFamily::hcr_chi2,
        InequalityFamily::hcr_generalized,
    };
    return families;
  }

 private:
  explicit InequalityId(InequalityFamily family, std::optional<double> a = std::nullopt)
      : family_(family), alpha_(a) {}

  static InequalityId parameterized(InequalityFamily family, std::optional<double> a) {
    if (a.has_value())
      require(std::isfinite(*a) && *a > 1.0, errc::bad_parameter, "alpha must exceed 1");
    return InequalityId(family, a);
  }

  InequalityFamily family_;
  std::optional<double> alpha_;
};

// Admissible values of phi for an inequality. Ranges mirror the domain of
// the conjugate (or the direct hypothesis of the bound): open right endpoint
// at 1 where f* blows up, closed [0, 1] for the total-variation form.
inline Interval phi_domain(const InequalityId& id) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (id.family()) {
    case InequalityFamily::tv_constrained:
      return Interval{0.0, 1.0, false, false};
    case InequalityFamily::alpha_unconstrained:
      return Interval{0.0, inf, false, false};
    case InequalityFamily::hellinger2_unconstrained:
    case InequalityFamily::reverse_kl_unconstrained:
    case InequalityFamily::neyman_chi2_unconstrained:
      return Interval{-inf, 1.0, false, true};
    default:
      return Interval::whole_line();
  }
}

inline void require_phi_in_domain(const InequalityId& id, const TestFunction& phi) {
  const Interval dom = phi_domain(id);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    require(dom.contains(phi[i]), errc::phi_domain,
            "phi[" + std::to_string(i) + "] = " + std::to_string(phi[i]) + " outside " +
                dom.describe() + " for " + id.token());
  }
}

namespace detail {

inline double mean_of(const DiscreteDistribution& p, const TestFunction& phi,
                      double (*map)(double)) {
  NeumaierSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(p.probs()[i] * map(phi[i]));
  return s.value();
}

inline double raw_moment(const DiscreteDistribution& p, const TestFunction& phi, double power) {
  NeumaierSum s;
  for (std::size_t i = 0; i < p.size(); ++i)
    s.add(p.probs()[i] * std::pow(std::fabs(phi[i]), power));
  return s.value();
}

inline double centered_abs_moment(const DiscreteDistribution& p, const TestFunction& phi,
                                  double power) {
  const double mu = expectation(p, phi);
  NeumaierSum s;
  for (std::size_t i = 0; i < p.size(); ++i)
    s.add(p.probs()[i] * std::pow(std::fabs(phi[i] - mu), power));
  return s.value();
}

}  // namespace detail

// Right-hand side of the generalized mean-gap bound:
//   |E_Q[phi] - E_P[phi]| <= Dpa^(1/a) * (E_P|phi - E_P phi|^(a/(a-1)))^((a-1)/a)
// where Dpa is the |.|^alpha pseudo divergence.
inline DivergenceValue hcr_gap_bound(double alpha, const DiscreteDistribution& q,
                                     const DiscreteDistribution& p, const TestFunction& phi) {
  require(std::isfinite(alpha) && alpha > 1.0, errc::bad_parameter, "alpha must exceed 1");
  require_aligned(p, phi);
  const DivergenceValue div = pseudo_alpha_divergence(alpha, q, p);
  if (div.is_infinite()) return DivergenceValue::infinite();
  const double dual = alpha / (alpha - 1.0);
  const double moment = detail::centered_abs_moment(p, phi, dual);
  return DivergenceValue::finite(std::pow(div.value(), 1.0 / alpha) *
                                 std::pow(moment, (alpha - 1.0) / alpha));
}

// Right-hand side of the selected inequality. Requires phi inside
// phi_domain(id); an infinite divergence yields the infinite marker (the
// bound is vacuous but valid).
inline DivergenceValue upper_bound(const InequalityId& id, const DiscreteDistribution& q,
                                   const DiscreteDistribution& p, const TestFunction& phi) {
  require_same_support(q, p);
  require_aligned(p, phi);
  require_phi_in_domain(id, phi);

  // Bound values are signed (e.g. the KL forms go negative for negative phi),
  // so they bypass the non-negativity clamp divergence sums get.
  const auto finite_or_inf = [](const DivergenceValue& d, auto&& rhs_of) -> DivergenceValue {
    if (d.is_infinite()) return DivergenceValue::infinite();
    return DivergenceValue::real(rhs_of(d.value()));
  };

  switch (id.family()) {
    case InequalityFamily::kl_constrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::kl(), q, p);
      return finite_or_inf(d, [&](double kl) {
        return kl + std::log1p(detail::mean_of(p, phi, [](double v) { return std::expm1(v); }));
      });
    }
    case InequalityFamily::kl_unconstrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::kl(), q, p);
      return finite_or_inf(d, [&](double kl) {
        return kl + detail::mean_of(p, phi, [](double v) { return std::expm1(v); });
      });
    }
    case InequalityFamily::pearson_chi2_constrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::pearson_chi2(), q, p);
      return finite_or_inf(d, [&](double chi2) {
        return chi2 + expectation(p, phi) + 0.25 * variance(p, phi);
      });
    }
    case InequalityFamily::pearson_chi2_unconstrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::pearson_chi2(), q, p);
      return finite_or_inf(d, [&](double chi2) {
        return chi2 + expectation(p, phi) + 0.25 * detail::raw_moment(p, phi, 2.0);
      });
    }
    case InequalityFamily::tv_constrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::total_variation(), q, p);
      return finite_or_inf(d, [&](double tv) { return tv + expectation(p, phi); });
    }
    case InequalityFamily::alpha_unconstrained: {
      const double a = id.alpha();
      const DivergenceValue d = f_divergence(DivergenceKind::alpha(a), q, p);
      return finite_or_inf(d, [&](double da) {
        const double dual = a / (a - 1.0);
        return da + std::pow(a - 1.0, dual) / a * detail::raw_moment(p, phi, dual) +
               1.0 / (a * (a - 1.0));
      });
    }
    case InequalityFamily::hellinger2_unconstrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::squared_hellinger(), q, p);
      return finite_or_inf(d, [&](double h2) {
        return h2 + detail::mean_of(p, phi, [](double v) { return v / (1.0 - v); });
      });
    }
    case InequalityFamily::reverse_kl_unconstrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::reverse_kl(), q, p);
      return finite_or_inf(d, [&](double rkl) {
        return rkl + detail::mean_of(p, phi, [](double v) { return -std::log1p(-v); });
      });
    }
    case InequalityFamily::neyman_chi2_unconstrained: {
      const DivergenceValue d = f_divergence(DivergenceKind::neyman_chi2(), q, p);
      return finite_or_inf(d, [&](double nchi2) {
        return nchi2 + 2.0 -
               2.0 * detail::mean_of(p, phi, [](double v) { return std::sqrt(1.0 - v); });
      });
    }
    case InequalityFamily::multiplicative_chi2: {
      const DivergenceValue d = f_divergence(DivergenceKind::pearson_chi2(), q, p);
      return finite_or_inf(d, [&](double chi2) {
        return std::sqrt((chi2 + 1.0) * detail::raw_moment(p, phi, 2.0));
      });
    }
    case InequalityFamily::multiplicative_alpha: {
      const double a = id.alpha();
      const DivergenceValue d = f_divergence(DivergenceKind::alpha(a), q, p);
      return finite_or_inf(d, [&](double da) {
        const double dual = a / (a - 1.0);
        return std::pow(a * (a - 1.0) * da + 1.0, 1.0 / a) *
               std::pow(detail::raw_moment(p, phi, dual), (a - 1.0) / a);
      });
    }
    case InequalityFamily::hcr_chi2: {
      const DivergenceValue d = f_divergence(DivergenceKind::pearson_chi2(), q, p);
      return finite_or_inf(d,
                           [&](double chi2) { return std::sqrt(chi2 * variance(p, phi)); });
    }
    case InequalityFamily::hcr_generalized:
      return hcr_gap_bound(id.alpha(), q, p, phi);
  }
  raise(errc::internal, "unhandled inequality family");
}

// The exact maximizer of the constrained quadratic change-of-measure
// objective: p*_i = (phi_i - E_P[phi]) / 2 + 1. Satisfies
// sum_i p*_i P_i = 1 by construction; entries may go negative, which is
// reported so callers can see when the constrained optimum saturates.
struct OptimalDensity {
  std::vector<double> values;
  bool all_nonnegative;
};

inline OptimalDensity constrained_chi2_optimal_density(const DiscreteDistribution& p,
                                                       const TestFunction& phi) {
  require_aligned(p, phi);
  const double mu = expectation(p, phi);
  OptimalDensity out{std::vector<double>(p.size()), true};
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.values[i] = 0.5 * (phi[i] - mu) + 1.0;
    if (out.values[i] < 0.0) out.all_nonnegative = false;
  }
  return out;
}

constexpr double kHoldsSlackTolerance = -1e-9;

struct BoundReport {
  double lhs = 0.0;
  DivergenceValue rhs = DivergenceValue::finite(0.0);
  double slack = 0.0;  // rhs - lhs; +inf when the bound is vacuous
  bool holds = false;

  bool vacuous() const noexcept { return rhs.is_infinite(); }
};

// Evaluates both sides of the inequality. lhs is E_Q[phi], except for the
// mean-gap ids where it is |E_Q[phi] - E_P[phi]|. holds allows slack down to
// kHoldsSlackTolerance to absorb rounding.
inline BoundReport verify(const InequalityId& id, const DiscreteDistribution& q,
                          const DiscreteDistribution& p, const TestFunction& phi) {
  BoundReport report;
  const bool gap_form = id.family() == InequalityFamily::hcr_chi2 ||
                        id.family() == InequalityFamily::hcr_generalized;
  report.lhs = gap_form ? std::fabs(expectation(q, phi) - expectation(p, phi))
                        : expectation(q, phi);
  report.rhs = upper_bound(id, q, p, phi);
  report.slack = report.rhs.is_infinite() ? std::numeric_limits<double>::infinity()
                                          : report.rhs.value() - report.lhs;
  report.holds = report.rhs.is_infinite() || report.slack >= kHoldsSlackTolerance;
  return report;
}

inline InequalityId InequalityId::parse(std::string_view token) {
  const auto colon = token.find(':');
  const std::string_view head = token.substr(0, colon);
  std::optional<double> param;
  if (colon != std::string_view::npos) {
    const std::string tail(token.substr(colon + 1));
    try {
      std::size_t used = 0;
      param = std::stod(tail, &used);
      require(used == tail.size(), errc::bad_parameter, "trailing characters");
    } catch (const Error&) {
      raise(errc::bad_parameter, "bad alpha in inequality token: " + std::string(token));
    } catch (const std::exception&) {
      raise(errc::bad_parameter, "bad alpha in inequality token: " + std::string(token));
    }
  }
  for (InequalityFamily family : all_families()) {
    const InequalityId base(family);
    if (head != base.family_token()) continue;
    if (!param.has_value()) return base;
    require(base.parameterized_family(), errc::bad_parameter,
            base.family_token() + " takes no alpha parameter");
    return parameterized(family, param);
  }
  raise(errc::bad_parameter, "unknown inequality token: " + std::string(token));
}

}  // namespace comi
