#pragma once

// Certified Monte-Carlo intervals: the plain sample mean of phi over draws
// from P traps E_Q[phi] within deviation_term + K at a declared probability,
// where the deviation term 4 L^2 log(2/delta) / (n gamma) covers sampling
// fluctuation under a gamma-strongly-log-concave P and the bias term K is
// priced by a divergence between Q and P (pseudo-alpha, chi-square, or KL
// form). Gaussian closed forms and an adaptive quadrature supply those
// divergences; coverage experiments measure how often the interval traps the
// analytic truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "comi/divergences.hpp"
#include "comi/errors.hpp"
#include "comi/gaussian.hpp"
#include "comi/parallel.hpp"
#include "comi/quadrature.hpp"
#include "comi/rng.hpp"
#include "comi/sum.hpp"

namespace comi {

enum class CertifyForm { pseudo_alpha, chi2, kl };

inline const char* form_token(CertifyForm form) noexcept {
  switch (form) {
    case CertifyForm::pseudo_alpha: return "pseudo-alpha";
    case CertifyForm::chi2: return "chi2";
    case CertifyForm::kl: return "kl";
  }
  return "?";
}

inline CertifyForm parse_certify_form(std::string_view token) {
  if (token == "pseudo-alpha") return CertifyForm::pseudo_alpha;
  if (token == "chi2") return CertifyForm::chi2;
  if (token == "kl") return CertifyForm::kl;
  raise(errc::bad_parameter, "unknown certification form: " + std::string(token));
}

struct CertifyInput {
  double L = 1.0;       // Lipschitz constant of phi (caller's certificate)
  double gamma = 1.0;   // strong log-concavity parameter of P
  std::uint64_t n = 1;  // sample count
  double delta = 0.05;
  double alpha = 2.0;   // pseudo-alpha form only
  DivergenceValue div = DivergenceValue::finite(0.0);
};

inline void validate(const CertifyInput& in, bool need_alpha) {
  require(std::isfinite(in.L) && in.L > 0.0, errc::bad_parameter, "L must be positive");
  require(std::isfinite(in.gamma) && in.gamma > 0.0, errc::bad_parameter,
          "gamma must be positive");
  require(in.n >= 1, errc::bad_parameter, "n must be >= 1");
  require(std::isfinite(in.delta) && in.delta > 0.0 && in.delta < 1.0, errc::bad_parameter,
          "delta must lie in (0, 1)");
  if (need_alpha)
    require(std::isfinite(in.alpha) && in.alpha > 1.0, errc::bad_parameter,
            "alpha must exceed 1");
}

// An infinite divergence makes the interval vacuous (half_width = +inf); that
// is reported through the fields rather than thrown.
struct HalfWidth {
  double deviation_term = 0.0;
  double bias_term = 0.0;
  double half_width = 0.0;  // deviation_term + bias_term
  double level = 0.0;       // declared coverage probability

  bool vacuous() const noexcept { return !std::isfinite(half_width); }
};

struct IntervalReport {
  double estimate = 0.0;
  double deviation_term = 0.0;
  double bias_term = 0.0;
  double half_width = 0.0;
  double level = 0.0;

  bool vacuous() const noexcept { return !std::isfinite(half_width); }
};

inline double mc_deviation_term(const CertifyInput& in) {
  validate(in, false);
  return 4.0 * in.L * in.L * std::log(2.0 / in.delta) /
         (static_cast<double>(in.n) * in.gamma);
}

// K = 2^((2a-1)/a) L div^(1/a) / sqrt(gamma) * Gamma((3a-2)/(2(a-1)))^((a-1)/a),
// valid at level 1 - delta. At a = 2 this is 2^(3/2) L sqrt(div / gamma).
inline HalfWidth half_width_pseudo_alpha(const CertifyInput& in) {
  validate(in, true);
  HalfWidth out;
  out.deviation_term = mc_deviation_term(in);
  out.level = 1.0 - in.delta;
  if (in.div.is_infinite()) {
    out.bias_term = std::numeric_limits<double>::infinity();
    out.half_width = out.bias_term;
    return out;
  }
  const double a = in.alpha;
  const double gamma_fn = std::tgamma((3.0 * a - 2.0) / (2.0 * (a - 1.0)));
  out.bias_term = std::pow(2.0, (2.0 * a - 1.0) / a) * in.L *
                  std::pow(in.div.value(), 1.0 / a) / std::sqrt(in.gamma) *
                  std::pow(gamma_fn, (a - 1.0) / a);
  out.half_width = out.deviation_term + out.bias_term;
  return out;
}

// K = sqrt(chi2 * (M2 + pad)) where M2 is the empirical second moment of phi
// and pad = 16 L^2/gamma * sqrt(log(2/delta)/n) in the large-n regime
// (log(2/delta) <= n), else 16 L^2 log(2/delta) / (n gamma). The two branches
// agree at log(2/delta) = n. Valid at level (1 - delta)^2.
inline HalfWidth half_width_chi2(const CertifyInput& in, double empirical_second_moment) {
  validate(in, false);
  require(std::isfinite(empirical_second_moment) && empirical_second_moment >= 0.0,
          errc::bad_parameter, "empirical second moment must be >= 0");
  HalfWidth out;
  out.deviation_term = mc_deviation_term(in);
  out.level = (1.0 - in.delta) * (1.0 - in.delta);
  if (in.div.is_infinite()) {
    out.bias_term = std::numeric_limits<double>::infinity();
    out.half_width = out.bias_term;
    return out;
  }
  const double log_term = std::log(2.0 / in.delta);
  const double nd = static_cast<double>(in.n);
  const double l2g = in.L * in.L / in.gamma;
  const double pad = log_term <= nd ? 16.0 * l2g * std::sqrt(log_term / nd)
                                    : 16.0 * l2g * log_term / nd;
  out.bias_term = std::sqrt(in.div.value() * (empirical_second_moment + pad));
  out.half_width = out.deviation_term + out.bias_term;
  return out;
}

// K = KL + L^2 / (n gamma), valid at level 1 - delta; as n grows the interval
// floors at the KL divergence itself.
inline HalfWidth half_width_kl(const CertifyInput& in) {
  validate(in, false);
  HalfWidth out;
  out.deviation_term = mc_deviation_term(in);
  out.level = 1.0 - in.delta;
  if (in.div.is_infinite()) {
    out.bias_term = std::numeric_limits<double>::infinity();
    out.half_width = out.bias_term;
    return out;
  }
  out.bias_term = in.div.value() + in.L * in.L / (static_cast<double>(in.n) * in.gamma);
  out.half_width = out.deviation_term + out.bias_term;
  return out;
}

// chi2(Q||P) for 1-D Gaussians, finite exactly when 2 var(P) > var(Q):
//   var(P)/sqrt(var(Q) (2 var(P) - var(Q))) * exp(d^2/(2 var(P) - var(Q))) - 1
// with d the mean gap; for equal unit variances this is exp(d^2) - 1. Values
// past double range surface as the infinite marker.
inline DivergenceValue chi2_gaussian(const Gaussian1D& q, const Gaussian1D& p) {
  const double vq = q.variance();
  const double vp = p.variance();
  if (!(2.0 * vp > vq)) return DivergenceValue::infinite();
  const double d = q.mean() - p.mean();
  const double value =
      vp / std::sqrt(vq * (2.0 * vp - vq)) * std::exp(d * d / (2.0 * vp - vq)) - 1.0;
  if (!std::isfinite(value)) return DivergenceValue::infinite();
  return DivergenceValue::finite(value);
}

// KL(Q||P) = (var(Q)/var(P) + d^2/var(P) - 1 + log(var(P)/var(Q))) / 2.
inline DivergenceValue kl_gaussian(const Gaussian1D& q, const Gaussian1D& p) {
  const double vq = q.variance();
  const double vp = p.variance();
  const double d = q.mean() - p.mean();
  const double value = 0.5 * (vq / vp + d * d / vp - 1.0 + std::log(vp / vq));
  if (!std::isfinite(value)) return DivergenceValue::infinite();
  return DivergenceValue::finite(value);
}

namespace detail {

// |q(x)/p(x) - 1|^alpha p(x), worked in log space so a huge density ratio
// never overflows before the Gaussian factor damps the product.
inline double pseudo_alpha_integrand(double alpha, const Gaussian1D& q, const Gaussian1D& p,
                                     double x) {
  const double zp = (x - p.mean()) / p.stddev();
  const double zq = (x - q.mean()) / q.stddev();
  const double log_p =
      -0.5 * zp * zp - std::log(p.stddev()) - 0.5 * std::log(2.0 * std::numbers::pi);
  const double log_ratio = std::log(p.stddev() / q.stddev()) + 0.5 * zp * zp - 0.5 * zq * zq;
  double log_abs;  // log |ratio - 1|
  if (log_ratio > 0.0) {
    const double tail = -std::expm1(-log_ratio);  // 1 - 1/ratio, in (0, 1]
    if (tail <= 0.0) return 0.0;
    log_abs = log_ratio + std::log(tail);
  } else {
    const double em = std::expm1(log_ratio);  // ratio - 1, in (-1, 0]
    if (em == 0.0) return 0.0;
    log_abs = std::log(-em);
  }
  return std::exp(alpha * log_abs + log_p);
}

}  // namespace detail

// Pseudo divergence integral |q/p - 1|^alpha p over the real line by adaptive
// quadrature: core window [mu_P +- 12 sigma_P], then 4-sigma chunks appended
// per side until a chunk contributes < 1e-10; absolute error target 1e-8
// overall. The integrand diverges exactly when the ratio's alpha-power
// outruns the Gaussian tail, i.e. alpha var(P) <= (alpha - 1) var(Q); that
// case returns the infinite marker without integrating.
inline DivergenceValue pseudo_alpha_gaussian(double alpha, const Gaussian1D& q,
                                             const Gaussian1D& p) {
  require(std::isfinite(alpha) && alpha > 1.0, errc::bad_parameter, "alpha must exceed 1");
  if (alpha * p.variance() <= (alpha - 1.0) * q.variance()) return DivergenceValue::infinite();

  const auto h = [&](double x) { return detail::pseudo_alpha_integrand(alpha, q, p, x); };
  const double sp = p.stddev();
  constexpr double kCoreTol = 2.5e-9;
  constexpr double kChunkTol = 2.5e-11;
  constexpr double kTailStop = 1e-10;
  constexpr int kMaxChunksPerSide = 64;

  double lo = p.mean() - 12.0 * sp;
  double hi = p.mean() + 12.0 * sp;
  const QuadratureResult core = adaptive_simpson(h, lo, hi, kCoreTol);
  bool converged = core.converged;
  NeumaierSum total;
  total.add(core.value);
  for (int side = 0; side < 2; ++side) {
    double edge = side == 0 ? hi : lo;
    const double step = side == 0 ? 4.0 * sp : -4.0 * sp;
    for (int chunk = 0;; ++chunk) {
      require(chunk < kMaxChunksPerSide, errc::no_convergence,
              "tail still contributing after the window-extension cap");
      const double next = edge + step;
      const QuadratureResult piece = side == 0 ? adaptive_simpson(h, edge, next, kChunkTol)
                                               : adaptive_simpson(h, next, edge, kChunkTol);
      converged = converged && piece.converged;
      total.add(piece.value);
      edge = next;
      if (std::fabs(piece.value) < kTailStop) break;
    }
  }
  require(converged, errc::no_convergence,
          "refinement depth cap reached before the error target");
  return DivergenceValue::finite(total.value());
}

// Test maps for the certification workflows: identity, affine a x + b, or the
// affine map clipped to [lo, hi]. Each knows its exact Lipschitz constant and
// its closed-form mean under a Gaussian (clipping via the truncated-moment
// identity).
class PhiSpec {
 public:
  enum class Kind { identity, affine, clip };

  static PhiSpec identity() { return PhiSpec(Kind::identity, 1.0, 0.0, 0.0, 0.0); }
  static PhiSpec affine(double a, double b) {
    require(std::isfinite(a) && std::isfinite(b), errc::bad_parameter,
            "affine coefficients must be finite");
    return PhiSpec(Kind::affine, a, b, 0.0, 0.0);
  }
  static PhiSpec clip(double a, double b, double lo, double hi) {
    require(std::isfinite(a) && std::isfinite(b), errc::bad_parameter,
            "affine coefficients must be finite");
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, errc::bad_parameter,
            "clip range must satisfy lo <= hi");
    return PhiSpec(Kind::clip, a, b, lo, hi);
  }

  Kind kind() const noexcept { return kind_; }
  double lipschitz() const noexcept { return std::fabs(a_); }

  double operator()(double x) const noexcept {
    const double y = a_ * x + b_;
    return kind_ == Kind::clip ? std::clamp(y, lo_, hi_) : y;
  }

  // E[phi(X)] for X ~ g, exact.
  double mean_under(const Gaussian1D& g) const {
    const double m = a_ * g.mean() + b_;
    if (kind_ != Kind::clip) return m;
    const double s = std::fabs(a_) * g.stddev();
    if (s == 0.0) return std::clamp(m, lo_, hi_);
    const double za = (lo_ - m) / s;
    const double zb = (hi_ - m) / s;
    const double cdf_a = normal_cdf(za);
    const double cdf_b = normal_cdf(zb);
    return lo_ * cdf_a + hi_ * (1.0 - cdf_b) + m * (cdf_b - cdf_a) -
           s * (normal_pdf(zb) - normal_pdf(za));
  }

  std::string token() const {
    switch (kind_) {
      case Kind::identity: return "identity";
      case Kind::affine: return "affine:" + num(a_) + "," + num(b_);
      case Kind::clip:
        return "clip:" + num(a_) + "," + num(b_) + "," + num(lo_) + "," + num(hi_);
    }
    return "?";
  }

  static PhiSpec parse(std::string_view token);

 private:
  PhiSpec(Kind kind, double a, double b, double lo, double hi)
      : kind_(kind), a_(a), b_(b), lo_(lo), hi_(hi) {}

  static std::string num(double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Kind kind_;
  double a_;
  double b_;
  double lo_;
  double hi_;
};

inline PhiSpec PhiSpec::parse(std::string_view token) {
  const auto colon = token.find(':');
  const std::string_view head = token.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string_view::npos) {
    std::string tail(token.substr(colon + 1));
    std::size_t pos = 0;
    while (pos <= tail.size()) {
      const std::size_t comma = tail.find(',', pos);
      const std::string piece =
          tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        const double v = std::stod(piece, &used);
        if (used != piece.size()) throw std::invalid_argument("trailing characters");
        args.push_back(v);
      } catch (const std::exception&) {
        raise(errc::bad_parameter, "bad numeric argument in phi token: " + std::string(token));
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (head == "identity" && args.empty()) return identity();
  if (head == "affine" && args.size() == 2) return affine(args[0], args[1]);
  if (head == "clip" && args.size() == 4) return clip(args[0], args[1], args[2], args[3]);
  raise(errc::bad_parameter, "unknown phi token: " + std::string(token));
}

// Certified interval around the plain Monte-Carlo average of phi over samples
// drawn from the log-concave reference P. The Lipschitz constant is the
// caller's certificate: adjacent sample pairs are spot-checked against it and
// any witness of violation is rejected. For the chi2 form the empirical
// second moment comes from the same samples.
inline IntervalReport certify(const std::vector<double>& samples, const PhiSpec& phi,
                              const LogConcaveSpec& spec, CertifyForm form,
                              const CertifyInput& in) {
  require(!samples.empty(), errc::bad_parameter, "empty sample list");
  require(in.n == samples.size(), errc::bad_parameter, "n must equal the sample count");
  require(std::isfinite(spec.gamma) && spec.gamma > 0.0, errc::bad_parameter,
          "sampling spec gamma must be positive");
  require(std::fabs(in.gamma - spec.gamma) <= 1e-12 * std::max(1.0, std::fabs(spec.gamma)),
          errc::bad_parameter, "gamma disagrees with the sampling spec");
  validate(in, form == CertifyForm::pseudo_alpha);
  require(in.L >= phi.lipschitz(), errc::bad_parameter,
          "declared L is below the Lipschitz constant of phi");

  NeumaierSum mean_acc;
  NeumaierSum m2_acc;
  double prev_x = 0.0;
  double prev_y = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    require(std::isfinite(x), errc::bad_parameter, "sample is not finite");
    const double y = phi(x);
    if (i > 0)
      require(std::fabs(y - prev_y) <= in.L * std::fabs(x - prev_x) * (1.0 + 1e-9) + 1e-12,
              errc::bad_parameter, "phi violates the declared Lipschitz constant");
    mean_acc.add(y);
    m2_acc.add(y * y);
    prev_x = x;
    prev_y = y;
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());

  HalfWidth hw;
  switch (form) {
    case CertifyForm::pseudo_alpha: hw = half_width_pseudo_alpha(in); break;
    case CertifyForm::chi2: hw = half_width_chi2(in, m2_acc.value() * inv_n); break;
    case CertifyForm::kl: hw = half_width_kl(in); break;
  }
  IntervalReport out;
  out.estimate = mean_acc.value() * inv_n;
  out.deviation_term = hw.deviation_term;
  out.bias_term = hw.bias_term;
  out.half_width = hw.half_width;
  out.level = hw.level;
  return out;
}

struct McCoverage {
  std::uint64_t repeats = 0;
  std::uint64_t contained = 0;
  double coverage = 0.0;
  double level = 0.0;  // declared probability for the chosen form
};

// Fraction of repeats whose certified interval contains the analytic E_Q[phi].
// Repeat r consumes sampler indices [r n, (r+1) n), so the result is
// deterministic given the seed for any worker count. The divergence feeding K
// comes from the Gaussian closed forms (adaptive quadrature for the
// pseudo-alpha form).
inline McCoverage mc_coverage_experiment(CertifyForm form, const Gaussian1D& q,
                                         const Gaussian1D& p, const PhiSpec& phi,
                                         std::uint64_t n, double delta, std::uint64_t repeats,
                                         std::uint64_t seed, double alpha = 2.0) {
  require(repeats >= 1, errc::bad_parameter, "repeats must be >= 1");
  CertifyInput in;
  in.L = phi.lipschitz();
  require(in.L > 0.0, errc::bad_parameter, "phi must have a positive Lipschitz constant");
  in.gamma = gaussian_gamma(p);
  in.n = n;
  in.delta = delta;
  in.alpha = alpha;
  switch (form) {
    case CertifyForm::pseudo_alpha: in.div = pseudo_alpha_gaussian(alpha, q, p); break;
    case CertifyForm::chi2: in.div = chi2_gaussian(q, p); break;
    case CertifyForm::kl: in.div = kl_gaussian(q, p); break;
  }
  validate(in, form == CertifyForm::pseudo_alpha);

  const double truth = phi.mean_under(q);
  const LogConcaveSpec spec = log_concave_spec(p);
  const std::uint64_t missed = count_trials(repeats, [&](std::uint64_t r) {
    std::vector<double> xs(n);
    for (std::uint64_t i = 0; i < n; ++i) xs[i] = spec.sampler(seed, r * n + i);
    const IntervalReport report = certify(xs, phi, spec, form, in);
    return !(std::fabs(truth - report.estimate) <= report.half_width);
  });
  McCoverage out;
  out.repeats = repeats;
  out.contained = repeats - missed;
  out.coverage = static_cast<double>(out.contained) / static_cast<double>(repeats);
  out.level = form == CertifyForm::chi2 ? (1.0 - delta) * (1.0 - delta) : 1.0 - delta;
  return out;
}

}  // namespace comi
