#pragma once

// PAC-Bayes bound addends for four loss classes, in both the multiplicative
// form
//   sqrt(c * (a(a-1) D_a(Q||P) + 1)^(1/a))
// and the additive form
//   sqrt((1/m)(D_a + 1/(a(a-1))) + (1/(m a)) ((a-1) m c)^(a/(a-1)))
// where c is the class-specific concentration rate of the per-hypothesis
// empirical risk. A finite-hypothesis Gibbs simulator measures how often the
// true risk escapes the bound.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "comi/discrete.hpp"
#include "comi/divergences.hpp"
#include "comi/errors.hpp"
#include "comi/parallel.hpp"
#include "comi/rng.hpp"
#include "comi/sum.hpp"

namespace comi {

class LossClass {
 public:
  enum class Kind { bounded, sub_gaussian, sub_exponential, bounded_variance };

  static LossClass bounded(double range) {
    require(std::isfinite(range) && range > 0.0, errc::bad_parameter, "R must be positive");
    LossClass c(Kind::bounded);
    c.range_ = range;
    return c;
  }
  static LossClass sub_gaussian(double sigma) {
    require(std::isfinite(sigma) && sigma > 0.0, errc::bad_parameter, "sigma must be positive");
    LossClass c(Kind::sub_gaussian);
    c.sigma_ = sigma;
    return c;
  }
  static LossClass sub_exponential(double sigma, double beta) {
    require(std::isfinite(sigma) && sigma > 0.0, errc::bad_parameter, "sigma must be positive");
    require(std::isfinite(beta) && beta > 0.0, errc::bad_parameter, "beta must be positive");
    LossClass c(Kind::sub_exponential);
    c.sigma_ = sigma;
    c.beta_ = beta;
    return c;
  }
  static LossClass bounded_variance(double sigma2) {
    require(std::isfinite(sigma2) && sigma2 > 0.0, errc::bad_parameter,
            "sigma^2 must be positive");
    LossClass c(Kind::bounded_variance);
    c.sigma2_ = sigma2;
    return c;
  }

  Kind kind() const noexcept { return kind_; }
  double range() const { return checked(kind_ == Kind::bounded, range_); }
  double sigma() const {
    return checked(kind_ == Kind::sub_gaussian || kind_ == Kind::sub_exponential, sigma_);
  }
  double beta() const { return checked(kind_ == Kind::sub_exponential, beta_); }
  double variance_bound() const { return checked(kind_ == Kind::bounded_variance, sigma2_); }

  std::string token() const {
    switch (kind_) {
      case Kind::bounded: return "bounded:R=" + trimmed(range_);
      case Kind::sub_gaussian: return "sub-gaussian:sigma=" + trimmed(sigma_);
      case Kind::sub_exponential:
        return "sub-exponential:sigma=" + trimmed(sigma_) + ",beta=" + trimmed(beta_);
      case Kind::bounded_variance: return "bounded-variance:sigma2=" + trimmed(sigma2_);
    }
    return "?";
  }

 private:
  explicit LossClass(Kind k) : kind_(k) {}

  static double checked(bool ok, double v) {
    require(ok, errc::internal, "loss-class parameter not present for this kind");
    return v;
  }

  static std::string trimmed(double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Kind kind_;
  double range_ = 0.0;
  double sigma_ = 0.0;
  double beta_ = 0.0;
  double sigma2_ = 0.0;
};

// Inverse of LossClass::token(): head before ':', then comma-separated
// key=value parameters, unknown keys rejected.
inline LossClass parse_loss_class(std::string_view token) {
  const auto colon = token.find(':');
  const std::string_view head = token.substr(0, colon);
  std::vector<std::pair<std::string, double>> kv;
  if (colon != std::string_view::npos) {
    std::string tail(token.substr(colon + 1));
    std::size_t pos = 0;
    while (pos <= tail.size()) {
      const std::size_t comma = tail.find(',', pos);
      const std::string piece =
          tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const std::size_t eq = piece.find('=');
      bool ok = eq != std::string::npos && eq > 0;
      double value = 0.0;
      if (ok) {
        try {
          std::size_t used = 0;
          value = std::stod(piece.substr(eq + 1), &used);
          ok = used == piece.size() - eq - 1;
        } catch (const std::exception&) {
          ok = false;
        }
      }
      require(ok, errc::bad_parameter, "bad loss-class parameter: " + piece);
      kv.emplace_back(piece.substr(0, eq), value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  const auto take = [&](std::string_view key) {
    for (auto it = kv.begin(); it != kv.end(); ++it) {
      if (it->first == key) {
        const double v = it->second;
        kv.erase(it);
        return v;
      }
    }
    raise(errc::bad_parameter,
          "missing " + std::string(key) + " in loss-class token: " + std::string(token));
  };
  LossClass out = [&] {
    if (head == "bounded") return LossClass::bounded(take("R"));
    if (head == "sub-gaussian") return LossClass::sub_gaussian(take("sigma"));
    if (head == "sub-exponential") {
      const double sigma = take("sigma");
      return LossClass::sub_exponential(sigma, take("beta"));
    }
    if (head == "bounded-variance") return LossClass::bounded_variance(take("sigma2"));
    raise(errc::bad_parameter, "unknown loss-class token: " + std::string(token));
  }();
  require(kv.empty(), errc::bad_parameter,
          "unknown loss-class parameter: " + (kv.empty() ? "" : kv.front().first));
  return out;
}

struct PacInput {
  std::uint64_t m = 1;
  double delta = 0.05;
  double alpha = 2.0;
  DivergenceValue div = DivergenceValue::finite(0.0);
};

inline void validate(const PacInput& in) {
  require(in.m >= 1, errc::bad_parameter, "m must be >= 1");
  require(std::isfinite(in.delta) && in.delta > 0.0 && in.delta < 1.0, errc::bad_parameter,
          "delta must lie in (0, 1)");
  require(std::isfinite(in.alpha) && in.alpha > 1.0, errc::bad_parameter, "alpha must exceed 1");
}

// Empirical-risk concentration rate K for the sub-exponential class, with the
// regime boundary m* = 2 beta^2 log(2/delta) / sigma^2; the Gaussian regime
// applies when m* <= m, as printed.
inline double subexp_K1(double sigma, double beta, std::uint64_t m, double delta) {
  require(std::isfinite(sigma) && sigma > 0.0, errc::bad_parameter, "sigma must be positive");
  require(std::isfinite(beta) && beta > 0.0, errc::bad_parameter, "beta must be positive");
  require(m >= 1, errc::bad_parameter, "m must be >= 1");
  require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, errc::bad_parameter,
          "delta must lie in (0, 1)");
  const double log_term = std::log(2.0 / delta);
  const double md = static_cast<double>(m);
  const double m_star = 2.0 * beta * beta * log_term / (sigma * sigma);
  if (m_star <= md) return 2.0 * sigma * sigma * log_term / md;
  const double k = 2.0 * beta * log_term / md;
  return k * k;
}

// The class-specific concentration rate c described in the header comment.
inline double concentration_rate(const LossClass& loss, std::uint64_t m, double delta) {
  const double md = static_cast<double>(m);
  const double log_term = std::log(2.0 / delta);
  switch (loss.kind()) {
    case LossClass::Kind::bounded:
      return loss.range() * loss.range() / (2.0 * md) * log_term;
    case LossClass::Kind::sub_gaussian:
      return 2.0 * loss.sigma() * loss.sigma() / md * log_term;
    case LossClass::Kind::sub_exponential:
      return subexp_K1(loss.sigma(), loss.beta(), m, delta);
    case LossClass::Kind::bounded_variance:
      return loss.variance_bound() / (md * delta);
  }
  raise(errc::internal, "unhandled loss class");
}

inline DivergenceValue addend_multiplicative(const LossClass& loss, const PacInput& in) {
  validate(in);
  if (in.div.is_infinite()) return DivergenceValue::infinite();
  const double c = concentration_rate(loss, in.m, in.delta);
  const double a = in.alpha;
  const double factor = std::pow(a * (a - 1.0) * in.div.value() + 1.0, 1.0 / a);
  return DivergenceValue::finite(std::sqrt(c * factor));
}

inline DivergenceValue addend_additive(const LossClass& loss, const PacInput& in) {
  validate(in);
  if (in.div.is_infinite()) return DivergenceValue::infinite();
  const double c = concentration_rate(loss, in.m, in.delta);
  const double a = in.alpha;
  const double md = static_cast<double>(in.m);
  const double first = (in.div.value() + 1.0 / (a * (a - 1.0))) / md;
  const double second = std::pow((a - 1.0) * md * c, a / (a - 1.0)) / (md * a);
  return DivergenceValue::finite(std::sqrt(first + second));
}

// Per-hypothesis loss distribution used by the Gibbs simulator. mean_loss[h]
// is the exact expected loss of hypothesis h.
enum class LossModelKind { zero_one, gaussian, shifted_exponential };

struct LossModel {
  LossModelKind kind = LossModelKind::zero_one;
  std::vector<double> mean_loss;
  double scale = 1.0;  // stddev (gaussian) or exponential scale; unused for zero_one
};

inline void validate(const LossModel& model) {
  require(!model.mean_loss.empty(), errc::empty_support, "loss model has no hypotheses");
  for (double mu : model.mean_loss)
    require(std::isfinite(mu), errc::bad_parameter, "mean loss is not finite");
  if (model.kind == LossModelKind::zero_one) {
    for (double mu : model.mean_loss)
      require(mu >= 0.0 && mu <= 1.0, errc::bad_parameter, "0-1 mean loss outside [0, 1]");
  } else {
    require(std::isfinite(model.scale) && model.scale >= 0.0, errc::bad_parameter,
            "model scale must be >= 0");
  }
}

// Whether the model analytically certifies the declared class. The
// shifted-exponential noise s(E - 1), E ~ Exp(1), satisfies
// log E[e^{u(E-1)}] = -u - log(1-u) <= u^2 on |u| <= 1/2, so it is
// sub-exponential with (sigma^2, beta) = (2 s^2, 2 s).
inline bool model_certifies(const LossModel& model, const LossClass& loss) {
  const double s = model.scale;
  switch (model.kind) {
    case LossModelKind::zero_one:
      switch (loss.kind()) {
        case LossClass::Kind::bounded: return loss.range() >= 1.0;
        case LossClass::Kind::sub_gaussian: return loss.sigma() >= 0.5;
        case LossClass::Kind::sub_exponential: return loss.sigma() >= 0.5;
        case LossClass::Kind::bounded_variance: {
          double worst = 0.0;
          for (double mu : model.mean_loss) worst = std::max(worst, mu * (1.0 - mu));
          return loss.variance_bound() >= worst;
        }
      }
      return false;
    case LossModelKind::gaussian:
      switch (loss.kind()) {
        case LossClass::Kind::bounded: return false;  // unbounded support
        case LossClass::Kind::sub_gaussian: return loss.sigma() >= s;
        case LossClass::Kind::sub_exponential: return loss.sigma() >= s;
        case LossClass::Kind::bounded_variance: return loss.variance_bound() >= s * s;
      }
      return false;
    case LossModelKind::shifted_exponential:
      switch (loss.kind()) {
        case LossClass::Kind::bounded: return false;
        case LossClass::Kind::sub_gaussian: return false;  // exponential right tail
        case LossClass::Kind::sub_exponential:
          return loss.sigma() * loss.sigma() >= 2.0 * s * s && loss.beta() >= 2.0 * s;
        case LossClass::Kind::bounded_variance: return loss.variance_bound() >= s * s;
      }
      return false;
  }
  return false;
}

inline const char* model_token(LossModelKind kind) noexcept {
  switch (kind) {
    case LossModelKind::zero_one: return "zero-one";
    case LossModelKind::gaussian: return "gaussian";
    case LossModelKind::shifted_exponential: return "shifted-exp";
  }
  return "?";
}

inline LossModelKind parse_model_kind(std::string_view token) {
  if (token == "zero-one") return LossModelKind::zero_one;
  if (token == "gaussian") return LossModelKind::gaussian;
  if (token == "shifted-exp") return LossModelKind::shifted_exponential;
  raise(errc::bad_parameter, "unknown loss-model token: " + std::string(token));
}

struct GibbsExperiment {
  DiscreteDistribution prior = make_discrete({1.0});
  DiscreteDistribution posterior = make_discrete({1.0});
  LossModel model;
  std::uint64_t m = 100;       // training-set size per trial
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
};

// Mean losses evenly spaced on [0.2, 0.8], uniform prior, exponentially
// tilted posterior q_h proportional to exp(-tilt * mu_h): a small but
// nontrivial posterior/prior gap for coverage experiments.
inline GibbsExperiment make_tilted_gibbs(std::size_t hypotheses, LossModelKind kind,
                                         double scale, double tilt, std::uint64_t m,
                                         std::uint64_t trials, std::uint64_t seed) {
  require(hypotheses >= 2, errc::bad_parameter, "need at least 2 hypotheses");
  require(std::isfinite(tilt), errc::bad_parameter, "tilt must be finite");
  std::vector<double> means(hypotheses);
  for (std::size_t i = 0; i < hypotheses; ++i)
    means[i] = 0.2 + 0.6 * static_cast<double>(i) / static_cast<double>(hypotheses - 1);
  std::vector<double> tilted(hypotheses);
  NeumaierSum norm;
  for (std::size_t i = 0; i < hypotheses; ++i) {
    tilted[i] = std::exp(-tilt * means[i]);
    norm.add(tilted[i]);
  }
  for (double& w : tilted) w /= norm.value();
  GibbsExperiment exp;
  exp.prior = make_discrete(std::vector<double>(hypotheses, 1.0 / hypotheses));
  exp.posterior = make_discrete(std::move(tilted));
  exp.model = LossModel{kind, std::move(means), scale};
  exp.m = m;
  exp.trials = trials;
  exp.seed = seed;
  return exp;
}

inline void validate(const GibbsExperiment& exp) {
  require_same_support(exp.prior, exp.posterior);
  validate(exp.model);
  require(exp.model.mean_loss.size() == exp.prior.size(), errc::length_mismatch,
          "loss model and hypothesis support differ in size");
  require(exp.m >= 1, errc::bad_parameter, "m must be >= 1");
  require(exp.trials >= 1, errc::bad_parameter, "trials must be >= 1");
}

struct GibbsRisks {
  double empirical = 0.0;  // R_S: posterior-weighted mean of m draws per hypothesis
  double true_risk = 0.0;  // R_D: posterior-weighted exact mean loss
};

// One trial of the Gibbs experiment on the derived stream
// Rng::stream(exp.seed, trial). When declared is given, drawn losses are
// checked against it (only the bounded class constrains realizations).
inline GibbsRisks gibbs_risks(const GibbsExperiment& exp, std::uint64_t trial,
                              const LossClass* declared = nullptr) {
  validate(exp);
  if (declared != nullptr)
    require(model_certifies(exp.model, *declared), errc::model_mismatch,
            "data model does not certify the declared loss class");
  Rng rng = Rng::stream(exp.seed, trial);
  const auto& q = exp.posterior.probs();
  const std::size_t H = q.size();
  const double inv_m = 1.0 / static_cast<double>(exp.m);

  GibbsRisks out;
  NeumaierSum rs;
  NeumaierSum rd;
  for (std::size_t h = 0; h < H; ++h) {
    const double mu = exp.model.mean_loss[h];
    NeumaierSum acc;
    for (std::uint64_t j = 0; j < exp.m; ++j) {
      double loss = 0.0;
      switch (exp.model.kind) {
        case LossModelKind::zero_one:
          loss = rng.bernoulli(mu) ? 1.0 : 0.0;
          break;
        case LossModelKind::gaussian:
          loss = mu + exp.model.scale * rng.normal();
          break;
        case LossModelKind::shifted_exponential:
          loss = mu + exp.model.scale * (rng.exponential() - 1.0);
          break;
      }
      if (declared != nullptr && declared->kind() == LossClass::Kind::bounded)
        require(loss >= 0.0 && loss <= declared->range(), errc::model_mismatch,
                "drawn loss escapes the declared bounded range");
      acc.add(loss);
    }
    rs.add(q[h] * acc.value() * inv_m);
    rd.add(q[h] * mu);
  }
  out.empirical = rs.value();
  out.true_risk = rd.value();
  return out;
}

struct CoverageResult {
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double violation_rate = 0.0;
  bool vacuous = false;  // infinite divergence: the bound can never be violated
};

enum class BoundForm { multiplicative, additive };

inline const char* form_token(BoundForm form) noexcept {
  return form == BoundForm::multiplicative ? "multiplicative" : "additive";
}

// Fraction of trials with R_D(G_Q) > R_S(G_Q) + addend. The divergence
// driving the addend is D_alpha(posterior || prior). Deterministic given
// exp.seed for any worker count.
inline CoverageResult coverage_experiment(const GibbsExperiment& exp, const LossClass& loss,
                                          BoundForm form, double delta, double alpha) {
  validate(exp);
  require(model_certifies(exp.model, loss), errc::model_mismatch,
          "data model does not certify the declared loss class");
  const DivergenceValue div =
      f_divergence(DivergenceKind::alpha(alpha), exp.posterior, exp.prior);
  const PacInput in{exp.m, delta, alpha, div};
  const DivergenceValue addend = form == BoundForm::multiplicative
                                     ? addend_multiplicative(loss, in)
                                     : addend_additive(loss, in);
  CoverageResult out;
  out.trials = exp.trials;
  if (addend.is_infinite()) {
    out.vacuous = true;
    return out;
  }
  const double bound_gap = addend.value();
  out.violations = count_trials(exp.trials, [&](std::uint64_t t) {
    const GibbsRisks risks = gibbs_risks(exp, t);
    return risks.true_risk > risks.empirical + bound_gap;
  });
  out.violation_rate = static_cast<double>(out.violations) / static_cast<double>(out.trials);
  return out;
}

}  // namespace comi
