#pragma once

// Finite discrete probability distributions and the index-aligned test
// functions they are paired with. Distributions are immutable once built;
// validation happens in make_discrete and nowhere else.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "comi/errors.hpp"
#include "comi/sum.hpp"

namespace comi {

class DiscreteDistribution {
 public:
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend DiscreteDistribution make_discrete(std::vector<double> probs,
                                            std::vector<std::string> labels);

 private:
  DiscreteDistribution(std::vector<double> probs, std::vector<std::string> labels)
      : probs_(std::move(probs)), labels_(std::move(labels)) {}

  std::vector<double> probs_;
  std::vector<std::string> labels_;
};

// Validates and renormalizes a probability vector. Entries in [-1e-12, 0)
// are treated as rounding noise and clamped to zero; anything more negative
// is rejected. The total mass must already be within 1e-6 of one, and after
// renormalization it is one to within 1e-12.
inline DiscreteDistribution make_discrete(std::vector<double> probs,
                                          std::vector<std::string> labels = {}) {
  require(!probs.empty(), errc::empty_support, "probability vector is empty");
  for (double& p : probs) {
    require(std::isfinite(p), errc::domain_error, "probability is not finite");
    if (p < 0.0) {
      require(p >= -1e-12, errc::negative_mass,
              "probability " + std::to_string(p) + " below -1e-12");
      p = 0.0;
    }
  }
  NeumaierSum total;
  for (double p : probs) total.add(p);
  const double mass = total.value();
  require(std::fabs(mass - 1.0) <= 1e-6, errc::mass_too_far,
          "total mass " + std::to_string(mass));
  for (double& p : probs) p /= mass;

  if (labels.empty()) {
    labels.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) labels.push_back(std::to_string(i));
  } else {
    require(labels.size() == probs.size(), errc::length_mismatch,
            "labels and probs differ in length");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
      require(seen.insert(l).second, errc::domain_error, "duplicate support label: " + l);
  }
  return DiscreteDistribution(std::move(probs), std::move(labels));
}

// Test function phi, index-aligned with a distribution's support.
class TestFunction {
 public:
  explicit TestFunction(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      require(std::isfinite(v), errc::domain_error, "test function value is not finite");
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

inline void require_aligned(const DiscreteDistribution& p, const TestFunction& phi) {
  require(p.size() == phi.size(), errc::length_mismatch,
          "distribution has " + std::to_string(p.size()) + " atoms, phi has " +
              std::to_string(phi.size()));
}

inline bool same_support(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  return a.size() == b.size() && a.labels() == b.labels();
}

inline void require_same_support(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  require(same_support(a, b), errc::support_mismatch,
          "distributions are not on a shared support");
}

inline double expectation(const DiscreteDistribution& p, const TestFunction& phi) {
  require_aligned(p, phi);
  return compensated_dot(p.probs(), phi.values());
}

// Two-pass centered form of E[phi^2] - E[phi]^2; never returns a negative
// value.
inline double variance(const DiscreteDistribution& p, const TestFunction& phi) {
  const double mean = expectation(p, phi);
  NeumaierSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = phi[i] - mean;
    s.add(p.probs()[i] * d * d);
  }
  const double v = s.value();
  return v < 0.0 ? 0.0 : v;
}

// Pointwise density ratio dQ/dP on a shared support. Points with
// q == p == 0 contribute ratio 1 by convention. Returns nullopt when Q is
// not absolutely continuous w.r.t. P (some q > 0 where p == 0).
inline std::optional<std::vector<double>> radon_nikodym(const DiscreteDistribution& q,
                                                        const DiscreteDistribution& p) {
  require_same_support(q, p);
  std::vector<double> ratio(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double qi = q.probs()[i];
    const double pi = p.probs()[i];
    if (pi > 0.0) {
      ratio[i] = qi / pi;
    } else if (qi == 0.0) {
      ratio[i] = 1.0;
    } else {
      return std::nullopt;
    }
  }
  return ratio;
}

}  // namespace comi
