#pragma once

// One-dimensional Gaussians: the reference sampling distributions for the
// Monte-Carlo certification experiments, together with their strong
// log-concavity parameter.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "comi/errors.hpp"
#include "comi/rng.hpp"

namespace comi {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

class Gaussian1D {
 public:
  Gaussian1D(double mean, double variance) : mean_(mean), variance_(variance) {
    require(std::isfinite(mean), errc::bad_parameter, "gaussian mean is not finite");
    require(std::isfinite(variance) && variance > 0.0, errc::bad_parameter,
            "gaussian variance must be positive");
  }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double stddev() const noexcept { return std::sqrt(variance_); }

 private:
  double mean_;
  double variance_;
};

// Curvature of -log density: N(mu, v) is strongly log-concave with gamma = 1/v.
inline double gaussian_gamma(const Gaussian1D& g) noexcept { return 1.0 / g.variance(); }

// The sample at (seed, index) is a pure function of the pair: each normal
// consumes exactly two stream words, so index-th draw == stream position
// 2*index. sample_gaussian(g, n, seed)[i] == gaussian_sample_at(g, seed, i).
inline double gaussian_sample_at(const Gaussian1D& g, std::uint64_t seed, std::uint64_t index) {
  Rng r(seed);
  r.discard(2 * index);
  return g.mean() + g.stddev() * r.normal();
}

inline std::vector<double> sample_gaussian(const Gaussian1D& g, std::size_t n,
                                           std::uint64_t seed) {
  require(n > 0, errc::zero_samples, "requested zero samples");
  Rng r(seed);
  std::vector<double> out(n);
  const double m = g.mean();
  const double s = g.stddev();
  for (std::size_t i = 0; i < n; ++i) out[i] = m + s * r.normal();
  return out;
}

// A strongly log-concave sampling model: the certified curvature gamma plus a
// deterministic sampler. Identical (seed, index) pairs always yield identical
// samples.
struct LogConcaveSpec {
  double gamma;
  std::function<double(std::uint64_t seed, std::uint64_t index)> sampler;
};

inline LogConcaveSpec log_concave_spec(const Gaussian1D& g) {
  return LogConcaveSpec{gaussian_gamma(g), [g](std::uint64_t seed, std::uint64_t index) {
                          return gaussian_sample_at(g, seed, index);
                        }};
}

}  // namespace comi
