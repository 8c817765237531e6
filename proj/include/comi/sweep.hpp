#pragma once

// Seeded random soundness sweeps: draw (Q, P, phi) triples with phi inside
// the inequality's admissible range and check the bound trial by trial.
// Trial t uses the derived stream Rng::stream(seed, t), so results do not
// depend on evaluation order.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comi/change_of_measure.hpp"
#include "comi/discrete.hpp"
#include "comi/errors.hpp"
#include "comi/interval.hpp"
#include "comi/rng.hpp"

namespace comi {

struct SweepConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t support_min = 2;
  std::size_t support_max = 16;
  // Range for per-trial alpha when the id names an unpinned alpha family.
  double alpha_min = 1.1;
  double alpha_max = 4.0;
  // Optional override of the phi sampling range; must sit inside
  // phi_domain(id).
  std::optional<double> phi_lo;
  std::optional<double> phi_hi;
  // Additive floor before normalization; keeps density ratios bounded so
  // slack tolerances are meaningful.
  double prob_floor = 0.02;
};

// Probabilities proportional to floor + U[0,1).
inline DiscreteDistribution random_distribution(Rng& rng, std::size_t size, double floor = 0.02) {
  require(size > 0, errc::empty_support, "requested empty distribution");
  std::vector<double> w(size);
  for (double& x : w) x = floor + rng.uniform();
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return make_discrete(std::move(w));
}

namespace detail {

// Default phi sampling box for a domain: clip the unbounded sides to +-4 and
// stay 1e-4 inside an open endpoint at 1 so conjugate values stay modest.
inline void phi_sampling_range(const Interval& dom, double& lo, double& hi) {
  lo = std::max(dom.lo, -4.0);
  hi = std::min(dom.hi, 4.0);
  if (dom.hi_open && dom.hi <= 4.0) hi = dom.hi - 1e-4;
  if (dom.lo_open && dom.lo >= -4.0) lo = dom.lo + 1e-4;
}

}  // namespace detail

inline TestFunction random_phi(Rng& rng, std::size_t size, double lo, double hi) {
  std::vector<double> v(size);
  for (double& x : v) x = rng.uniform(lo, hi);
  return TestFunction(std::move(v));
}

// Runs the sweep and reports each trial through on_report(trial, id, report).
// Returns the number of violated trials. For unpinned alpha families each
// trial draws alpha uniformly from [alpha_min, alpha_max].
template <typename OnReport>
std::uint64_t sweep_inequality(const InequalityId& id, const SweepConfig& cfg,
                               OnReport&& on_report) {
  require(cfg.trials > 0, errc::bad_parameter, "sweep needs at least one trial");
  require(cfg.support_min >= 2 && cfg.support_max >= cfg.support_min, errc::bad_parameter,
          "support range must satisfy 2 <= min <= max");
  require(cfg.alpha_min > 1.0 && cfg.alpha_max >= cfg.alpha_min, errc::bad_parameter,
          "alpha range must satisfy 1 < min <= max");

  const Interval dom = phi_domain(id);
  double lo = 0.0;
  double hi = 0.0;
  detail::phi_sampling_range(dom, lo, hi);
  if (cfg.phi_lo.has_value()) lo = *cfg.phi_lo;
  if (cfg.phi_hi.has_value()) hi = *cfg.phi_hi;
  require(lo <= hi, errc::bad_parameter, "phi range is empty");
  require(dom.contains_closed_range(lo, hi), errc::phi_domain,
          "phi range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] outside " +
              dom.describe() + " for " + id.token());

  std::uint64_t violations = 0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng rng = Rng::stream(cfg.seed, t);
    InequalityId pinned = id;
    if (id.parameterized_family() && !id.pinned())
      pinned = id.with_alpha(rng.uniform(cfg.alpha_min, cfg.alpha_max));
    const std::size_t size =
        cfg.support_min +
        static_cast<std::size_t>(rng.uniform() * double(cfg.support_max - cfg.support_min + 1)) %
            (cfg.support_max - cfg.support_min + 1);
    const DiscreteDistribution q = random_distribution(rng, size, cfg.prob_floor);
    const DiscreteDistribution p = random_distribution(rng, size, cfg.prob_floor);
    const TestFunction phi = random_phi(rng, size, lo, hi);
    const BoundReport report = verify(pinned, q, p, phi);
    if (!report.holds) ++violations;
    on_report(t, pinned, report);
  }
  return violations;
}

}  // namespace comi
