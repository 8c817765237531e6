// Acceptance gate: ten end-to-end checks over the whole library plus the
// batch binary, one [PASS]/[FAIL] line each, nonzero exit when any fails.
// Each line carries the measured numbers and the elapsed time so regressions
// in either are visible from the log alone.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <comi/comi.hpp>

#include "oracle.hpp"

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

// 1. Randomized soundness: every inequality, 10,000 seeded (Q, P, phi)
// triples with supports of size 2-16 and phi inside its admissible range,
// zero violations at the -1e-9 slack tolerance.
Outcome soundness_sweep() {
  static const char* kIds[] = {
      "kl-constrained",         "kl-unconstrained",
      "pearson-chi2-constrained", "pearson-chi2-unconstrained",
      "tv-constrained",         "alpha-unconstrained",
      "hellinger2-unconstrained", "reverse-kl-unconstrained",
      "neyman-chi2-unconstrained", "multiplicative-chi2",
      "multiplicative-alpha",   "hcr-chi2",
      "hcr-generalized",
  };
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  for (const char* token : kIds) {
    comi::SweepConfig cfg;
    cfg.trials = 10000;
    cfg.seed = 2024;
    violations += comi::sweep_inequality(comi::InequalityId::parse(token), cfg,
                                         [](std::uint64_t, const comi::InequalityId&,
                                            const comi::BoundReport&) {});
    trials += cfg.trials;
  }
  std::ostringstream ss;
  ss << trials << " random triples across 13 inequalities, " << violations << " violations";
  return {violations == 0, ss.str()};
}

// 2. Every closed-form convex conjugate against an independent grid search
// over its generator, >= 50 points per kind across the effective domain.
Outcome conjugate_oracle() {
  struct Row {
    comi::DivergenceKind kind;
    std::function<double(double)> raw;
    double xlo, xhi;
    double ylo, yhi;
    int points;
  };
  const double step = 1e-4;
  const std::vector<Row> rows = {
      {comi::DivergenceKind::pearson_chi2(),
       [](double x) { return (x - 1.0) * (x - 1.0); }, -50.0, 50.0, -6.0, 12.0, 55},
      {comi::DivergenceKind::kl(),
       [](double x) { return x == 0.0 ? 1.0 : x * std::log(x) - x + 1.0; }, 0.0, 40.0, -4.0,
       3.5, 55},
      {comi::DivergenceKind::alpha(1.5),
       [](double x) { return (std::pow(x, 1.5) - 1.0) / 0.75; }, 0.0, 10.0, 0.0, 4.0, 51},
      {comi::DivergenceKind::alpha(2.0),
       [](double x) { return (x * x - 1.0) / 2.0; }, 0.0, 10.0, 0.0, 4.0, 51},
      {comi::DivergenceKind::alpha(3.0),
       [](double x) { return (x * x * x - 1.0) / 6.0; }, 0.0, 10.0, 0.0, 4.0, 51},
      {comi::DivergenceKind::squared_hellinger(),
       [](double x) {
         const double d = std::sqrt(x) - 1.0;
         return d * d;
       },
       0.0, 50.0, -5.0, 0.85, 56},
      {comi::DivergenceKind::neyman_chi2(),
       [](double x) { return (1.0 - x) * (1.0 - x) / x; }, step, 8.0, -5.0, 0.9, 60},
      // The exposed reverse-KL conjugate pairs with the normalized generator
      // x - 1 - log x (same divergence on probability vectors).
      {comi::DivergenceKind::reverse_kl(),
       [](double x) { return x - 1.0 - std::log(x); }, step, 12.0, -5.0, 0.9, 60},
  };

  double worst = 0.0;
  int total_points = 0;
  for (const Row& row : rows) {
    for (int i = 0; i < row.points; ++i) {
      const double y = row.ylo + (row.yhi - row.ylo) * double(i) / double(row.points - 1);
      const double grid = oracle::conjugate_sup(row.raw, y, row.xlo, row.xhi, step);
      const double closed = comi::conjugate_fstar(row.kind, y);
      worst = std::max(worst, std::fabs(closed - grid));
      ++total_points;
    }
  }
  std::ostringstream ss;
  ss << "8 conjugates, " << total_points << " grid points, max |closed - grid| = " << worst;
  return {worst <= 1e-6, ss.str()};
}

// 3. Order-2 collapses: pearson chi2 = 2 * alpha(2), pseudo-alpha(2) = chi2,
// the order-2 multiplicative bound equals the chi2 one, and the generalized
// gap bound at order 2 equals sqrt(chi2 * Var_P phi).
Outcome order_two_reductions() {
  comi::Rng rng(314);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 11.0);
    const auto q = comi::random_distribution(rng, n);
    const auto p = comi::random_distribution(rng, n);
    const auto phi = comi::random_phi(rng, n, -3.0, 3.0);

    const double chi2 = comi::f_divergence(comi::DivergenceKind::pearson_chi2(), q, p).value();
    const double d2 = comi::f_divergence(comi::DivergenceKind::alpha(2.0), q, p).value();
    const double pseudo2 = comi::pseudo_alpha_divergence(2.0, q, p).value();
    worst = std::max(worst, std::fabs(chi2 - 2.0 * d2));
    worst = std::max(worst, std::fabs(pseudo2 - chi2));

    const double mult_a =
        comi::verify(comi::InequalityId::parse("multiplicative-alpha:2"), q, p, phi).rhs.value();
    const double mult_c =
        comi::verify(comi::InequalityId::parse("multiplicative-chi2"), q, p, phi).rhs.value();
    worst = std::max(worst, std::fabs(mult_a - mult_c));

    const double hcr2 = comi::hcr_gap_bound(2.0, q, p, phi).value();
    worst = std::max(worst, std::fabs(hcr2 - std::sqrt(chi2 * comi::variance(p, phi))));
  }
  std::ostringstream ss;
  ss << "1000 random pairs, max identity defect = " << worst;
  return {worst <= 1e-12, ss.str()};
}

// 4. Orderings: centering the chi2 bound subtracts exactly (E_P phi)^2 / 4;
// the log-moment KL bound never exceeds the raw exp-moment variant; the
// fourth-root multiplicative addend never exceeds the square-root variant.
Outcome tightness_orderings() {
  comi::Rng rng(159);
  double worst_eq = 0.0;
  double worst_order = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 11.0);
    const auto q = comi::random_distribution(rng, n);
    const auto p = comi::random_distribution(rng, n);
    const auto phi = comi::random_phi(rng, n, -3.0, 3.0);

    const double con =
        comi::verify(comi::InequalityId::parse("pearson-chi2-constrained"), q, p, phi)
            .rhs.value();
    const double unc =
        comi::verify(comi::InequalityId::parse("pearson-chi2-unconstrained"), q, p, phi)
            .rhs.value();
    const double mean = comi::expectation(p, phi);
    worst_eq = std::max(worst_eq, std::fabs(con - (unc - mean * mean / 4.0)));

    const double kl_con =
        comi::verify(comi::InequalityId::parse("kl-constrained"), q, p, phi).rhs.value();
    const double kl_unc =
        comi::verify(comi::InequalityId::parse("kl-unconstrained"), q, p, phi).rhs.value();
    worst_order = std::max(worst_order, kl_con - kl_unc);

    const auto loss = comi::LossClass::bounded(1.0);
    const std::uint64_t m = 20 + static_cast<std::uint64_t>(rng.uniform() * 480.0);
    const double delta = rng.uniform(0.01, 0.3);
    const double chi2 = rng.uniform(1e-3, 5.0);
    const comi::PacInput in{m, delta, 2.0, comi::DivergenceValue::finite(chi2 / 2.0)};
    const double tight = comi::addend_multiplicative(loss, in).value();
    const double loose =
        std::sqrt(comi::concentration_rate(loss, m, delta) * (chi2 + 1.0));
    worst_order = std::max(worst_order, tight - loose);
  }
  std::ostringstream ss;
  ss << "1000 trials, max centering defect = " << worst_eq
     << ", max ordering excess = " << worst_order;
  return {worst_eq <= 1e-12 && worst_order <= 1e-12, ss.str()};
}

// 5. The grid variational lower bound never exceeds the divergence, for every
// kind with a usable conjugate, over 1000 random pairs x 200 test functions.
Outcome variational_dominance() {
  const std::vector<comi::DivergenceKind> kinds = {
      comi::DivergenceKind::kl(),          comi::DivergenceKind::pearson_chi2(),
      comi::DivergenceKind::alpha(1.5),    comi::DivergenceKind::alpha(2.0),
      comi::DivergenceKind::alpha(3.0),    comi::DivergenceKind::squared_hellinger(),
      comi::DivergenceKind::neyman_chi2(), comi::DivergenceKind::reverse_kl(),
  };
  comi::Rng rng(265);
  double worst = -1e300;
  for (const auto& kind : kinds) {
    double lo = 0.0;
    double hi = 0.0;
    comi::detail::phi_sampling_range(comi::conjugate_domain(kind), lo, hi);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
      const auto q = comi::random_distribution(rng, n);
      const auto p = comi::random_distribution(rng, n);
      std::vector<comi::TestFunction> grid;
      grid.reserve(200);
      for (int g = 0; g < 200; ++g) grid.push_back(comi::random_phi(rng, n, lo, hi));
      const double lower = comi::variational_lower_bound(kind, q, p, grid);
      const double div = comi::f_divergence(kind, q, p).value();
      worst = std::max(worst, lower - div);
    }
  }
  std::ostringstream ss;
  ss << "8 kinds x 1000 pairs x 200-point grids, max (lower - divergence) = " << worst;
  return {worst <= 1e-9, ss.str()};
}

// 6. Simulated posterior-risk coverage for three loss models, 2000 trials at
// m = 200, delta = 0.1: the violation rate stays within three binomial
// standard deviations of the declared level.
Outcome pac_coverage() {
  struct ModelRow {
    comi::LossModelKind kind;
    comi::LossClass loss;
    const char* label;
  };
  const std::vector<ModelRow> rows = {
      {comi::LossModelKind::zero_one, comi::LossClass::bounded(1.0), "zero-one"},
      {comi::LossModelKind::gaussian, comi::LossClass::sub_gaussian(1.0), "gaussian"},
      {comi::LossModelKind::shifted_exponential,
       comi::LossClass::sub_exponential(std::numbers::sqrt2, 2.0), "shifted-exp"},
  };
  const double threshold = 0.1 + 3.0 * std::sqrt(0.09 / 2000.0);
  bool ok = true;
  std::ostringstream ss;
  for (const ModelRow& row : rows) {
    const auto exp =
        comi::make_tilted_gibbs(20, row.kind, 1.0, 1.0, 200, 2000, 4242);
    const auto res =
        comi::coverage_experiment(exp, row.loss, comi::BoundForm::multiplicative, 0.1, 2.0);
    ok = ok && !res.vacuous && res.violation_rate <= threshold;
    ss << row.label << "=" << res.violation_rate << " ";
  }
  ss << "(all must be <= " << threshold << ")";
  return {ok, ss.str()};
}

// 7. Certified-interval coverage against the analytic mean of the shifted
// Gaussian: each form must cover at its declared level over 500 repeats.
Outcome mc_coverage() {
  const comi::Gaussian1D q(0.5, 1.0);
  const comi::Gaussian1D p(0.0, 1.0);
  const auto phi = comi::PhiSpec::identity();
  const auto run = [&](comi::CertifyForm form) {
    return comi::mc_coverage_experiment(form, q, p, phi, 10000, 0.05, 500, 77, 2.0);
  };
  const auto kl = run(comi::CertifyForm::kl);
  const auto chi2 = run(comi::CertifyForm::chi2);
  const auto pseudo = run(comi::CertifyForm::pseudo_alpha);
  const bool ok =
      kl.coverage >= 0.95 && chi2.coverage >= 0.9025 && pseudo.coverage >= 0.95;
  std::ostringstream ss;
  ss << "kl=" << kl.coverage << " (need >= 0.95), chi2=" << chi2.coverage
     << " (>= 0.9025), pseudo-alpha=" << pseudo.coverage << " (>= 0.95)";
  return {ok, ss.str()};
}

// 8. Gaussian chi2 and KL closed forms against the independent fixed-grid
// Simpson oracle on 25 (mean, variance) pairs.
Outcome gaussian_quadrature() {
  const auto density = [](double x, double mean, double var) {
    const double z = (x - mean) / std::sqrt(var);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * var);
  };
  const comi::Gaussian1D p(0.0, 1.0);
  double worst = 0.0;
  int pairs = 0;
  for (double mean : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double var : {0.6, 0.8, 1.0, 1.25, 1.4}) {
      const comi::Gaussian1D q(mean, var);
      const double chi2_oracle =
          oracle::simpson_integral(
              [&](double x) {
                const double qx = density(x, mean, var);
                return qx * qx / density(x, 0.0, 1.0);
              },
              -14.0, 14.0, 1e-10) -
          1.0;
      const double kl_oracle = oracle::simpson_integral(
          [&](double x) {
            const double qx = density(x, mean, var);
            return qx * std::log(qx / density(x, 0.0, 1.0));
          },
          -14.0, 14.0, 1e-10);
      worst = std::max(worst, std::fabs(comi::chi2_gaussian(q, p).value() - chi2_oracle));
      worst = std::max(worst, std::fabs(comi::kl_gaussian(q, p).value() - kl_oracle));
      ++pairs;
    }
  }
  std::ostringstream ss;
  ss << pairs << " (mean, variance) pairs, max |closed - quadrature| = " << worst;
  return {worst <= 1e-7, ss.str()};
}

// 9. The |t - 1|^alpha convexity probe stays non-negative over 100,000
// random (alpha, x, y, lambda) draws.
Outcome convexity_probe() {
  comi::Rng rng(358);
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const double alpha = rng.uniform(1.1, 4.0);
    const double x = rng.uniform(0.0, 4.0);
    const double y = rng.uniform(0.0, 4.0);
    const double lambda = rng.uniform();
    worst = std::min(worst, comi::convexity_probe(alpha, x, y, lambda));
  }
  std::ostringstream ss;
  ss << "100000 probes, min value = " << worst;
  return {worst >= -1e-12, ss.str()};
}

// 10. Repeating a CLI run with the same seed yields byte-identical output.
Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("comi-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const auto run = [&](const std::string& args, const fs::path& out) -> bool {
    const std::string cmd =
        std::string(COMI_CLI_PATH) + " " + args + " --out " + out.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) && WEXITSTATUS(raw) == 0;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  const std::vector<std::string> commands = {
      "verify --id multiplicative-alpha --trials 300 --seed 9",
      "coverage --experiment mc --form chi2 --q-mean 0.3 --n 20 --repeats 10 --delta 0.2 "
      "--seed 5",
  };
  bool ok = true;
  int checked = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path a = dir / ("a" + std::to_string(i));
    const fs::path b = dir / ("b" + std::to_string(i));
    if (!run(commands[i], a) || !run(commands[i], b)) {
      ok = false;
      continue;
    }
    const std::string sa = slurp(a);
    ok = ok && !sa.empty() && sa == slurp(b);
    ++checked;
  }
  std::ostringstream ss;
  ss << checked << "/" << commands.size() << " repeated runs byte-identical";
  return {ok && checked == static_cast<int>(commands.size()), ss.str()};
}

int run_all() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Criterion> criteria = {
      {"soundness-sweep", soundness_sweep},
      {"conjugate-oracle", conjugate_oracle},
      {"order-two-reductions", order_two_reductions},
      {"tightness-orderings", tightness_orderings},
      {"variational-dominance", variational_dominance},
      {"pac-coverage", pac_coverage},
      {"mc-coverage", mc_coverage},
      {"gaussian-quadrature", gaussian_quadrature},
      {"convexity-probe", convexity_probe},
      {"cli-determinism", cli_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.ok) ++failures;
    std::printf("[%s] %2zu %-22s %s (%.1fs)\n", out.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d of %zu checks failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main() { return run_all(); }
