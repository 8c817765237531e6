#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "comi/change_of_measure.hpp"
#include "comi/rng.hpp"
#include "comi/sweep.hpp"

namespace {

template <typename F>
std::optional<comi::errc> code_of(F&& f) {
  try {
    f();
  } catch (const comi::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

comi::DiscreteDistribution random_dist(comi::Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = 0.05 + rng.uniform();
  double total = 0.0;
  for (double x : w) total += x;
  for (auto& x : w) x /= total;
  return comi::make_discrete(std::move(w));
}

comi::TestFunction sample_phi(comi::Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return comi::TestFunction(std::move(v));
}

// The id for a family, left unpinned for the alpha families.
comi::InequalityId id_for(comi::InequalityFamily family) {
  using comi::InequalityId;
  switch (family) {
    case comi::InequalityFamily::kl_constrained: return InequalityId::kl_constrained();
    case comi::InequalityFamily::kl_unconstrained: return InequalityId::kl_unconstrained();
    case comi::InequalityFamily::pearson_chi2_constrained:
      return InequalityId::pearson_chi2_constrained();
    case comi::InequalityFamily::pearson_chi2_unconstrained:
      return InequalityId::pearson_chi2_unconstrained();
    case comi::InequalityFamily::tv_constrained: return InequalityId::tv_constrained();
    case comi::InequalityFamily::alpha_unconstrained:
      return InequalityId::alpha_unconstrained();
    case comi::InequalityFamily::hellinger2_unconstrained:
      return InequalityId::hellinger2_unconstrained();
    case comi::InequalityFamily::reverse_kl_unconstrained:
      return InequalityId::reverse_kl_unconstrained();
    case comi::InequalityFamily::neyman_chi2_unconstrained:
      return InequalityId::neyman_chi2_unconstrained();
    case comi::InequalityFamily::multiplicative_chi2:
      return InequalityId::multiplicative_chi2();
    case comi::InequalityFamily::multiplicative_alpha:
      return InequalityId::multiplicative_alpha();
    case comi::InequalityFamily::hcr_chi2: return InequalityId::hcr_chi2();
    case comi::InequalityFamily::hcr_generalized: return InequalityId::hcr_generalized();
  }
  return InequalityId::kl_constrained();
}

}  // namespace

TEST_CASE("phi domains per inequality") {
  using comi::InequalityId;
  const auto tv = comi::phi_domain(InequalityId::tv_constrained());
  REQUIRE(tv.lo == 0.0);
  REQUIRE(tv.hi == 1.0);
  REQUIRE_FALSE(tv.lo_open);
  REQUIRE_FALSE(tv.hi_open);

  const auto h2 = comi::phi_domain(InequalityId::hellinger2_unconstrained());
  REQUIRE(h2.hi == 1.0);
  REQUIRE(h2.hi_open);
  REQUIRE(h2.contains(-100.0));
  REQUIRE_FALSE(h2.contains(1.0));

  const auto kl = comi::phi_domain(InequalityId::kl_constrained());
  REQUIRE(kl.contains(-1e6));
  REQUIRE(kl.contains(1e6));

  const auto al = comi::phi_domain(InequalityId::alpha_unconstrained(2.0));
  REQUIRE(al.lo == 0.0);
  REQUIRE_FALSE(al.contains(-0.01));
}

TEST_CASE("constant phi saturates the constrained KL bound") {
  const auto p = comi::make_discrete({0.3, 0.7});
  for (double c : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    const comi::TestFunction phi({c, c});
    const auto report = comi::verify(comi::InequalityId::kl_constrained(), p, p, phi);
    REQUIRE_THAT(report.rhs.value(), Catch::Matchers::WithinAbs(c, 1e-12));
    REQUIRE_THAT(report.lhs, Catch::Matchers::WithinAbs(c, 1e-12));
    REQUIRE(report.holds);
  }
}

TEST_CASE("hand-checked right-hand sides") {
  const auto q = comi::make_discrete({0.5, 0.5});
  const auto p = comi::make_discrete({0.25, 0.75});
  const comi::TestFunction phi({1.0, 0.0});

  const auto chi2_c =
      comi::upper_bound(comi::InequalityId::pearson_chi2_constrained(), q, p, phi);
  REQUIRE_THAT(chi2_c.value(),
               Catch::Matchers::WithinAbs(1.0 / 3.0 + 0.25 + 0.046875, 1e-12));

  const auto mult2 = comi::upper_bound(comi::InequalityId::multiplicative_alpha(2.0), q, p, phi);
  REQUIRE_THAT(mult2.value(), Catch::Matchers::WithinAbs(std::sqrt(4.0 / 3.0 * 0.25), 1e-12));
  REQUIRE_THAT(mult2.value(), Catch::Matchers::WithinAbs(0.577350, 1e-6));

  REQUIRE(code_of([&] {
            comi::upper_bound(comi::InequalityId::hellinger2_unconstrained(), q, p,
                              comi::TestFunction({1.0, 0.0}));
          }) == comi::errc::phi_domain);
  REQUIRE(code_of([&] {
            comi::upper_bound(comi::InequalityId::tv_constrained(), q, p,
                              comi::TestFunction({1.5, 0.0}));
          }) == comi::errc::phi_domain);
}

TEST_CASE("negative constant phi keeps signed bound values") {
  // The KL right-hand sides are genuinely negative here; the report must carry
  // the signed value through rather than clamping it.
  const auto p = comi::make_discrete({0.5, 0.5});
  const comi::TestFunction phi({-2.0, -2.0});
  const auto report = comi::verify(comi::InequalityId::kl_constrained(), p, p, phi);
  REQUIRE_THAT(report.rhs.value(), Catch::Matchers::WithinAbs(-2.0, 1e-12));
  REQUIRE(report.holds);
  REQUIRE_THAT(report.slack, Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("hcr gap bound") {
  const auto q = comi::make_discrete({0.5, 0.5});
  const auto p = comi::make_discrete({0.25, 0.75});
  const comi::TestFunction phi({1.0, 0.0});

  const auto gap = comi::hcr_gap_bound(2.0, q, p, phi);
  REQUIRE_THAT(gap.value(), Catch::Matchers::WithinAbs(0.25, 1e-12));
  // This phi has phi - mu_P proportional to the density-ratio residual, so
  // the bound is attained exactly.
  const double lhs = std::fabs(comi::expectation(q, phi) - comi::expectation(p, phi));
  REQUIRE_THAT(gap.value(), Catch::Matchers::WithinAbs(lhs, 1e-12));

  REQUIRE(comi::hcr_gap_bound(1.5, q, q, phi).value() == 0.0);
  REQUIRE(comi::hcr_gap_bound(2.0, q, p, comi::TestFunction({0.7, 0.7})).value() == 0.0);
  REQUIRE(code_of([&] { comi::hcr_gap_bound(1.0, q, p, phi); }) == comi::errc::bad_parameter);
}

TEST_CASE("constrained chi2 optimal density") {
  const auto p = comi::make_discrete({0.25, 0.75});
  const comi::TestFunction phi({1.0, 0.0});

  const auto flat = comi::constrained_chi2_optimal_density(p, comi::TestFunction({2.0, 2.0}));
  REQUIRE(flat.values == std::vector<double>{1.0, 1.0});
  REQUIRE(flat.all_nonnegative);

  const auto opt = comi::constrained_chi2_optimal_density(p, phi);
  REQUIRE_THAT(opt.values[0], Catch::Matchers::WithinAbs(1.375, 1e-15));
  REQUIRE_THAT(opt.values[1], Catch::Matchers::WithinAbs(0.875, 1e-15));

  comi::Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const auto pr = random_dist(rng, n);
    const auto f = sample_phi(rng, n, -3.0, 3.0);
    const auto d = comi::constrained_chi2_optimal_density(pr, f);

    comi::NeumaierSum mass;
    for (std::size_t i = 0; i < n; ++i) mass.add(d.values[i] * pr.probs()[i]);
    REQUIRE_THAT(mass.value(), Catch::Matchers::WithinAbs(1.0, 1e-12));

    // Lagrangian objective at the optimum: E_P[phi p - (p - 1)^2] equals
    // E_P[phi] + Var_P[phi]/4.
    comi::NeumaierSum objective;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = d.values[i];
      objective.add(pr.probs()[i] * (f[i] * g - (g - 1.0) * (g - 1.0)));
    }
    const double expected = comi::expectation(pr, f) + 0.25 * comi::variance(pr, f);
    REQUIRE_THAT(objective.value(), Catch::Matchers::WithinAbs(expected, 1e-12));
  }

  // Large-spread phi drives some p* entries negative, which is reported.
  const auto saturated =
      comi::constrained_chi2_optimal_density(p, comi::TestFunction({-8.0, 8.0}));
  REQUIRE_FALSE(saturated.all_nonnegative);
}

TEST_CASE("tightness identities") {
  comi::Rng rng(47);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const auto q = random_dist(rng, n);
    const auto p = random_dist(rng, n);
    const auto phi = sample_phi(rng, n, -2.0, 2.0);

    const double con =
        comi::upper_bound(comi::InequalityId::pearson_chi2_constrained(), q, p, phi).value();
    const double unc =
        comi::upper_bound(comi::InequalityId::pearson_chi2_unconstrained(), q, p, phi).value();
    const double mean = comi::expectation(p, phi);
    REQUIRE_THAT(con, Catch::Matchers::WithinAbs(unc - 0.25 * mean * mean, 1e-12));

    const double kl_con =
        comi::upper_bound(comi::InequalityId::kl_constrained(), q, p, phi).value();
    const double kl_unc =
        comi::upper_bound(comi::InequalityId::kl_unconstrained(), q, p, phi).value();
    REQUIRE(kl_con <= kl_unc + 1e-12);

    const double mult_a =
        comi::upper_bound(comi::InequalityId::multiplicative_alpha(2.0), q, p, phi).value();
    const double mult_c =
        comi::upper_bound(comi::InequalityId::multiplicative_chi2(), q, p, phi).value();
    REQUIRE_THAT(mult_a, Catch::Matchers::WithinAbs(mult_c, 1e-12));

    const double hcr2 = comi::hcr_gap_bound(2.0, q, p, phi).value();
    const double chi2 =
        comi::f_divergence(comi::DivergenceKind::pearson_chi2(), q, p).value();
    REQUIRE_THAT(hcr2,
                 Catch::Matchers::WithinAbs(std::sqrt(chi2 * comi::variance(p, phi)), 1e-12));
  }
}

TEST_CASE("verify holds at Q = P for every inequality") {
  comi::Rng rng(53);
  const auto p = random_dist(rng, 5);
  for (comi::InequalityFamily family : comi::InequalityId::all_families()) {
    comi::InequalityId id = id_for(family);
    if (id.parameterized_family()) id = id.with_alpha(2.5);
    const comi::Interval dom = comi::phi_domain(id);
    double lo = std::max(dom.lo, -1.0);
    double hi = std::min(dom.hi, 1.0);
    if (dom.hi_open && dom.hi <= 1.0) hi = dom.hi - 1e-4;
    const auto phi = sample_phi(rng, 5, lo, hi);
    const auto report = comi::verify(id, p, p, phi);
    REQUIRE(report.holds);
    REQUIRE_FALSE(report.vacuous());
  }
}

TEST_CASE("vacuous bound on absolute-continuity failure") {
  const auto q = comi::make_discrete({1.0, 0.0});
  const auto p = comi::make_discrete({0.0, 1.0});
  const comi::TestFunction phi({0.5, 0.5});
  const auto report = comi::verify(comi::InequalityId::kl_constrained(), q, p, phi);
  REQUIRE(report.vacuous());
  REQUIRE(report.holds);
  REQUIRE(std::isinf(report.slack));
}

TEST_CASE("inequality tokens round trip") {
  using comi::InequalityId;
  for (const char* token :
       {"kl-constrained", "kl-unconstrained", "pearson-chi2-constrained",
        "pearson-chi2-unconstrained", "tv-constrained", "alpha-unconstrained:2",
        "hellinger2-unconstrained", "reverse-kl-unconstrained", "neyman-chi2-unconstrained",
        "multiplicative-chi2", "multiplicative-alpha:1.5", "hcr-chi2", "hcr-generalized:3"}) {
    REQUIRE(InequalityId::parse(token).token() == token);
  }
  REQUIRE_FALSE(InequalityId::parse("alpha-unconstrained").pinned());
  REQUIRE(InequalityId::parse("alpha-unconstrained:2.5").alpha() == 2.5);
  REQUIRE(InequalityId::parse("multiplicative-alpha").with_alpha(3.0).alpha() == 3.0);
  REQUIRE(code_of([] { InequalityId::parse("tv-constrained:2"); }) ==
          comi::errc::bad_parameter);
  REQUIRE(code_of([] { InequalityId::parse("nonsense"); }) == comi::errc::bad_parameter);
  REQUIRE(code_of([] { InequalityId::parse("alpha-unconstrained:1"); }) ==
          comi::errc::bad_parameter);
  REQUIRE(code_of([] { (void)InequalityId::parse("alpha-unconstrained").alpha(); }) ==
          comi::errc::bad_parameter);
}

TEST_CASE("random sweeps find no violations") {
  for (comi::InequalityFamily family : comi::InequalityId::all_families()) {
    const comi::InequalityId id = id_for(family);
    comi::SweepConfig cfg;
    cfg.trials = 500;
    cfg.seed = 7;
    std::uint64_t reports = 0;
    const std::uint64_t violations = comi::sweep_inequality(
        id, cfg, [&](std::uint64_t, const comi::InequalityId& pinned,
                     const comi::BoundReport& report) {
          ++reports;
          REQUIRE(pinned.pinned());
          REQUIRE(report.holds);
        });
    REQUIRE(violations == 0);
    REQUIRE(reports == cfg.trials);
  }
}

TEST_CASE("sweep rejects phi ranges outside the domain") {
  comi::SweepConfig cfg;
  cfg.trials = 10;
  cfg.phi_lo = -0.5;
  REQUIRE(code_of([&] {
            comi::sweep_inequality(comi::InequalityId::tv_constrained(), cfg,
                                   [](std::uint64_t, const comi::InequalityId&,
                                      const comi::BoundReport&) {});
          }) == comi::errc::phi_domain);
}
