// A short tour of the library: evaluate divergences between two discrete
// distributions, check a few change-of-measure bounds on a test function,
// price a PAC-Bayes addend, and certify a Monte-Carlo estimate of a Gaussian
// mean.

#include <cstdio>

#include <comi/comi.hpp>

int main() {
  using namespace comi;

  const DiscreteDistribution q = make_discrete({0.5, 0.3, 0.2});
  const DiscreteDistribution p = make_discrete({0.25, 0.25, 0.5});

  std::printf("divergences D(Q||P):\n");
  for (const char* token : {"kl", "pearson-chi2", "tv", "hellinger2", "alpha:2.5"}) {
    const DivergenceValue v = f_divergence(DivergenceKind::parse(token), q, p);
    std::printf("  %-12s %.6f\n", token, v.value());
  }

  std::printf("\nbounds on E_Q[phi], phi = (0.9, 0.1, 0.4):\n");
  const TestFunction phi({0.9, 0.1, 0.4});
  for (const char* token : {"kl-constrained", "pearson-chi2-constrained", "tv-constrained",
                            "multiplicative-chi2", "hcr-chi2"}) {
    const BoundReport r = verify(InequalityId::parse(token), q, p, phi);
    std::printf("  %-26s lhs %.6f <= rhs %.6f (slack %.6f)\n", token, r.lhs,
                r.rhs.value(), r.slack);
  }

  const LossClass loss = LossClass::bounded(1.0);
  const DivergenceValue d2 = f_divergence(DivergenceKind::alpha(2.0), q, p);
  const PacInput pac{200, 0.05, 2.0, d2};
  std::printf("\nPAC-Bayes addends (bounded losses, m=200, delta=0.05, alpha=2):\n");
  std::printf("  multiplicative %.6f\n", addend_multiplicative(loss, pac).value());
  std::printf("  additive       %.6f\n", addend_additive(loss, pac).value());

  const Gaussian1D target(0.3, 1.0);
  const Gaussian1D reference(0.0, 1.0);
  CertifyInput in;
  in.L = 1.0;
  in.gamma = gaussian_gamma(reference);
  in.n = 2000;
  in.delta = 0.05;
  in.div = chi2_gaussian(target, reference);
  const std::vector<double> xs = sample_gaussian(reference, in.n, 42);
  const IntervalReport interval =
      certify(xs, PhiSpec::identity(), log_concave_spec(reference), CertifyForm::chi2, in);
  std::printf("\ncertified interval for E_Q[x], Q = N(0.3, 1), samples from P = N(0, 1):\n");
  std::printf("  estimate %.6f +- %.6f at level %.2f (true mean 0.3)\n", interval.estimate,
              interval.half_width, interval.level);
  return 0;
}
