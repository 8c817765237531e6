// Batch front-end for the library: divergence evaluation, inequality
// verification sweeps, PAC-Bayes bound tables, certified Monte-Carlo
// intervals, and coverage experiments. Every run records its seed in the
// output and is byte-identical when repeated with the same configuration.
//
// Exit codes: 0 success, 1 verification sweep found violations, 2 validation
// or domain failure, 3 I/O failure, 4 internal failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <comi/comi.hpp>

namespace {

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  comi::require(out.good(), comi::errc::io_error, "cannot open " + out_path + " for writing");
  out << payload;
  out.flush();
  comi::require(out.good(), comi::errc::io_error, "failed writing " + out_path);
}

// Non-negative real or the literal "Infinite".
comi::DivergenceValue parse_div_value(const std::string& token) {
  if (token == "Infinite") return comi::DivergenceValue::infinite();
  double v = 0.0;
  std::size_t used = 0;
  bool ok = true;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    ok = false;
  }
  comi::require(ok && used == token.size() && std::isfinite(v) && v >= 0.0,
                comi::errc::bad_parameter, "divergence value must be >= 0 or \"Infinite\"");
  return comi::DivergenceValue::finite(v);
}

struct DivergenceArgs {
  std::string kind;
  std::string q_path;
  std::string p_path;
  std::uint64_t seed = 0;
  std::string out;
};

int run_divergence(const DivergenceArgs& a) {
  const comi::DivergenceKind kind = comi::DivergenceKind::parse(a.kind);
  const comi::DiscreteDistribution q = comi::load_distribution(a.q_path);
  const comi::DiscreteDistribution p = comi::load_distribution(a.p_path);
  const comi::DivergenceValue value = comi::f_divergence(kind, q, p);
  comi::JsonObjectWriter w;
  w.field("command", "divergence")
      .number("seed", a.seed)
      .field("kind", kind.token())
      .number("value", value);
  emit(a.out, w.str() + "\n");
  return 0;
}

struct VerifyArgs {
  std::string id;
  comi::SweepConfig cfg;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  const comi::InequalityId id = comi::InequalityId::parse(a.id);
  std::ostringstream csv;
  csv << "# command=verify id=" << id.token() << " trials=" << a.cfg.trials
      << " seed=" << a.cfg.seed << "\n";
  csv << "trial,alpha,lhs,rhs,slack,holds\n";
  const std::uint64_t violations = comi::sweep_inequality(
      id, a.cfg, [&](std::uint64_t t, const comi::InequalityId& pinned,
                     const comi::BoundReport& report) {
        csv << t << ',';
        if (pinned.parameterized_family()) csv << comi::fmt_g17(pinned.alpha());
        csv << ',' << comi::fmt_g17(report.lhs) << ',' << comi::fmt_value(report.rhs) << ','
            << comi::fmt_value(report.slack) << ',' << (report.holds ? 1 : 0) << "\n";
      });
  csv << "# violations=" << violations << "\n";
  emit(a.out, csv.str());
  return violations == 0 ? 0 : 1;
}

struct PacTableArgs {
  std::string loss;
  std::vector<std::uint64_t> m = {100};
  std::vector<double> delta = {0.05};
  std::vector<double> alpha = {2.0};
  std::vector<double> div = {0.0};
  std::uint64_t seed = 0;
  std::string out;
};

int run_pac_table(const PacTableArgs& a) {
  const comi::LossClass loss = comi::parse_loss_class(a.loss);
  for (double d : a.div)
    comi::require(std::isfinite(d) && d >= 0.0, comi::errc::bad_parameter,
                  "divergence grid values must be >= 0");
  std::ostringstream csv;
  csv << "# command=pac-table loss=" << loss.token() << " seed=" << a.seed << "\n";
  csv << "loss_class,form,m,delta,alpha,divergence,addend\n";
  for (std::uint64_t m : a.m)
    for (double delta : a.delta)
      for (double alpha : a.alpha)
        for (double div : a.div) {
          const comi::PacInput in{m, delta, alpha, comi::DivergenceValue::finite(div)};
          for (const comi::BoundForm form :
               {comi::BoundForm::multiplicative, comi::BoundForm::additive}) {
            const comi::DivergenceValue addend = form == comi::BoundForm::multiplicative
                                                     ? comi::addend_multiplicative(loss, in)
                                                     : comi::addend_additive(loss, in);
            csv << loss.token() << ',' << comi::form_token(form) << ',' << m << ','
                << comi::fmt_g17(delta) << ',' << comi::fmt_g17(alpha) << ','
                << comi::fmt_g17(div) << ',' << comi::fmt_value(addend) << "\n";
          }
        }
  emit(a.out, csv.str());
  return 0;
}

struct McCertifyArgs {
  std::string form;
  std::string samples_path;
  std::string phi = "identity";
  std::string div;
  double L = 1.0;
  double gamma = 1.0;
  std::uint64_t n = 0;  // 0: take the sample count
  double delta = 0.05;
  double alpha = 2.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_mc_certify(const McCertifyArgs& a) {
  const comi::CertifyForm form = comi::parse_certify_form(a.form);
  const comi::PhiSpec phi = comi::PhiSpec::parse(a.phi);
  const std::vector<double> samples = comi::load_samples(a.samples_path);
  comi::CertifyInput in;
  in.L = a.L;
  in.gamma = a.gamma;
  in.n = a.n == 0 ? samples.size() : a.n;
  in.delta = a.delta;
  in.alpha = a.alpha;
  in.div = parse_div_value(a.div);
  const comi::LogConcaveSpec spec{a.gamma, {}};
  const comi::IntervalReport report = comi::certify(samples, phi, spec, form, in);
  comi::JsonObjectWriter w;
  w.field("command", "mc-certify")
      .number("seed", a.seed)
      .field("form", comi::form_token(form))
      .field("phi", phi.token())
      .number("L", in.L)
      .number("gamma", in.gamma)
      .number("n", in.n)
      .number("delta", in.delta)
      .number("alpha", in.alpha)
      .number("div", in.div)
      .number("estimate", report.estimate)
      .number("deviation_term", report.deviation_term)
      .number("bias_term", report.bias_term)
      .number("half_width", report.half_width)
      .number("level", report.level)
      .boolean("vacuous", report.vacuous());
  emit(a.out, w.str() + "\n");
  return 0;
}

struct CoverageArgs {
  std::string experiment;
  std::string form;
  std::uint64_t seed = 0;
  std::string out;
  // gibbs
  std::string loss;
  std::string model = "zero-one";
  double scale = 1.0;
  double tilt = 1.0;
  std::size_t hypotheses = 20;
  std::uint64_t m = 200;
  std::uint64_t trials = 2000;
  // mc
  double q_mean = 0.5;
  double q_var = 1.0;
  double p_mean = 0.0;
  double p_var = 1.0;
  std::string phi = "identity";
  std::uint64_t n = 10000;
  std::uint64_t repeats = 500;
  // shared
  double delta = 0.1;
  double alpha = 2.0;
};

int run_coverage_gibbs(const CoverageArgs& a) {
  comi::require(!a.loss.empty(), comi::errc::bad_parameter,
                "--loss is required for the gibbs experiment");
  const comi::LossClass loss = comi::parse_loss_class(a.loss);
  const comi::BoundForm form = [&] {
    if (a.form == "multiplicative") return comi::BoundForm::multiplicative;
    if (a.form == "additive") return comi::BoundForm::additive;
    comi::raise(comi::errc::bad_parameter, "unknown bound form: " + a.form);
  }();
  const comi::GibbsExperiment exp = comi::make_tilted_gibbs(
      a.hypotheses, comi::parse_model_kind(a.model), a.scale, a.tilt, a.m, a.trials, a.seed);
  const comi::CoverageResult result =
      comi::coverage_experiment(exp, loss, form, a.delta, a.alpha);
  const comi::DivergenceValue div =
      comi::f_divergence(comi::DivergenceKind::alpha(a.alpha), exp.posterior, exp.prior);
  const comi::PacInput in{exp.m, a.delta, a.alpha, div};
  const comi::DivergenceValue addend = form == comi::BoundForm::multiplicative
                                           ? comi::addend_multiplicative(loss, in)
                                           : comi::addend_additive(loss, in);
  comi::JsonObjectWriter w;
  w.field("command", "coverage")
      .field("experiment", "gibbs")
      .number("seed", a.seed)
      .field("loss", loss.token())
      .field("form", comi::form_token(form))
      .field("model", a.model)
      .number("scale", a.scale)
      .number("tilt", a.tilt)
      .number("hypotheses", static_cast<std::uint64_t>(a.hypotheses))
      .number("m", exp.m)
      .number("delta", a.delta)
      .number("alpha", a.alpha)
      .number("divergence", div)
      .number("addend", addend)
      .number("trials", result.trials)
      .number("violations", result.violations)
      .number("violation_rate", result.violation_rate)
      .boolean("vacuous", result.vacuous);
  emit(a.out, w.str() + "\n");
  return 0;
}

int run_coverage_mc(const CoverageArgs& a) {
  const comi::CertifyForm form = comi::parse_certify_form(a.form);
  const comi::Gaussian1D q(a.q_mean, a.q_var);
  const comi::Gaussian1D p(a.p_mean, a.p_var);
  const comi::PhiSpec phi = comi::PhiSpec::parse(a.phi);
  const comi::McCoverage result = comi::mc_coverage_experiment(
      form, q, p, phi, a.n, a.delta, a.repeats, a.seed, a.alpha);
  const comi::DivergenceValue div = [&] {
    switch (form) {
      case comi::CertifyForm::pseudo_alpha: return comi::pseudo_alpha_gaussian(a.alpha, q, p);
      case comi::CertifyForm::chi2: return comi::chi2_gaussian(q, p);
      case comi::CertifyForm::kl: return comi::kl_gaussian(q, p);
    }
    comi::raise(comi::errc::internal, "unhandled form");
  }();
  comi::JsonObjectWriter w;
  w.field("command", "coverage")
      .field("experiment", "mc")
      .number("seed", a.seed)
      .field("form", comi::form_token(form))
      .number("q_mean", a.q_mean)
      .number("q_var", a.q_var)
      .number("p_mean", a.p_mean)
      .number("p_var", a.p_var)
      .field("phi", phi.token())
      .number("n", a.n)
      .number("delta", a.delta)
      .number("alpha", a.alpha)
      .number("div", div)
      .number("truth", phi.mean_under(q))
      .number("repeats", result.repeats)
      .number("contained", result.contained)
      .number("coverage", result.coverage)
      .number("level", result.level);
  emit(a.out, w.str() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"change-of-measure inequalities, PAC-Bayes bounds, and certified Monte-Carlo"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  app.allow_config_extras(false);

  DivergenceArgs div_args;
  CLI::App* div_cmd = app.add_subcommand("divergence", "evaluate an f-divergence D_f(Q||P)");
  div_cmd->add_option("--kind", div_args.kind, "divergence token, e.g. kl or alpha:2.5")
      ->required();
  div_cmd->add_option("--q", div_args.q_path, "JSON file with Q")->required();
  div_cmd->add_option("--p", div_args.p_path, "JSON file with P")->required();
  div_cmd->add_option("--seed", div_args.seed, "seed recorded in the output");
  div_cmd->add_option("--out", div_args.out, "output path (default stdout)");

  VerifyArgs verify_args;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "random soundness sweep of one inequality");
  verify_cmd->add_option("--id", verify_args.id, "inequality token, e.g. kl-constrained")
      ->required();
  verify_cmd->add_option("--trials", verify_args.cfg.trials, "number of random triples");
  verify_cmd->add_option("--seed", verify_args.cfg.seed, "stream seed");
  verify_cmd->add_option("--support-min", verify_args.cfg.support_min, "smallest support size");
  verify_cmd->add_option("--support-max", verify_args.cfg.support_max, "largest support size");
  verify_cmd->add_option("--alpha-min", verify_args.cfg.alpha_min,
                         "alpha sweep lower end (unpinned families)");
  verify_cmd->add_option("--alpha-max", verify_args.cfg.alpha_max,
                         "alpha sweep upper end (unpinned families)");
  double phi_lo = 0.0;
  double phi_hi = 0.0;
  CLI::Option* phi_lo_opt =
      verify_cmd->add_option("--phi-lo", phi_lo, "override phi sampling lower end");
  CLI::Option* phi_hi_opt =
      verify_cmd->add_option("--phi-hi", phi_hi, "override phi sampling upper end");
  verify_cmd->add_option("--out", verify_args.out, "output path (default stdout)");

  PacTableArgs pac_args;
  CLI::App* pac_cmd = app.add_subcommand("pac-table", "PAC-Bayes bound addend table");
  pac_cmd->add_option("--loss", pac_args.loss, "loss class token, e.g. bounded:R=1")
      ->required();
  pac_cmd->add_option("--m", pac_args.m, "sample sizes")->delimiter(',');
  pac_cmd->add_option("--delta", pac_args.delta, "confidence levels")->delimiter(',');
  pac_cmd->add_option("--alpha", pac_args.alpha, "divergence orders")->delimiter(',');
  pac_cmd->add_option("--div", pac_args.div, "divergence values")->delimiter(',');
  pac_cmd->add_option("--seed", pac_args.seed, "seed recorded in the output");
  pac_cmd->add_option("--out", pac_args.out, "output path (default stdout)");

  McCertifyArgs cert_args;
  CLI::App* cert_cmd =
      app.add_subcommand("mc-certify", "certified interval from a sample file");
  cert_cmd->add_option("--form", cert_args.form, "pseudo-alpha, chi2, or kl")->required();
  cert_cmd->add_option("--samples", cert_args.samples_path, "one real per line")->required();
  cert_cmd->add_option("--div", cert_args.div, "divergence value for the form")->required();
  cert_cmd->add_option("--phi", cert_args.phi, "phi token: identity, affine:a,b, clip:a,b,lo,hi");
  cert_cmd->add_option("--L", cert_args.L, "declared Lipschitz constant");
  cert_cmd->add_option("--gamma", cert_args.gamma, "strong log-concavity parameter of P");
  cert_cmd->add_option("--n", cert_args.n, "sample count (defaults to the file's count)");
  cert_cmd->add_option("--delta", cert_args.delta, "confidence parameter");
  cert_cmd->add_option("--alpha", cert_args.alpha, "order for the pseudo-alpha form");
  cert_cmd->add_option("--seed", cert_args.seed, "seed recorded in the output");
  cert_cmd->add_option("--out", cert_args.out, "output path (default stdout)");

  CoverageArgs cov_args;
  CLI::App* cov_cmd = app.add_subcommand("coverage", "empirical coverage experiments");
  cov_cmd->add_option("--experiment", cov_args.experiment, "gibbs or mc")->required();
  cov_cmd->add_option("--form", cov_args.form,
                      "gibbs: multiplicative|additive; mc: pseudo-alpha|chi2|kl")
      ->required();
  cov_cmd->add_option("--seed", cov_args.seed, "stream seed");
  cov_cmd->add_option("--out", cov_args.out, "output path (default stdout)");
  cov_cmd->add_option("--loss", cov_args.loss, "loss class token (gibbs)");
  cov_cmd->add_option("--model", cov_args.model, "zero-one, gaussian, or shifted-exp (gibbs)");
  cov_cmd->add_option("--scale", cov_args.scale, "loss noise scale (gibbs)");
  cov_cmd->add_option("--tilt", cov_args.tilt, "posterior tilt strength (gibbs)");
  cov_cmd->add_option("--hypotheses", cov_args.hypotheses, "hypothesis count (gibbs)");
  cov_cmd->add_option("--m", cov_args.m, "training-set size per trial (gibbs)");
  cov_cmd->add_option("--trials", cov_args.trials, "trial count (gibbs)");
  cov_cmd->add_option("--q-mean", cov_args.q_mean, "target mean (mc)");
  cov_cmd->add_option("--q-var", cov_args.q_var, "target variance (mc)");
  cov_cmd->add_option("--p-mean", cov_args.p_mean, "reference mean (mc)");
  cov_cmd->add_option("--p-var", cov_args.p_var, "reference variance (mc)");
  cov_cmd->add_option("--phi", cov_args.phi, "phi token (mc)");
  cov_cmd->add_option("--n", cov_args.n, "samples per repeat (mc)");
  cov_cmd->add_option("--repeats", cov_args.repeats, "repeat count (mc)");
  cov_cmd->add_option("--delta", cov_args.delta, "confidence parameter");
  cov_cmd->add_option("--alpha", cov_args.alpha, "divergence order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (phi_lo_opt->count() > 0) verify_args.cfg.phi_lo = phi_lo;
    if (phi_hi_opt->count() > 0) verify_args.cfg.phi_hi = phi_hi;
    if (div_cmd->parsed()) return run_divergence(div_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
    if (pac_cmd->parsed()) return run_pac_table(pac_args);
    if (cert_cmd->parsed()) return run_mc_certify(cert_args);
    if (cov_cmd->parsed()) {
      if (cov_args.experiment == "gibbs") return run_coverage_gibbs(cov_args);
      if (cov_args.experiment == "mc") return run_coverage_mc(cov_args);
      comi::raise(comi::errc::bad_parameter, "unknown experiment: " + cov_args.experiment);
    }
    return 2;
  } catch (const comi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case comi::errc::io_error: return 3;
      case comi::errc::internal:
      case comi::errc::no_convergence: return 4;
      default: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
