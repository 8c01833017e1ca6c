#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "quadfit/error.hpp"
#include "quadfit_cli/cli.hpp"

namespace {

void add_common(CLI::App* sub, quadfit::cli::RunConfig& c) {
  sub->add_option("--kernel", c.kernel, "normal:h2=F | poisson:rho=F | cvm | pearson | identity")->required();
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "write the JSON report here instead of stdout");
  sub->add_option("--max-terms", c.max_terms, "cap on eigenvalues kept")->capture_default_str();
  sub->add_flag("--full-spectrum", c.full_spectrum, "report every eigenvalue, not just the first 20");
  sub->add_option("--nystrom-points", c.nystrom_points, "Monte Carlo points for Nystrom spectra")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic-distance goodness-of-fit tests"};
  app.require_subcommand(1);

  quadfit::cli::RunConfig test_cfg;
  test_cfg.command = "test";
  auto* test = app.add_subcommand("test", "test data against a simple null measure or a fitted model");
  add_common(test, test_cfg);
  test->add_option("--data", test_cfg.data, "one observation per line")->required();
  auto* null_opt = test->add_option("--null", test_cfg.null_text, "fully specified null measure");
  auto* model_opt = test->add_option("--model", test_cfg.model, "normal | exponential | independence:rows=R,cols=C");
  null_opt->excludes(model_opt);
  test->add_option("--estimator", test_cfg.estimator, "v or u")->check(CLI::IsMember({"v", "u"}))->capture_default_str();
  test->add_option("--pvalue", test_cfg.pvalues, "spectral,satterthwaite,bootstrap")->delimiter(',');
  test->add_option("--draws", test_cfg.draws, "chi-star Monte Carlo draws")->capture_default_str();
  test->add_option("--boot", test_cfg.boot, "bootstrap replicates")->capture_default_str();
  test->add_option("--spectrum-route", test_cfg.spectrum_route, "auto | nystrom | quadrature | discrete")
      ->capture_default_str();

  quadfit::cli::RunConfig spectrum_cfg;
  spectrum_cfg.command = "spectrum";
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of a kernel under a baseline measure");
  add_common(spectrum, spectrum_cfg);
  spectrum->add_option("--baseline,--null", spectrum_cfg.null_text, "baseline measure")->required();
  spectrum->add_flag("--centered", spectrum_cfg.centered, "center the kernel by the baseline first");

  quadfit::cli::RunConfig dof_cfg;
  dof_cfg.command = "dof";
  auto* dof = app.add_subcommand("dof", "traces, Pearson scale and spectral degrees of freedom");
  add_common(dof, dof_cfg);
  dof->add_option("--baseline,--null", dof_cfg.null_text, "baseline measure");
  dof->add_option("--data", dof_cfg.data, "estimate from the empirically centered kernel matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto& cfg = test->parsed() ? test_cfg : spectrum->parsed() ? spectrum_cfg : dof_cfg;
  try {
    const auto report = quadfit::cli::run(cfg);
    const auto text = quadfit::cli::dump(report);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out);
      if (!out) throw quadfit::InvalidArgument("cannot write '" + cfg.out + "'");
      out << text;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "quadfit: " << e.what() << "\n";
    return quadfit::cli::exit_code_for(e);
  }
}
