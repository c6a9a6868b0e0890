// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "bayesmc/io.hpp"
#include "bayesmc/pipelines.hpp"

namespace {

// Exit codes: 0 ok, 1 usage, 2 bad input, 3 domain error, 4 write failure,
// 5 audit mismatch, 6 internal error.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kBadInput = 2,
  kDomain = 3,
  kWriteFailure = 4,
  kInternal = 6,
};

void add_common_options(CLI::App* cmd, bayesmc::RunConfig& config, bool needs_input = true) {
  auto* input = cmd->add_option("--input", config.input_path, "Input CSV file");
  if (needs_input) input->required();
  cmd->add_option("--out", config.out_dir, "Output directory")->required();
  cmd->add_option("--seed", config.seed, "Random seed");
  cmd->add_option("--chains", config.chains, "Number of chains")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", config.iters, "Post-warm-up iterations");
  cmd->add_option("--burnin", config.burn_in, "Warm-up iterations");
  cmd->add_option("--thin", config.thin, "Thinning stride")->check(CLI::PositiveNumber);
  cmd->add_flag("--audit", config.audit, "Recompute summary from written tables and verify");
  cmd->add_flag("--quiet", config.quiet, "Suppress console tables");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference engine: conjugate, Metropolis/HMC, and Gibbs case studies"};
  app.require_subcommand(1);

  bayesmc::RunConfig config;
  bayesmc::SynthConfig synth;

  auto* consultas =
      app.add_subcommand("consultas", "Dirichlet-Multinomial consultation analysis");
  add_common_options(consultas, config);
  consultas->add_option("--alpha", config.prior_alpha,
                        "Symmetric Dirichlet prior concentration (Jeffreys 0.5)");

  auto* sparrows = app.add_subcommand("sparrows", "Poisson regression of offspring on age");
  add_common_options(sparrows, config);
  sparrows->add_option("--sampler", config.sampler, "metropolis|hmc|both")
      ->check(CLI::IsMember({"metropolis", "hmc", "both"}));
  sparrows->add_option("--c", config.proposal_scale, "Metropolis proposal scale c");
  sparrows->add_option("--L", config.leapfrog_steps, "HMC leapfrog steps")
      ->check(CLI::PositiveNumber);
  sparrows->add_option("--eps", config.step_size, "HMC step size");
  sparrows->add_option("--integrator", config.integrator, "canonical|paper-literal")
      ->check(CLI::IsMember({"canonical", "paper-literal"}));

  auto* saber11 = app.add_subcommand("saber11", "Hierarchical regression of test scores");
  add_common_options(saber11, config);
  std::string model_arg = "all";
  saber11->add_option("--model", model_arg, "1|2|3|all")
      ->check(CLI::IsMember({"1", "2", "3", "all"}));
  saber11->add_option("--nu-max", config.nu_grid_max, "Upper end of the nu grid")
      ->check(CLI::PositiveNumber);
  std::string focus_arg = "conditional";
  saber11->add_option("--focus", focus_arg, "DIC/WAIC likelihood focus: conditional|marginal")
      ->check(CLI::IsMember({"conditional", "marginal"}));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("kind", synth.kind, "sparrows|saber11")
      ->required()
      ->check(CLI::IsMember({"sparrows", "saber11"}));
  synth_cmd->add_option("--out", synth.out_path, "Output CSV path")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--n", synth.sparrows.n, "Rows (sparrows)");
  std::vector<double> beta_arg;
  synth_cmd->add_option("--beta", beta_arg, "True coefficients (3 values)")->expected(3);
  synth_cmd->add_option("--overdispersion", synth.sparrows.overdispersion,
                        "Variance/mean ratio (sparrows; 1 = Poisson)");
  synth_cmd->add_option("--groups", synth.saber11.groups, "Group count (saber11)");
  synth_cmd->add_option("--per-group", synth.saber11.rows_per_group, "Rows per group (saber11)");
  synth_cmd->add_option("--tau2", synth.saber11.tau2, "Group-effect variance (saber11)");
  synth_cmd->add_option("--sigma2", synth.saber11.sigma2, "Residual variance (saber11)");
  synth_cmd->add_option("--coef-spread", synth.saber11.coef_spread,
                        "Per-group coefficient sd (saber11)");
  synth_cmd->add_option("--sigma-spread", synth.saber11.sigma_spread,
                        "Per-group residual-sd lognormal spread (saber11)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(consultas)) {
      config.subcommand = "consultas";
      bayesmc::run_consultas(config);
    } else if (app.got_subcommand(sparrows)) {
      config.subcommand = "sparrows";
      bayesmc::run_sparrows(config);
    } else if (app.got_subcommand(saber11)) {
      config.subcommand = "saber11";
      config.model = model_arg == "all" ? 0 : std::stoi(model_arg);
      config.focus = focus_arg == "marginal" ? bayesmc::LikelihoodFocus::marginal
                                             : bayesmc::LikelihoodFocus::conditional;
      bayesmc::run_saber11(config);
    } else if (app.got_subcommand(synth_cmd)) {
      if (!beta_arg.empty()) {
        synth.sparrows.beta = Eigen::Map<Eigen::VectorXd>(beta_arg.data(), 3);
        synth.saber11.beta = synth.sparrows.beta;
      }
      bayesmc::generate_synthetic(synth);
    }
  } catch (const bayesmc::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kBadInput;
  } catch (const bayesmc::OutputError& e) {
    const std::string what = e.what();
    std::fprintf(stderr, "output error: %s\n", what.c_str());
    return what.rfind("audit mismatch", 0) == 0 ? 5 : kWriteFailure;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
  return kOk;
}
