// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bayesmc/samplers.hpp"
#include "bayesmc/synthetic.hpp"

namespace bayesmc {

// Which likelihood feeds DIC/WAIC for the hierarchical models: conditioned
// on the group-level parameters, or with the group effects integrated out.
enum class LikelihoodFocus { conditional, marginal };

// Resolved options for one subcommand run. Negative schedule fields mean
// "use the subcommand default" (consultas 50000/0, sparrows 10000/1000,
// saber11 50000/5000 post-warm-up iterations / warm-up).
struct RunConfig {
  std::string subcommand;
  std::string input_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int chains = 4;
  long iters = -1;    // post-warm-up iterations (before thinning)
  long burn_in = -1;  // warm-up iterations
  long thin = 1;

  double proposal_scale = 0.7;  // Metropolis c
  long leapfrog_steps = 100;    // HMC L
  double step_size = 0.01;      // HMC epsilon
  int nu_grid_max = 100;
  int model = 0;                         // saber11: 1|2|3, 0 = all
  std::string sampler = "both";          // sparrows: metropolis|hmc|both
  std::string integrator = "canonical";  // canonical|paper-literal
  double prior_alpha = 0.5;              // consultas Dirichlet concentration
  LikelihoodFocus focus = LikelihoodFocus::conditional;  // DIC/WAIC focus
  bool audit = false;
  bool quiet = false;

  Schedule schedule(long default_iters, long default_burn_in) const;
};

struct ReportBundle {
  nlohmann::json summary;
  nlohmann::json meta;
  std::vector<std::string> files_written;
};

ReportBundle run_consultas(const RunConfig& config);
ReportBundle run_sparrows(const RunConfig& config);
ReportBundle run_saber11(const RunConfig& config);

struct SynthConfig {
  std::string kind;  // sparrows | saber11
  std::string out_path;
  std::uint64_t seed = 1;
  SparrowParams sparrows;
  Saber11Params saber11;
};

void generate_synthetic(const SynthConfig& config);

}  // namespace bayesmc
