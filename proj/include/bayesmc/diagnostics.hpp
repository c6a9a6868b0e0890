// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bayesmc/samplers.hpp"

namespace bayesmc {

// Effective sample size via Geyer's initial monotone positive sequence over
// paired autocorrelations. Antithetic series can legitimately exceed the
// chain length. Throws on constant input ("zero variance") and on series
// shorter than 10.
double effective_size(const Eigen::VectorXd& series);

// Sample sd divided by sqrt(effective_size); reduces to sd/sqrt(B) for IID
// input.
double mc_standard_error(const Eigen::VectorXd& series);

// Split-chain potential scale reduction: each chain is halved and the usual
// between/within variance ratio is computed over the halves. Throws when the
// within-half variance is zero.
double split_rhat(const std::vector<Eigen::VectorXd>& chains);

// Type-7 quantile (linear interpolation between order statistics).
double quantile(const Eigen::VectorXd& series, double prob);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> quantiles;  // aligned with DiagnosticsReport::probs
  double ess = 0.0;
  double mc_se = 0.0;
  double rhat = 1.0;
};

struct DiagnosticsReport {
  std::vector<ParameterSummary> parameters;
  std::vector<double> probs;
  double acceptance_rate = 1.0;
  long total_draws = 0;
  int n_chains = 0;
};

// Pooled per-parameter summaries over one or more chains of identical
// layout. Constant parameters are reported with sd = 0, mc_se = 0,
// ess = total draws, rhat = 1 rather than erroring. The reported ess is
// capped at 1.05x the total draw count (estimator noise bound).
DiagnosticsReport summarize(const std::vector<Chain>& chains, const std::vector<double>& probs);
DiagnosticsReport summarize(const Chain& chain, const std::vector<double>& probs);

}  // namespace bayesmc
