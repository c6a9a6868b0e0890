// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bayesmc/models.hpp"
#include "bayesmc/rng.hpp"

namespace bayesmc {

struct Schedule {
  long iterations = 0;  // total sweeps B, burn-in included
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;

  long retained() const { return (iterations - burn_in) / thin; }
  void validate() const;
  // Original sweep index of retained row (burn_in + (row+1)*thin).
  long iteration_of(long row) const { return burn_in + (row + 1) * thin; }
};

struct Chain {
  Eigen::MatrixXd draws;  // retained x k
  std::vector<std::string> parameter_names;
  long accepted = 0;
  long proposed = 0;
  long nonfinite_rejects = 0;  // proposals/trajectories rejected on non-finite values
  Schedule schedule;
  std::uint64_t stream_id = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  Eigen::VectorXd column(Eigen::Index j) const { return draws.col(j); }
};

struct MetropolisConfig {
  Eigen::MatrixXd proposal_cov;
};

// c (X'X)^-1, the scaled proposal covariance of the Poisson study.
MetropolisConfig scaled_proposal(double c, const Eigen::MatrixXd& design);

enum class HmcIntegrator {
  canonical_leapfrog,  // half/full/half momentum updates; reversible
  paper_literal,       // repeated (half-momentum, full-position) pairs
};

struct HmcConfig {
  long leapfrog_steps = 10;
  double step_size = 0.1;
  Eigen::VectorXd mass_diag;  // empty means identity
  HmcIntegrator integrator = HmcIntegrator::canonical_leapfrog;
};

using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// IID Dirichlet sampling of a conjugate posterior; accepted == proposed ==
// retained rows.
Chain run_iid_dirichlet(const Eigen::VectorXd& alpha_post, const Schedule& schedule,
                        std::uint64_t stream_id = 0);

// Random-walk Metropolis with a symmetric Gaussian proposal; acceptance
// decisions happen on the log scale (the ratio is clamped at 1 before any
// exponential is taken).
Chain run_metropolis(const LogDensityFn& target, const MetropolisConfig& config,
                     const Eigen::VectorXd& init, const Schedule& schedule,
                     std::uint64_t stream_id = 0);

// Hamiltonian Monte Carlo. The gradient is spot-checked against central
// finite differences of `target` at the initial point before the run.
Chain run_hmc(const LogDensityFn& target, const GradientFn& gradient, const HmcConfig& config,
              const Eigen::VectorXd& init, const Schedule& schedule,
              std::uint64_t stream_id = 0);

// Gibbs samplers for the three hierarchical regression models. Updates
// follow the full-conditional order of the model definition. Default
// initialization is deterministic: coefficients from pooled OLS, variance
// components from the OLS variance, random effects at zero.
Chain run_gibbs_hlm1(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id = 0,
                     const std::optional<HlmState>& init = std::nullopt);
Chain run_gibbs_hlm2(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id = 0,
                     const std::optional<HlmState>& init = std::nullopt);
Chain run_gibbs_hlm3(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id = 0,
                     const std::optional<HlmState>& init = std::nullopt,
                     int nu_grid_max = 100);

// Discrete draw of the group-variance shape nu over an integer grid; the
// unnormalized log mass is normalized with max subtraction. Throws if every
// grid point has zero mass.
long sample_nu_conditional(const Eigen::VectorXd& sigma2_groups, double sigma2, double kappa0,
                           const std::vector<int>& grid, RandomStream& rng);

HlmState default_hlm_init(const HlmData& data, const HlmHyperparams& hyper);

// Parameter layout of the chains produced by the Gibbs runners.
std::vector<std::string> hlm_parameter_names(int model_id, Eigen::Index p, Eigen::Index m);

namespace gibbs {

// Single full-conditional draws, exposed so each one can be exercised in
// isolation against its closed form.

// N(A^-1 b, A^-1) for a precision matrix A and linear term b.
Eigen::VectorXd draw_gaussian_by_precision(const Eigen::MatrixXd& precision,
                                           const Eigen::VectorXd& linear, RandomStream& rng);

// beta | - with precision prior_prec + xtx/sigma2 and linear term
// prior_prec_mean + xty/sigma2 (xty already holds X'(y - adjustment)).
Eigen::VectorXd draw_coef(const Eigen::MatrixXd& prior_prec, const Eigen::VectorXd& prior_prec_mean,
                          const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty, double sigma2,
                          RandomStream& rng);

// sigma2 | - ~ InverseGamma((nu0 + n)/2, (nu0 sigma02 + ssr)/2).
double draw_obs_variance(double nu0, double sigma02, double n, double ssr, RandomStream& rng);

// theta_j | - ~ N((resid_sum/sigma2) / (1/tau2 + n_j/sigma2),
//                 1 / (1/tau2 + n_j/sigma2)).
double draw_random_effect(double resid_sum, double n_j, double sigma2, double tau2,
                          RandomStream& rng);

// tau2 | - ~ InverseGamma((eta0 + m)/2, (eta0 tau02 + theta'theta)/2).
double draw_effect_variance(double eta0, double tau02, const Eigen::VectorXd& theta,
                            RandomStream& rng);

// Sigma | - : inverse Wishart with df n0 + m and scale S0 + scatter of the
// group coefficients around the global mean.
Eigen::MatrixXd draw_coef_covariance(double n0, const Eigen::MatrixXd& S0,
                                     const Eigen::MatrixXd& coef_scatter, long m,
                                     RandomStream& rng);

// sigma2_j | - ~ InverseGamma((nu + n_j)/2, (nu sigma2 + ssr_j)/2).
double draw_group_variance(double nu, double sigma2, double n_j, double ssr_j, RandomStream& rng);

// sigma2 | - ~ Gamma(alpha0 + m nu/2, beta0 + (nu/2) sum_j sigma_j^-2).
double draw_variance_scale(double alpha0, double beta0_rate, long m, double nu,
                           double sum_inv_group_var, RandomStream& rng);

}  // namespace gibbs

}  // namespace bayesmc
