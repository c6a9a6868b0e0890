// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bayesmc {

// Multinomial counts with a Dirichlet prior; the posterior is closed form.
struct DirichletMultinomialModel {
  Eigen::VectorXd counts;       // n_1..n_k, nonnegative integers
  Eigen::VectorXd prior_alpha;  // a_1..a_k, positive

  DirichletMultinomialModel(Eigen::VectorXd counts, Eigen::VectorXd prior_alpha);
  double total_count() const { return counts.sum(); }
};

// Posterior concentration (a_1 + n_1, ..., a_k + n_k).
Eigen::VectorXd dirichlet_posterior_update(const DirichletMultinomialModel& model);

// Component j of the posterior mean: alpha_post_j / sum(alpha_post). Equals
// the prior-mean/sample-mean weighted combination with weights a*/(a*+n)
// and n/(a*+n).
Eigen::VectorXd dirichlet_posterior_mean(const Eigen::VectorXd& alpha_post);

enum class GradKind {
  posterior,        // d/dbeta of the log posterior, prior term included
  likelihood_only,  // likelihood part alone
};

// Log posterior (up to its additive constant, fixed at 0) and gradient of
// the Poisson GLM with log link and Gaussian prior on the coefficients.
class PoissonGlmTarget {
 public:
  PoissonGlmTarget(Eigen::MatrixXd design, Eigen::VectorXd y, Eigen::VectorXd prior_mean,
                   Eigen::MatrixXd prior_cov);

  // beta'sum(y_i x_i) - sum exp(beta'x_i) - beta'P beta/2 + beta'P beta_0,
  // with P the prior precision. Linear predictors large enough to overflow
  // exp return -infinity so the proposal is rejected.
  double log_posterior(const Eigen::VectorXd& beta) const;

  Eigen::VectorXd grad(const Eigen::VectorXd& beta,
                       GradKind kind = GradKind::posterior) const;

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& response() const { return y_; }
  Eigen::Index dim() const { return design_.cols(); }
  Eigen::Index n_obs() const { return design_.rows(); }

  // sum_i log Poisson(y_i | exp(beta'x_i)), the DIC/WAIC deviance input.
  double log_likelihood(const Eigen::VectorXd& beta) const;
  // log Poisson(y_i | exp(beta'x_i)) per observation.
  Eigen::VectorXd pointwise_log_likelihood(const Eigen::VectorXd& beta) const;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd y_;
  Eigen::VectorXd prior_mean_;
  Eigen::MatrixXd prior_cov_;
  Eigen::MatrixXd prior_precision_;
  Eigen::VectorXd prior_precision_mean_;  // P beta_0
  Eigen::VectorXd xty_;                   // sum y_i x_i
};

// n x 3 design (1, age_i, age_i^2).
Eigen::MatrixXd build_quadratic_design(const Eigen::VectorXd& ages);

struct OlsEstimates {
  Eigen::VectorXd beta_hat;
  double sigma2_hat;
};

// QR-based least squares; sigma2_hat uses the n-p divisor. Throws on rank
// deficiency, naming the deficient rank.
OlsEstimates ols_estimates(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

// One group of a hierarchical regression dataset.
struct HlmGroup {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  std::string label;
};

class HlmData {
 public:
  explicit HlmData(std::vector<HlmGroup> groups);

  Eigen::Index m() const { return static_cast<Eigen::Index>(groups_.size()); }
  Eigen::Index p() const { return groups_.front().design.cols(); }
  Eigen::Index n() const { return n_total_; }
  const std::vector<HlmGroup>& groups() const { return groups_; }
  const HlmGroup& group(Eigen::Index j) const { return groups_[static_cast<size_t>(j)]; }

  Eigen::MatrixXd pooled_design() const;
  Eigen::VectorXd pooled_response() const;

 private:
  std::vector<HlmGroup> groups_;
  Eigen::Index n_total_ = 0;
};

// Hyperparameters for the three hierarchical regression models. Only the
// fields of the active model are meaningful; validate() checks them.
struct HlmHyperparams {
  int model_id = 1;

  // Models 1 and 2
  Eigen::VectorXd beta0;
  Eigen::MatrixXd Sigma0;
  double nu0 = 1.0;
  double sigma02 = 1.0;

  // Models 2 and 3
  double eta0 = 1.0;
  double tau02 = 1.0;

  // Model 3
  Eigen::VectorXd mu0;
  Eigen::MatrixXd Lambda0;
  double n0 = 5.0;
  Eigen::MatrixXd S0;
  double kappa0 = 1.0;
  double alpha0 = 1.0;
  double beta0_rate = 1.0;

  void validate(Eigen::Index p) const;
};

// Unit-information hyperparameters built from the pooled OLS fit:
//   Model 1: beta0 = beta_ols, Sigma0 = n sigma2_ols (X'X)^-1, nu0 = 1,
//            sigma02 = sigma2_ols
//   Model 2: adds eta0 = 1, tau02 = sigma2_ols
//   Model 3: mu0 = beta_ols, Lambda0 = S0 = n sigma2_ols (X'X)^-1, n0 = 5,
//            eta0 = kappa0 = alpha0 = 1, tau02 = beta0_rate = sigma2_ols
HlmHyperparams unit_information_config(int model_id, const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& y);

// Mutable parameter state for a Gibbs run; which fields are live depends on
// the model. Owned by exactly one sampler at a time.
struct HlmState {
  Eigen::VectorXd beta;          // p (global coefficients)
  double sigma2 = 1.0;           // observation variance (models 1-2); GI scale (model 3)
  Eigen::VectorXd theta;         // m random effects (models 2-3)
  double tau2 = 1.0;             // random-effect variance (models 2-3)
  Eigen::MatrixXd group_coefs;   // p x m, column j = beta_j (model 3)
  Eigen::MatrixXd Sigma;         // p x p between-group covariance (model 3)
  Eigen::VectorXd sigma2_groups; // m group variances (model 3)
  double nu = 1.0;               // GI shape for group variances (model 3)
};

}  // namespace bayesmc
