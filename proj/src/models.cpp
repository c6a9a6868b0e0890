// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bayesmc/distributions.hpp"

namespace bayesmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp() overflows just above 709; anything this large is a runaway proposal.
constexpr double kMaxLinearPredictor = 700.0;

}  // namespace

DirichletMultinomialModel::DirichletMultinomialModel(Eigen::VectorXd counts_in,
                                                     Eigen::VectorXd prior_alpha_in)
    : counts(std::move(counts_in)), prior_alpha(std::move(prior_alpha_in)) {
  if (counts.size() != prior_alpha.size())
    throw std::domain_error("DirichletMultinomialModel: counts/prior length mismatch");
  if (counts.size() < 2)
    throw std::domain_error("DirichletMultinomialModel: needs at least two categories");
  for (Eigen::Index j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0.0 || counts[j] != std::floor(counts[j]))
      throw std::domain_error("DirichletMultinomialModel: counts must be nonnegative integers");
  }
  if ((prior_alpha.array() <= 0.0).any())
    throw std::domain_error("DirichletMultinomialModel: prior concentrations must be positive");
}

Eigen::VectorXd dirichlet_posterior_update(const DirichletMultinomialModel& model) {
  return model.prior_alpha + model.counts;
}

Eigen::VectorXd dirichlet_posterior_mean(const Eigen::VectorXd& alpha_post) {
  if ((alpha_post.array() <= 0.0).any())
    throw std::domain_error("dirichlet_posterior_mean: components must be positive");
  return alpha_post / alpha_post.sum();
}

PoissonGlmTarget::PoissonGlmTarget(Eigen::MatrixXd design, Eigen::VectorXd y,
                                   Eigen::VectorXd prior_mean, Eigen::MatrixXd prior_cov)
    : design_(std::move(design)),
      y_(std::move(y)),
      prior_mean_(std::move(prior_mean)),
      prior_cov_(std::move(prior_cov)) {
  if (design_.rows() != y_.size())
    throw std::domain_error("PoissonGlmTarget: design rows must match response length");
  if (design_.cols() != prior_mean_.size() || prior_cov_.rows() != prior_cov_.cols() ||
      prior_cov_.rows() != prior_mean_.size())
    throw std::domain_error("PoissonGlmTarget: prior dimension mismatch");
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_[i] < 0.0 || y_[i] != std::floor(y_[i]))
      throw std::domain_error("PoissonGlmTarget: counts must be nonnegative integers");
  }
  const Eigen::MatrixXd chol = cholesky_spd(prior_cov_, "Poisson GLM prior covariance");
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(prior_cov_.rows(), prior_cov_.cols());
  const Eigen::MatrixXd chol_inv = chol.triangularView<Eigen::Lower>().solve(identity);
  prior_precision_ = chol_inv.transpose() * chol_inv;
  prior_precision_mean_ = prior_precision_ * prior_mean_;
  xty_ = design_.transpose() * y_;
}

double PoissonGlmTarget::log_posterior(const Eigen::VectorXd& beta) const {
  if (beta.size() != dim()) throw std::domain_error("log_posterior: beta dimension mismatch");
  const Eigen::VectorXd eta = design_ * beta;
  if (eta.maxCoeff() > kMaxLinearPredictor) return kNegInf;
  return beta.dot(xty_) - eta.array().exp().sum() -
         0.5 * beta.dot(prior_precision_ * beta) + beta.dot(prior_precision_mean_);
}

Eigen::VectorXd PoissonGlmTarget::grad(const Eigen::VectorXd& beta, GradKind kind) const {
  if (beta.size() != dim()) throw std::domain_error("grad: beta dimension mismatch");
  const Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd rates(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    rates[i] = eta[i] > kMaxLinearPredictor ? std::numeric_limits<double>::infinity()
                                            : std::exp(eta[i]);
  }
  Eigen::VectorXd g = xty_ - design_.transpose() * rates;
  if (kind == GradKind::posterior) {
    g += prior_precision_mean_ - prior_precision_ * beta;
  }
  return g;
}

double PoissonGlmTarget::log_likelihood(const Eigen::VectorXd& beta) const {
  return pointwise_log_likelihood(beta).sum();
}

Eigen::VectorXd PoissonGlmTarget::pointwise_log_likelihood(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  Eigen::VectorXd ll(y_.size());
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (eta[i] > kMaxLinearPredictor) {
      ll[i] = kNegInf;
      continue;
    }
    ll[i] = y_[i] * eta[i] - std::exp(eta[i]) - std::lgamma(y_[i] + 1.0);
  }
  return ll;
}

Eigen::MatrixXd build_quadratic_design(const Eigen::VectorXd& ages) {
  if (ages.size() == 0) throw std::domain_error("build_quadratic_design: empty ages");
  Eigen::MatrixXd design(ages.size(), 3);
  design.col(0).setOnes();
  design.col(1) = ages;
  design.col(2) = ages.array().square();
  return design;
}

OlsEstimates ols_estimates(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (n != y.size()) throw std::domain_error("ols_estimates: design rows must match response");
  if (n <= p) throw std::domain_error("ols_estimates: needs more rows than columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) {
    throw std::runtime_error("ols_estimates: design is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(p) + ")");
  }
  OlsEstimates out;
  out.beta_hat = qr.solve(y);
  const Eigen::VectorXd resid = y - design * out.beta_hat;
  out.sigma2_hat = resid.squaredNorm() / static_cast<double>(n - p);
  return out;
}

HlmData::HlmData(std::vector<HlmGroup> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) throw std::domain_error("HlmData: needs at least one group");
  const Eigen::Index p = groups_.front().design.cols();
  for (const auto& g : groups_) {
    if (g.design.rows() == 0) throw std::domain_error("HlmData: empty group '" + g.label + "'");
    if (g.design.cols() != p) throw std::domain_error("HlmData: groups disagree on column count");
    if (g.design.rows() != g.response.size())
      throw std::domain_error("HlmData: design/response mismatch in group '" + g.label + "'");
    n_total_ += g.design.rows();
  }
}

Eigen::MatrixXd HlmData::pooled_design() const {
  Eigen::MatrixXd pooled(n_total_, p());
  Eigen::Index row = 0;
  for (const auto& g : groups_) {
    pooled.middleRows(row, g.design.rows()) = g.design;
    row += g.design.rows();
  }
  return pooled;
}

Eigen::VectorXd HlmData::pooled_response() const {
  Eigen::VectorXd pooled(n_total_);
  Eigen::Index row = 0;
  for (const auto& g : groups_) {
    pooled.segment(row, g.response.size()) = g.response;
    row += g.response.size();
  }
  return pooled;
}

void HlmHyperparams::validate(Eigen::Index p) const {
  if (model_id < 1 || model_id > 3) throw std::domain_error("HlmHyperparams: model_id must be 1..3");
  auto check_spd_shape = [p](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != p || m.cols() != p)
      throw std::domain_error(std::string("HlmHyperparams: ") + name + " has wrong dimension");
  };
  if (model_id <= 2) {
    if (beta0.size() != p) throw std::domain_error("HlmHyperparams: beta0 has wrong dimension");
    check_spd_shape(Sigma0, "Sigma0");
    if (!(nu0 > 0.0) || !(sigma02 > 0.0))
      throw std::domain_error("HlmHyperparams: nu0 and sigma02 must be positive");
  }
  if (model_id == 2) {
    if (!(eta0 > 0.0) || !(tau02 > 0.0))
      throw std::domain_error("HlmHyperparams: eta0 and tau02 must be positive");
  }
  if (model_id == 3) {
    if (mu0.size() != p) throw std::domain_error("HlmHyperparams: mu0 has wrong dimension");
    check_spd_shape(Lambda0, "Lambda0");
    check_spd_shape(S0, "S0");
    if (!(n0 > static_cast<double>(p) - 1.0))
      throw std::domain_error("HlmHyperparams: n0 must exceed p - 1");
    if (!(eta0 > 0.0) || !(tau02 > 0.0) || !(kappa0 > 0.0) || !(alpha0 > 0.0) ||
        !(beta0_rate > 0.0))
      throw std::domain_error("HlmHyperparams: scale hyperparameters must be positive");
  }
}

HlmHyperparams unit_information_config(int model_id, const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& y) {
  if (model_id < 1 || model_id > 3)
    throw std::domain_error("unit_information_config: model_id must be 1..3");
  const OlsEstimates ols = ols_estimates(design, y);
  const double n = static_cast<double>(design.rows());
  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::MatrixXd chol = cholesky_spd(xtx, "unit-information X'X");
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols());
  const Eigen::MatrixXd chol_inv = chol.triangularView<Eigen::Lower>().solve(identity);
  const Eigen::MatrixXd xtx_inv = chol_inv.transpose() * chol_inv;
  const Eigen::MatrixXd unit_cov = n * ols.sigma2_hat * xtx_inv;

  HlmHyperparams hyper;
  hyper.model_id = model_id;
  if (model_id <= 2) {
    hyper.beta0 = ols.beta_hat;
    hyper.Sigma0 = unit_cov;
    hyper.nu0 = 1.0;
    hyper.sigma02 = ols.sigma2_hat;
  }
  if (model_id == 2) {
    hyper.eta0 = 1.0;
    hyper.tau02 = ols.sigma2_hat;
  }
  if (model_id == 3) {
    hyper.mu0 = ols.beta_hat;
    hyper.Lambda0 = unit_cov;
    hyper.S0 = unit_cov;
    hyper.n0 = 5.0;
    hyper.eta0 = 1.0;
    hyper.kappa0 = 1.0;
    hyper.alpha0 = 1.0;
    hyper.tau02 = ols.sigma2_hat;
    hyper.beta0_rate = ols.sigma2_hat;
  }
  hyper.validate(design.cols());
  return hyper;
}

}  // namespace bayesmc
