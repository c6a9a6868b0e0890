// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bayesmc/rng.hpp"

namespace bayesmc {

// B x n matrix of log p(y_i | theta^(b)); entries may be -infinity but
// never +infinity or NaN.
struct PointwiseLogLik {
  Eigen::MatrixXd loglik;
  std::vector<std::string> labels;

  explicit PointwiseLogLik(Eigen::MatrixXd values, std::vector<std::string> labels_in = {});
};

struct DicResult {
  double dic = 0.0;
  double p_dic = 0.0;
};

// DIC = -2 log p(y | theta_hat) + 2 p_DIC with theta_hat the posterior-mean
// parameter vector and p_DIC = 2[log p(y|theta_hat) - mean_b log p(y|theta_b)].
// `loglik_at` must be finite at the posterior mean.
DicResult dic(const std::function<double(const Eigen::VectorXd&)>& loglik_at,
              const Eigen::MatrixXd& draws);

struct WaicResult {
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;
};

// Streaming WAIC: feed one pointwise log-likelihood row per posterior draw.
// Per-observation log-mean-exp uses running max subtraction, so huge B x n
// problems never materialize the full matrix.
class WaicAccumulator {
 public:
  explicit WaicAccumulator(Eigen::Index n_obs);
  void add_draw(const Eigen::VectorXd& pointwise_loglik);
  WaicResult result() const;
  long n_draws() const { return n_draws_; }

 private:
  Eigen::VectorXd running_max_;
  Eigen::VectorXd scaled_sum_;  // sum_b exp(ll_bi - running_max_i)
  Eigen::VectorXd loglik_mean_;
  long n_draws_ = 0;
};

WaicResult waic(const PointwiseLogLik& pointwise);

struct EvaluationReport {
  double dic = 0.0;
  double p_dic = 0.0;
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;
};

struct PppReport {
  std::string statistic;
  double observed = 0.0;
  Eigen::VectorXd replicate_stats;
  double ppp = 0.0;  // fraction of replicate statistics strictly above observed
};

// Posterior predictive p-value: one replicate dataset per retained draw,
// Pr(t(y_rep) > t(y) | y) with a strict inequality (ties do not count).
template <typename Dataset>
PppReport posterior_predictive_p(
    const Eigen::MatrixXd& draws,
    const std::function<Dataset(const Eigen::VectorXd&, RandomStream&)>& replicate,
    const std::function<double(const Dataset&)>& statistic, const Dataset& observed,
    RandomStream& rng, std::string statistic_name = "statistic") {
  if (draws.rows() < 100)
    throw std::domain_error("posterior_predictive_p: needs at least 100 draws");
  PppReport report;
  report.statistic = std::move(statistic_name);
  report.observed = statistic(observed);
  if (!std::isfinite(report.observed))
    throw std::runtime_error("posterior_predictive_p: statistic not finite on observed data");
  report.replicate_stats.resize(draws.rows());
  long exceed = 0;
  for (Eigen::Index b = 0; b < draws.rows(); ++b) {
    const Dataset replica = replicate(draws.row(b), rng);
    const double value = statistic(replica);
    if (!std::isfinite(value))
      throw std::runtime_error("posterior_predictive_p: statistic not finite on a replicate");
    report.replicate_stats[b] = value;
    if (value > report.observed) ++exceed;
  }
  report.ppp = static_cast<double>(exceed) / static_cast<double>(draws.rows());
  return report;
}

}  // namespace bayesmc
