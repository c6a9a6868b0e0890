// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/evaluation.hpp"

namespace bayesmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

PointwiseLogLik::PointwiseLogLik(Eigen::MatrixXd values, std::vector<std::string> labels_in)
    : loglik(std::move(values)), labels(std::move(labels_in)) {
  if (loglik.rows() == 0 || loglik.cols() == 0)
    throw std::domain_error("PointwiseLogLik: empty matrix");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != loglik.cols())
    throw std::domain_error("PointwiseLogLik: label count must match observations");
  for (Eigen::Index b = 0; b < loglik.rows(); ++b) {
    for (Eigen::Index i = 0; i < loglik.cols(); ++i) {
      const double v = loglik(b, i);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
        throw std::domain_error("PointwiseLogLik: entries must be finite or -infinity");
    }
  }
}

DicResult dic(const std::function<double(const Eigen::VectorXd&)>& loglik_at,
              const Eigen::MatrixXd& draws) {
  if (draws.rows() == 0) throw std::domain_error("dic: no posterior draws");
  const Eigen::VectorXd posterior_mean = draws.colwise().mean();
  const double ll_at_mean = loglik_at(posterior_mean);
  if (!std::isfinite(ll_at_mean))
    throw std::runtime_error("dic: log-likelihood not finite at the posterior mean");
  // running (Welford) mean: exact for constant sequences, so a point-mass
  // posterior yields p_dic = 0 identically
  double mean_ll = 0.0;
  for (Eigen::Index b = 0; b < draws.rows(); ++b) {
    mean_ll += (loglik_at(draws.row(b)) - mean_ll) / static_cast<double>(b + 1);
  }
  DicResult out;
  out.p_dic = 2.0 * (ll_at_mean - mean_ll);
  out.dic = -2.0 * ll_at_mean + 2.0 * out.p_dic;
  return out;
}

WaicAccumulator::WaicAccumulator(Eigen::Index n_obs)
    : running_max_(Eigen::VectorXd::Constant(n_obs, kNegInf)),
      scaled_sum_(Eigen::VectorXd::Zero(n_obs)),
      loglik_mean_(Eigen::VectorXd::Zero(n_obs)) {
  if (n_obs < 1) throw std::domain_error("WaicAccumulator: needs at least one observation");
}

void WaicAccumulator::add_draw(const Eigen::VectorXd& pointwise_loglik) {
  if (pointwise_loglik.size() != running_max_.size())
    throw std::domain_error("WaicAccumulator: row length mismatch");
  for (Eigen::Index i = 0; i < pointwise_loglik.size(); ++i) {
    const double ll = pointwise_loglik[i];
    if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity())
      throw std::domain_error("WaicAccumulator: entries must be finite or -infinity");
    if (ll == kNegInf) {
      loglik_mean_[i] = kNegInf;
      continue;  // contributes zero mass to the log-mean-exp
    }
    if (ll > running_max_[i]) {
      scaled_sum_[i] = scaled_sum_[i] * std::exp(running_max_[i] - ll) + 1.0;
      running_max_[i] = ll;
    } else {
      scaled_sum_[i] += std::exp(ll - running_max_[i]);
    }
    // Welford mean stays exact for constant sequences
    if (loglik_mean_[i] != kNegInf) {
      loglik_mean_[i] += (ll - loglik_mean_[i]) / static_cast<double>(n_draws_ + 1);
    }
  }
  ++n_draws_;
}

WaicResult WaicAccumulator::result() const {
  if (n_draws_ == 0) throw std::runtime_error("WaicAccumulator: no draws added");
  const double b = static_cast<double>(n_draws_);
  WaicResult out;
  for (Eigen::Index i = 0; i < running_max_.size(); ++i) {
    if (scaled_sum_[i] <= 0.0) {
      throw std::runtime_error("waic: observation " + std::to_string(i + 1) +
                               " has zero likelihood under every draw");
    }
    const double log_mean = running_max_[i] + std::log(scaled_sum_[i] / b);
    const double mean_log = loglik_mean_[i];
    out.lppd += log_mean;
    out.p_waic += 2.0 * (log_mean - mean_log);
  }
  out.waic = -2.0 * out.lppd + 2.0 * out.p_waic;
  return out;
}

WaicResult waic(const PointwiseLogLik& pointwise) {
  WaicAccumulator acc(pointwise.loglik.cols());
  for (Eigen::Index b = 0; b < pointwise.loglik.rows(); ++b) {
    acc.add_draw(pointwise.loglik.row(b));
  }
  return acc.result();
}

}  // namespace bayesmc
