// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bayesmc {

namespace {

double sample_mean(const Eigen::VectorXd& x) { return x.mean(); }

double sample_variance(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

// Biased (1/n) autocovariance at lag t, the standard spectral convention.
double autocovariance(const Eigen::VectorXd& x, double mean, long lag) {
  const long n = x.size();
  double acc = 0.0;
  for (long i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
  return acc / static_cast<double>(n);
}

}  // namespace

double effective_size(const Eigen::VectorXd& series) {
  const long n = series.size();
  if (n < 10) throw std::invalid_argument("effective_size: series must have length >= 10");
  const double mean = sample_mean(series);
  const double gamma0 = autocovariance(series, mean, 0);
  if (gamma0 <= 0.0) throw std::runtime_error("effective_size: zero variance");

  // Sum Geyer pairs G_k = rho(2k) + rho(2k+1) while positive, enforcing
  // monotone decrease; tau = 2 sum - 1.
  double pair_sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (long k = 0; 2 * k + 1 < n; ++k) {
    const double rho_even = autocovariance(series, mean, 2 * k) / gamma0;
    const double rho_odd = autocovariance(series, mean, 2 * k + 1) / gamma0;
    double pair = rho_even + rho_odd;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    pair_sum += pair;
    prev_pair = pair;
  }
  double tau = 2.0 * pair_sum - 1.0;
  // Antithetic chains push tau toward zero; keep the estimate positive.
  tau = std::max(tau, 2.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

double mc_standard_error(const Eigen::VectorXd& series) {
  const double ess = effective_size(series);
  return std::sqrt(sample_variance(series) / ess);
}

double split_rhat(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.empty()) throw std::invalid_argument("split_rhat: needs at least one chain");
  long min_len = chains.front().size();
  for (const auto& c : chains) min_len = std::min(min_len, c.size());
  if (min_len < 4) throw std::invalid_argument("split_rhat: chains must have length >= 4");
  const long half = min_len / 2;

  std::vector<Eigen::VectorXd> halves;
  halves.reserve(2 * chains.size());
  for (const auto& c : chains) {
    halves.push_back(c.head(half));
    halves.push_back(c.tail(half));
  }
  const double m = static_cast<double>(halves.size());
  const double n = static_cast<double>(half);

  Eigen::VectorXd means(halves.size());
  double within = 0.0;
  for (size_t j = 0; j < halves.size(); ++j) {
    means[static_cast<Eigen::Index>(j)] = halves[j].mean();
    within += sample_variance(halves[j]);
  }
  within /= m;
  if (within <= 0.0) throw std::runtime_error("split_rhat: zero within-chain variance");
  const double between = n * sample_variance(means);  // n * var of half means
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

double quantile(const Eigen::VectorXd& series, double prob) {
  if (series.size() == 0) throw std::invalid_argument("quantile: empty series");
  if (!(prob > 0.0) || !(prob < 1.0))
    throw std::invalid_argument("quantile: prob must lie strictly inside (0,1)");
  std::vector<double> sorted(series.data(), series.data() + series.size());
  std::sort(sorted.begin(), sorted.end());
  const double position = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<size_t>(std::floor(position));
  const double frac = position - std::floor(position);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

DiagnosticsReport summarize(const std::vector<Chain>& chains, const std::vector<double>& probs) {
  if (chains.empty()) throw std::invalid_argument("summarize: no chains");
  for (double p : probs) {
    if (!(p > 0.0) || !(p < 1.0))
      throw std::invalid_argument("summarize: probs must lie strictly inside (0,1)");
  }
  if (!std::is_sorted(probs.begin(), probs.end()))
    throw std::invalid_argument("summarize: probs must be sorted");
  const Eigen::Index k = chains.front().draws.cols();
  long total = 0;
  for (const auto& c : chains) {
    if (c.draws.cols() != k) throw std::invalid_argument("summarize: chain layouts disagree");
    if (c.draws.rows() == 0) throw std::invalid_argument("summarize: empty chain");
    total += c.draws.rows();
  }

  DiagnosticsReport report;
  report.probs = probs;
  report.n_chains = static_cast<int>(chains.size());
  report.total_draws = total;

  long accepted = 0;
  long proposed = 0;
  for (const auto& c : chains) {
    accepted += c.accepted;
    proposed += c.proposed;
  }
  report.acceptance_rate =
      proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);

  for (Eigen::Index j = 0; j < k; ++j) {
    ParameterSummary s;
    s.name = chains.front().parameter_names.empty()
                 ? "param_" + std::to_string(j + 1)
                 : chains.front().parameter_names[static_cast<size_t>(j)];
    Eigen::VectorXd pooled(total);
    long at = 0;
    for (const auto& c : chains) {
      pooled.segment(at, c.draws.rows()) = c.draws.col(j);
      at += c.draws.rows();
    }
    s.mean = pooled.mean();
    s.sd = pooled.size() > 1 ? std::sqrt(sample_variance(pooled)) : 0.0;
    for (double p : probs) s.quantiles.push_back(quantile(pooled, p));

    if (s.sd == 0.0) {
      s.ess = static_cast<double>(total);
      s.mc_se = 0.0;
      s.rhat = 1.0;
    } else {
      double ess_total = 0.0;
      bool degenerate = false;
      for (const auto& c : chains) {
        try {
          ess_total += effective_size(c.draws.col(j));
        } catch (const std::runtime_error&) {
          degenerate = true;  // a constant chain contributes its own length
          ess_total += static_cast<double>(c.draws.rows());
        }
      }
      ess_total = std::min(ess_total, 1.05 * static_cast<double>(total));
      s.ess = ess_total;
      s.mc_se = s.sd / std::sqrt(ess_total);
      std::vector<Eigen::VectorXd> columns;
      columns.reserve(chains.size());
      for (const auto& c : chains) columns.push_back(c.draws.col(j));
      try {
        s.rhat = split_rhat(columns);
      } catch (const std::exception&) {
        s.rhat = degenerate ? 1.0 : std::numeric_limits<double>::quiet_NaN();
      }
    }
    report.parameters.push_back(std::move(s));
  }
  return report;
}

DiagnosticsReport summarize(const Chain& chain, const std::vector<double>& probs) {
  return summarize(std::vector<Chain>{chain}, probs);
}

}  // namespace bayesmc
