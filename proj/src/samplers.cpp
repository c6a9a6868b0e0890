// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/samplers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bayesmc/distributions.hpp"

namespace bayesmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Accept iff log(u) < min(0, log_ratio); never exponentiates a positive log.
bool accept_log_ratio(double log_ratio, RandomStream& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform01_open_left()) < log_ratio;
}

}  // namespace

void Schedule::validate() const {
  if (iterations <= 0) throw std::domain_error("Schedule: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::domain_error("Schedule: burn-in must lie in [0, iterations)");
  if (thin < 1) throw std::domain_error("Schedule: thin must be >= 1");
  if (retained() < 1) throw std::domain_error("Schedule: no draws would be retained");
}

MetropolisConfig scaled_proposal(double c, const Eigen::MatrixXd& design) {
  if (!(c > 0.0)) throw std::domain_error("scaled_proposal: c must be positive");
  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::MatrixXd chol = cholesky_spd(xtx, "proposal X'X");
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols());
  const Eigen::MatrixXd chol_inv = chol.triangularView<Eigen::Lower>().solve(identity);
  return MetropolisConfig{c * chol_inv.transpose() * chol_inv};
}

Chain run_iid_dirichlet(const Eigen::VectorXd& alpha_post, const Schedule& schedule,
                        std::uint64_t stream_id) {
  schedule.validate();
  RandomStream rng(schedule.seed, stream_id);
  const long retained = schedule.retained();
  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.draws.resize(retained, alpha_post.size());
  chain.parameter_names.reserve(alpha_post.size());
  for (Eigen::Index j = 0; j < alpha_post.size(); ++j) {
    chain.parameter_names.push_back("theta_" + std::to_string(j + 1));
  }
  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    const Eigen::VectorXd draw = sample_dirichlet(alpha_post, rng);
    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      chain.draws.row(row++) = draw;
    }
  }
  chain.accepted = retained;
  chain.proposed = retained;
  return chain;
}

Chain run_metropolis(const LogDensityFn& target, const MetropolisConfig& config,
                     const Eigen::VectorXd& init, const Schedule& schedule,
                     std::uint64_t stream_id) {
  schedule.validate();
  if (config.proposal_cov.rows() != init.size() || config.proposal_cov.cols() != init.size())
    throw std::domain_error("run_metropolis: proposal covariance dimension mismatch");
  double current_lp = target(init);
  if (!std::isfinite(current_lp))
    throw std::invalid_argument("run_metropolis: target is not finite at the initial point");

  RandomStream rng(schedule.seed, stream_id);
  const Eigen::MatrixXd chol = cholesky_spd(config.proposal_cov, "Metropolis proposal");
  const Eigen::Index k = init.size();

  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.draws.resize(schedule.retained(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    chain.parameter_names.push_back("beta_" + std::to_string(j + 1));

  Eigen::VectorXd current = init;
  Eigen::VectorXd z(k);
  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    for (Eigen::Index j = 0; j < k; ++j) z[j] = rng.standard_normal();
    const Eigen::VectorXd proposal = current + chol * z;
    const double proposal_lp = target(proposal);
    ++chain.proposed;
    if (!std::isfinite(proposal_lp)) {
      ++chain.nonfinite_rejects;
    } else if (accept_log_ratio(proposal_lp - current_lp, rng)) {
      current = proposal;
      current_lp = proposal_lp;
      ++chain.accepted;
    }
    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      chain.draws.row(row++) = current;
    }
  }
  return chain;
}

namespace {

void spot_check_gradient(const LogDensityFn& target, const GradientFn& gradient,
                         const Eigen::VectorXd& init) {
  if (gradient(init).size() != init.size())
    throw std::invalid_argument("run_hmc: gradient dimension mismatch");
  // check at the start point and at a deterministic offset; the offset
  // catches gradients that merely vanish where the target does
  for (const double shift : {0.0, 0.05}) {
    Eigen::VectorXd base = init;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      base[i] += shift * (1.0 + 0.25 * static_cast<double>(i % 4));
    }
    if (!std::isfinite(target(base))) continue;
    const Eigen::VectorXd g = gradient(base);
    Eigen::VectorXd point = base;
    const Eigen::Index checks = std::min<Eigen::Index>(base.size(), 8);
    for (Eigen::Index i = 0; i < checks; ++i) {
      const double h = 1e-5 * (1.0 + std::fabs(base[i]));
      point[i] = base[i] + h;
      const double up = target(point);
      point[i] = base[i] - h;
      const double down = target(point);
      point[i] = base[i];
      const double fd = (up - down) / (2.0 * h);
      if (std::fabs(fd - g[i]) > 1e-4 * (1.0 + std::max(std::fabs(fd), std::fabs(g[i])))) {
        throw std::invalid_argument(
            "run_hmc: gradient inconsistent with target near the initial point (component " +
            std::to_string(i + 1) + ")");
      }
    }
  }
}

}  // namespace

Chain run_hmc(const LogDensityFn& target, const GradientFn& gradient, const HmcConfig& config,
              const Eigen::VectorXd& init, const Schedule& schedule, std::uint64_t stream_id) {
  schedule.validate();
  if (config.leapfrog_steps < 1) throw std::domain_error("run_hmc: leapfrog_steps must be >= 1");
  if (!(config.step_size > 0.0)) throw std::domain_error("run_hmc: step_size must be positive");
  const Eigen::Index k = init.size();
  Eigen::VectorXd mass = config.mass_diag.size() == 0 ? Eigen::VectorXd::Ones(k)
                                                      : config.mass_diag;
  if (mass.size() != k || (mass.array() <= 0.0).any())
    throw std::domain_error("run_hmc: mass diagonal must be positive and match the dimension");

  double current_lp = target(init);
  if (!std::isfinite(current_lp))
    throw std::invalid_argument("run_hmc: target is not finite at the initial point");
  spot_check_gradient(target, gradient, init);

  RandomStream rng(schedule.seed, stream_id);
  const double eps = config.step_size;
  const long steps = config.leapfrog_steps;
  const Eigen::VectorXd inv_mass = mass.cwiseInverse();

  // Momentum is drawn from N(0, M); its log density enters the ratio up to
  // the constant, which cancels.
  const auto momentum_log_density = [&](const Eigen::VectorXd& phi) {
    return -0.5 * (phi.array().square() * inv_mass.array()).sum();
  };

  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.draws.resize(schedule.retained(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    chain.parameter_names.push_back("beta_" + std::to_string(j + 1));

  Eigen::VectorXd current = init;
  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    Eigen::VectorXd phi(k);
    for (Eigen::Index j = 0; j < k; ++j)
      phi[j] = std::sqrt(mass[j]) * rng.standard_normal();
    const double initial_momentum_lp = momentum_log_density(phi);

    Eigen::VectorXd position = current;
    Eigen::VectorXd momentum = phi;
    bool diverged = false;

    if (config.integrator == HmcIntegrator::canonical_leapfrog) {
      Eigen::VectorXd g = gradient(position);
      if (!all_finite(g)) diverged = true;
      if (!diverged) {
        momentum += 0.5 * eps * g;
        for (long l = 1; l <= steps && !diverged; ++l) {
          position += eps * mass.cwiseProduct(momentum);
          g = gradient(position);
          if (!all_finite(g) || !all_finite(position)) {
            diverged = true;
            break;
          }
          momentum += (l < steps ? eps : 0.5 * eps) * g;
        }
      }
    } else {
      for (long l = 1; l <= steps && !diverged; ++l) {
        const Eigen::VectorXd g = gradient(position);
        if (!all_finite(g)) {
          diverged = true;
          break;
        }
        momentum += 0.5 * eps * g;
        position += eps * mass.cwiseProduct(momentum);
        if (!all_finite(position)) diverged = true;
      }
    }

    ++chain.proposed;
    if (diverged) {
      ++chain.nonfinite_rejects;
    } else {
      const double proposal_lp = target(position);
      if (!std::isfinite(proposal_lp)) {
        ++chain.nonfinite_rejects;
      } else {
        const double log_ratio = proposal_lp - current_lp +
                                 momentum_log_density(momentum) - initial_momentum_lp;
        if (accept_log_ratio(log_ratio, rng)) {
          current = position;
          current_lp = proposal_lp;
          ++chain.accepted;
        }
      }
    }
    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      chain.draws.row(row++) = current;
    }
  }
  return chain;
}

namespace gibbs {

Eigen::VectorXd draw_gaussian_by_precision(const Eigen::MatrixXd& precision,
                                           const Eigen::VectorXd& linear, RandomStream& rng) {
  const Eigen::MatrixXd chol = cholesky_spd(precision, "full-conditional precision");
  // mean solves L L^T mean = linear
  Eigen::VectorXd mean = chol.triangularView<Eigen::Lower>().solve(linear);
  mean = chol.transpose().triangularView<Eigen::Upper>().solve(mean);
  Eigen::VectorXd z(linear.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.standard_normal();
  return mean + chol.transpose().triangularView<Eigen::Upper>().solve(z);
}

Eigen::VectorXd draw_coef(const Eigen::MatrixXd& prior_prec, const Eigen::VectorXd& prior_prec_mean,
                          const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty, double sigma2,
                          RandomStream& rng) {
  const Eigen::MatrixXd precision = prior_prec + xtx / sigma2;
  const Eigen::VectorXd linear = prior_prec_mean + xty / sigma2;
  return draw_gaussian_by_precision(precision, linear, rng);
}

double draw_obs_variance(double nu0, double sigma02, double n, double ssr, RandomStream& rng) {
  return sample_inverse_gamma((nu0 + n) / 2.0, (nu0 * sigma02 + ssr) / 2.0, rng);
}

double draw_random_effect(double resid_sum, double n_j, double sigma2, double tau2,
                          RandomStream& rng) {
  const double precision = 1.0 / tau2 + n_j / sigma2;
  const double mean = (resid_sum / sigma2) / precision;
  return sample_normal(mean, 1.0 / precision, rng);
}

double draw_effect_variance(double eta0, double tau02, const Eigen::VectorXd& theta,
                            RandomStream& rng) {
  const double m = static_cast<double>(theta.size());
  return sample_inverse_gamma((eta0 + m) / 2.0, (eta0 * tau02 + theta.squaredNorm()) / 2.0, rng);
}

Eigen::MatrixXd draw_coef_covariance(double n0, const Eigen::MatrixXd& S0,
                                     const Eigen::MatrixXd& coef_scatter, long m,
                                     RandomStream& rng) {
  return sample_inverse_wishart(n0 + static_cast<double>(m), S0 + coef_scatter, rng);
}

double draw_group_variance(double nu, double sigma2, double n_j, double ssr_j,
                           RandomStream& rng) {
  return sample_inverse_gamma((nu + n_j) / 2.0, (nu * sigma2 + ssr_j) / 2.0, rng);
}

double draw_variance_scale(double alpha0, double beta0_rate, long m, double nu,
                           double sum_inv_group_var, RandomStream& rng) {
  return sample_gamma(alpha0 + static_cast<double>(m) * nu / 2.0,
                      beta0_rate + nu / 2.0 * sum_inv_group_var, rng);
}

}  // namespace gibbs

long sample_nu_conditional(const Eigen::VectorXd& sigma2_groups, double sigma2, double kappa0,
                           const std::vector<int>& grid, RandomStream& rng) {
  if (grid.empty()) throw std::domain_error("sample_nu_conditional: empty grid");
  for (int v : grid) {
    if (v < 1) throw std::domain_error("sample_nu_conditional: grid values must be >= 1");
  }
  if (!(sigma2 > 0.0) || !(kappa0 > 0.0))
    throw std::domain_error("sample_nu_conditional: sigma2 and kappa0 must be positive");
  if ((sigma2_groups.array() <= 0.0).any())
    throw std::domain_error("sample_nu_conditional: group variances must be positive");

  const double m = static_cast<double>(sigma2_groups.size());
  const double sum_log_inv = -sigma2_groups.array().log().sum();
  const double sum_inv = sigma2_groups.cwiseInverse().sum();

  std::vector<double> log_mass(grid.size());
  double max_log = kNegInf;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double nu = static_cast<double>(grid[i]);
    const double value = m * (0.5 * nu * std::log(nu * sigma2 / 2.0) - std::lgamma(nu / 2.0)) +
                         0.5 * nu * sum_log_inv - nu * (kappa0 + 0.5 * sigma2 * sum_inv);
    log_mass[i] = value;
    if (value > max_log) max_log = value;
  }
  if (!std::isfinite(max_log))
    throw std::runtime_error("sample_nu_conditional: all grid points have zero mass");

  double total = 0.0;
  for (double& lm : log_mass) {
    lm = std::exp(lm - max_log);
    total += lm;
  }
  const double u = rng.uniform01() * total;
  double cumulative = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    cumulative += log_mass[i];
    if (u < cumulative) return grid[i];
  }
  return grid.back();
}

namespace {

// Per-group sufficient statistics; every conditional below is O(p^2) in them.
struct GroupStats {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  Eigen::VectorXd col_sum;  // X_j' 1
  double y_sum = 0.0;
  double yty = 0.0;
  double n = 0.0;
};

std::vector<GroupStats> compute_group_stats(const HlmData& data) {
  std::vector<GroupStats> stats;
  stats.reserve(static_cast<size_t>(data.m()));
  for (const auto& g : data.groups()) {
    GroupStats s;
    s.xtx = g.design.transpose() * g.design;
    s.xty = g.design.transpose() * g.response;
    s.col_sum = g.design.colwise().sum().transpose();
    s.y_sum = g.response.sum();
    s.yty = g.response.squaredNorm();
    s.n = static_cast<double>(g.design.rows());
    stats.push_back(std::move(s));
  }
  return stats;
}

// ||y_j - X_j beta - theta_j 1||^2 from sufficient statistics.
double group_ssr(const GroupStats& s, const Eigen::VectorXd& beta, double theta_j) {
  const double resid_sum = s.y_sum - s.col_sum.dot(beta);
  return s.yty - 2.0 * beta.dot(s.xty) + beta.dot(s.xtx * beta) -
         2.0 * theta_j * resid_sum + s.n * theta_j * theta_j;
}

Eigen::MatrixXd precision_of(const Eigen::MatrixXd& cov, const char* context) {
  const Eigen::MatrixXd chol = cholesky_spd(cov, context);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  const Eigen::MatrixXd chol_inv = chol.triangularView<Eigen::Lower>().solve(identity);
  return chol_inv.transpose() * chol_inv;
}

}  // namespace

HlmState default_hlm_init(const HlmData& data, const HlmHyperparams& hyper) {
  const OlsEstimates ols = ols_estimates(data.pooled_design(), data.pooled_response());
  HlmState state;
  state.beta = ols.beta_hat;
  state.sigma2 = ols.sigma2_hat;
  state.theta = Eigen::VectorXd::Zero(data.m());
  state.tau2 = hyper.model_id >= 2 ? hyper.tau02 : ols.sigma2_hat;
  if (hyper.model_id == 3) {
    state.group_coefs = ols.beta_hat.replicate(1, data.m());
    const double denom = hyper.n0 - static_cast<double>(data.p()) - 1.0;
    state.Sigma = denom > 0.0 ? Eigen::MatrixXd(hyper.S0 / denom) : hyper.S0;
    state.sigma2_groups = Eigen::VectorXd::Constant(data.m(), ols.sigma2_hat);
    state.nu = 1.0;
  }
  return state;
}

std::vector<std::string> hlm_parameter_names(int model_id, Eigen::Index p, Eigen::Index m) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("beta_" + std::to_string(j + 1));
  names.push_back("sigma2");
  if (model_id >= 2) {
    names.push_back("tau2");
    for (Eigen::Index j = 0; j < m; ++j) names.push_back("theta_" + std::to_string(j + 1));
  }
  if (model_id == 3) {
    names.push_back("nu");
    for (Eigen::Index j = 0; j < m; ++j) names.push_back("sigma2_g" + std::to_string(j + 1));
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index c = 0; c < p; ++c) {
        names.push_back("beta_g" + std::to_string(j + 1) + "_" + std::to_string(c + 1));
      }
    }
    for (Eigen::Index r = 0; r < p; ++r) {
      for (Eigen::Index c = r; c < p; ++c) {
        names.push_back("Sigma_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
      }
    }
  }
  return names;
}

Chain run_gibbs_hlm1(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id, const std::optional<HlmState>& init) {
  schedule.validate();
  hyper.validate(data.p());
  const Eigen::MatrixXd design = data.pooled_design();
  const Eigen::VectorXd y = data.pooled_response();
  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::VectorXd xty = design.transpose() * y;
  const double yty = y.squaredNorm();
  const double n = static_cast<double>(data.n());

  const Eigen::MatrixXd prior_prec = precision_of(hyper.Sigma0, "Sigma0");
  const Eigen::VectorXd prior_prec_mean = prior_prec * hyper.beta0;

  HlmState state = init.value_or(default_hlm_init(data, hyper));
  RandomStream rng(schedule.seed, stream_id);

  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.parameter_names = hlm_parameter_names(1, data.p(), data.m());
  chain.draws.resize(schedule.retained(), data.p() + 1);

  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    state.beta = gibbs::draw_coef(prior_prec, prior_prec_mean, xtx, xty, state.sigma2, rng);
    const double ssr = yty - 2.0 * state.beta.dot(xty) + state.beta.dot(xtx * state.beta);
    state.sigma2 = gibbs::draw_obs_variance(hyper.nu0, hyper.sigma02, n, ssr, rng);
    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      chain.draws.row(row).head(data.p()) = state.beta;
      chain.draws(row, data.p()) = state.sigma2;
      ++row;
    }
  }
  chain.accepted = chain.proposed = schedule.retained();
  return chain;
}

Chain run_gibbs_hlm2(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id, const std::optional<HlmState>& init) {
  schedule.validate();
  hyper.validate(data.p());
  if (data.m() < 2) throw std::domain_error("run_gibbs_hlm2: needs at least two groups");
  const std::vector<GroupStats> stats = compute_group_stats(data);
  const Eigen::Index p = data.p();
  const Eigen::Index m = data.m();
  const double n = static_cast<double>(data.n());

  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  for (const auto& s : stats) {
    xtx += s.xtx;
    xty += s.xty;
  }
  const Eigen::MatrixXd prior_prec = precision_of(hyper.Sigma0, "Sigma0");
  const Eigen::VectorXd prior_prec_mean = prior_prec * hyper.beta0;

  HlmState state = init.value_or(default_hlm_init(data, hyper));
  RandomStream rng(schedule.seed, stream_id);

  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.parameter_names = hlm_parameter_names(2, p, m);
  chain.draws.resize(schedule.retained(), p + 2 + m);

  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const double resid_sum = s.y_sum - s.col_sum.dot(state.beta);
      state.theta[j] = gibbs::draw_random_effect(resid_sum, s.n, state.sigma2, state.tau2, rng);
    }
    state.tau2 = gibbs::draw_effect_variance(hyper.eta0, hyper.tau02, state.theta, rng);
    Eigen::VectorXd xty_adj = xty;
    for (Eigen::Index j = 0; j < m; ++j)
      xty_adj -= state.theta[j] * stats[static_cast<size_t>(j)].col_sum;
    state.beta = gibbs::draw_coef(prior_prec, prior_prec_mean, xtx, xty_adj, state.sigma2, rng);
    double ssr = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      ssr += group_ssr(stats[static_cast<size_t>(j)], state.beta, state.theta[j]);
    state.sigma2 = gibbs::draw_obs_variance(hyper.nu0, hyper.sigma02, n, ssr, rng);

    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      chain.draws.row(row).head(p) = state.beta;
      chain.draws(row, p) = state.sigma2;
      chain.draws(row, p + 1) = state.tau2;
      chain.draws.row(row).segment(p + 2, m) = state.theta;
      ++row;
    }
  }
  chain.accepted = chain.proposed = schedule.retained();
  return chain;
}

Chain run_gibbs_hlm3(const HlmData& data, const HlmHyperparams& hyper, const Schedule& schedule,
                     std::uint64_t stream_id, const std::optional<HlmState>& init,
                     int nu_grid_max) {
  schedule.validate();
  hyper.validate(data.p());
  if (data.m() < 2) throw std::domain_error("run_gibbs_hlm3: needs at least two groups");
  if (nu_grid_max < 1) throw std::domain_error("run_gibbs_hlm3: nu grid must be nonempty");
  for (const auto& g : data.groups()) {
    if (g.design.rows() <= g.design.cols()) {
      throw std::domain_error("run_gibbs_hlm3: group '" + g.label +
                              "' has fewer rows than coefficients + 1");
    }
  }
  const std::vector<GroupStats> stats = compute_group_stats(data);
  const Eigen::Index p = data.p();
  const Eigen::Index m = data.m();

  const Eigen::MatrixXd lambda0_prec = precision_of(hyper.Lambda0, "Lambda0");
  const Eigen::VectorXd lambda0_prec_mu0 = lambda0_prec * hyper.mu0;
  std::vector<int> nu_grid(static_cast<size_t>(nu_grid_max));
  for (int i = 0; i < nu_grid_max; ++i) nu_grid[static_cast<size_t>(i)] = i + 1;

  HlmState state = init.value_or(default_hlm_init(data, hyper));
  RandomStream rng(schedule.seed, stream_id);

  Chain chain;
  chain.schedule = schedule;
  chain.stream_id = stream_id;
  chain.parameter_names = hlm_parameter_names(3, p, m);
  chain.draws.resize(schedule.retained(), static_cast<Eigen::Index>(chain.parameter_names.size()));

  long row = 0;
  for (long b = 1; b <= schedule.iterations; ++b) {
    // 1. random effects (group-specific observation variance)
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const double resid_sum = s.y_sum - s.col_sum.dot(state.group_coefs.col(j));
      state.theta[j] =
          gibbs::draw_random_effect(resid_sum, s.n, state.sigma2_groups[j], state.tau2, rng);
    }
    // 2. random-effect variance
    state.tau2 = gibbs::draw_effect_variance(hyper.eta0, hyper.tau02, state.theta, rng);
    // 3. group coefficients
    const Eigen::MatrixXd sigma_prec = precision_of(state.Sigma, "between-group covariance");
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const Eigen::VectorXd xty_adj = s.xty - state.theta[j] * s.col_sum;
      state.group_coefs.col(j) = gibbs::draw_coef(sigma_prec, sigma_prec * state.beta, s.xtx,
                                                  xty_adj, state.sigma2_groups[j], rng);
    }
    // 4. global coefficient mean
    {
      const Eigen::MatrixXd precision = lambda0_prec + static_cast<double>(m) * sigma_prec;
      const Eigen::VectorXd linear = lambda0_prec_mu0 + sigma_prec * state.group_coefs.rowwise().sum();
      state.beta = gibbs::draw_gaussian_by_precision(precision, linear, rng);
    }
    // 5. between-group covariance
    {
      Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd dev = state.group_coefs.col(j) - state.beta;
        scatter += dev * dev.transpose();
      }
      state.Sigma = gibbs::draw_coef_covariance(hyper.n0, hyper.S0, scatter, m, rng);
    }
    // 6. group variances
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const double ssr_j = group_ssr(s, state.group_coefs.col(j), state.theta[j]);
      state.sigma2_groups[j] =
          gibbs::draw_group_variance(state.nu, state.sigma2, s.n, ssr_j, rng);
    }
    // 7. group-variance shape over the integer grid
    state.nu = static_cast<double>(
        sample_nu_conditional(state.sigma2_groups, state.sigma2, hyper.kappa0, nu_grid, rng));
    // 8. group-variance scale
    state.sigma2 = gibbs::draw_variance_scale(hyper.alpha0, hyper.beta0_rate, m, state.nu,
                                              state.sigma2_groups.cwiseInverse().sum(), rng);

    if (b > schedule.burn_in && (b - schedule.burn_in) % schedule.thin == 0) {
      Eigen::Index col = 0;
      chain.draws.row(row).segment(col, p) = state.beta;
      col += p;
      chain.draws(row, col++) = state.sigma2;
      chain.draws(row, col++) = state.tau2;
      chain.draws.row(row).segment(col, m) = state.theta;
      col += m;
      chain.draws(row, col++) = state.nu;
      chain.draws.row(row).segment(col, m) = state.sigma2_groups;
      col += m;
      for (Eigen::Index j = 0; j < m; ++j) {
        chain.draws.row(row).segment(col, p) = state.group_coefs.col(j);
        col += p;
      }
      for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = r; c < p; ++c) chain.draws(row, col++) = state.Sigma(r, c);
      }
      ++row;
    }
  }
  chain.accepted = chain.proposed = schedule.retained();
  return chain;
}

}  // namespace bayesmc
