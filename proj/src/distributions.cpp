// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bayesmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kSimplexTol = 1e-10;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

void require_spd_shape(const Eigen::MatrixXd& m, const char* msg) {
  require(m.rows() > 0 && is_symmetric(m), msg);
}

}  // namespace

GammaSpec::GammaSpec(double shape_in, double rate_in) : shape(shape_in), rate(rate_in) {
  require(shape > 0.0 && rate > 0.0, "Gamma: shape and rate must be positive");
}

InverseGammaSpec::InverseGammaSpec(double shape_in, double scale_in)
    : shape(shape_in), scale(scale_in) {
  require(shape > 0.0 && scale > 0.0, "InverseGamma: shape and scale must be positive");
}

NormalSpec::NormalSpec(double mean_in, double variance_in)
    : mean(mean_in), variance(variance_in) {
  require(variance > 0.0, "Normal: variance must be positive");
}

UniformSpec::UniformSpec(double lower_in, double upper_in) : lower(lower_in), upper(upper_in) {
  require(lower < upper, "Uniform: requires lower < upper");
}

PoissonSpec::PoissonSpec(double rate_in) : rate(rate_in) {
  require(rate > 0.0, "Poisson: rate must be positive");
}

DirichletSpec::DirichletSpec(Eigen::VectorXd alpha_in) : alpha(std::move(alpha_in)) {
  require(alpha.size() >= 2, "Dirichlet: needs at least two components");
  require((alpha.array() > 0.0).all(), "Dirichlet: all concentrations must be positive");
}

MvNormalSpec::MvNormalSpec(Eigen::VectorXd mean_in, Eigen::MatrixXd cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
  require_spd_shape(cov, "MvNormal: covariance must be square and symmetric");
  require(cov.rows() == mean.size(), "MvNormal: mean/covariance dimension mismatch");
}

InverseWishartSpec::InverseWishartSpec(double df_in, Eigen::MatrixXd scale_in)
    : df(df_in), scale(std::move(scale_in)) {
  require_spd_shape(scale, "InverseWishart: scale must be square and symmetric");
  require(df > static_cast<double>(scale.rows()) - 1.0,
          "InverseWishart: df must exceed dimension - 1");
}

Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const std::string& context) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double d = static_cast<double>(m.rows());
  const double ridge = 1e-10 * m.trace() / d;
  Eigen::MatrixXd jittered = m + ridge * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  llt.compute(jittered);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  throw std::runtime_error("cholesky_spd: matrix not positive definite after jitter retry: " +
                           context);
}

namespace {

double log_density_gamma(const GammaSpec& g, double x) {
  if (!(x > 0.0)) return kNegInf;
  return g.shape * std::log(g.rate) - std::lgamma(g.shape) + (g.shape - 1.0) * std::log(x) -
         g.rate * x;
}

double log_density_inverse_gamma(const InverseGammaSpec& g, double x) {
  if (!(x > 0.0)) return kNegInf;
  return g.shape * std::log(g.scale) - std::lgamma(g.shape) -
         (g.shape + 1.0) * std::log(x) - g.scale / x;
}

double log_density_normal(const NormalSpec& n, double x) {
  const double r = x - n.mean;
  return -0.5 * (kLogTwoPi + std::log(n.variance)) - 0.5 * r * r / n.variance;
}

double log_density_uniform(const UniformSpec& u, double x) {
  if (x < u.lower || x > u.upper) return kNegInf;
  return -std::log(u.upper - u.lower);
}

double log_density_poisson(const PoissonSpec& p, double x) {
  if (x < 0.0 || x != std::floor(x)) return kNegInf;
  return x * std::log(p.rate) - p.rate - std::lgamma(x + 1.0);
}

double log_density_dirichlet(const DirichletSpec& d, const Eigen::VectorXd& x) {
  if (x.size() != d.alpha.size()) throw std::domain_error("Dirichlet: point dimension mismatch");
  if ((x.array() <= 0.0).any() || std::fabs(x.sum() - 1.0) > kSimplexTol) return kNegInf;
  double value = std::lgamma(d.alpha.sum());
  for (Eigen::Index j = 0; j < d.alpha.size(); ++j) {
    value += -std::lgamma(d.alpha[j]) + (d.alpha[j] - 1.0) * std::log(x[j]);
  }
  return value;
}

double log_density_mvnormal(const MvNormalSpec& m, const Eigen::VectorXd& x) {
  if (x.size() != m.mean.size()) throw std::domain_error("MvNormal: point dimension mismatch");
  const Eigen::MatrixXd chol = cholesky_spd(m.cov, "MvNormal covariance");
  const Eigen::VectorXd centered = x - m.mean;
  const Eigen::VectorXd z = chol.triangularView<Eigen::Lower>().solve(centered);
  const double log_det = 2.0 * chol.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * kLogTwoPi + log_det + z.squaredNorm());
}

double log_density_inverse_wishart(const InverseWishartSpec& spec, const Eigen::MatrixXd& w) {
  if (w.rows() != spec.scale.rows() || w.cols() != spec.scale.cols())
    throw std::domain_error("InverseWishart: point dimension mismatch");
  if (!is_symmetric(w)) return kNegInf;
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double d = static_cast<double>(w.rows());
  const Eigen::MatrixXd chol = llt.matrixL();
  const double log_det = 2.0 * chol.diagonal().array().log().sum();
  const double trace_term = llt.solve(spec.scale).trace();
  return -0.5 * (spec.df + d + 1.0) * log_det - 0.5 * trace_term;
}

[[noreturn]] void wrong_point_kind(const char* family) {
  throw std::domain_error(std::string("log_density: point type does not match ") + family);
}

}  // namespace

double log_density(const DistributionSpec& spec, double x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GammaSpec>) return log_density_gamma(s, x);
        else if constexpr (std::is_same_v<T, InverseGammaSpec>) return log_density_inverse_gamma(s, x);
        else if constexpr (std::is_same_v<T, NormalSpec>) return log_density_normal(s, x);
        else if constexpr (std::is_same_v<T, UniformSpec>) return log_density_uniform(s, x);
        else if constexpr (std::is_same_v<T, PoissonSpec>) return log_density_poisson(s, x);
        else wrong_point_kind("a scalar family");
      },
      spec);
}

double log_density(const DistributionSpec& spec, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DirichletSpec>) return log_density_dirichlet(s, x);
        else if constexpr (std::is_same_v<T, MvNormalSpec>) return log_density_mvnormal(s, x);
        else wrong_point_kind("a vector family");
      },
      spec);
}

double log_density(const DistributionSpec& spec, const Eigen::MatrixXd& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, InverseWishartSpec>)
          return log_density_inverse_wishart(s, x);
        else wrong_point_kind("a matrix family");
      },
      spec);
}

Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RandomStream& rng) {
  if (alpha.size() < 2) throw std::domain_error("sample_dirichlet: needs at least two components");
  if ((alpha.array() <= 0.0).any())
    throw std::domain_error("sample_dirichlet: all concentrations must be positive");
  Eigen::VectorXd gammas(alpha.size());
  for (;;) {
    for (Eigen::Index j = 0; j < alpha.size(); ++j) {
      gammas[j] = sample_gamma(alpha[j], 1.0, rng);
    }
    const double total = gammas.sum();
    if (total > 0.0) return gammas / total;
    // all draws underflowed (tiny concentrations); try again
  }
}

Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                RandomStream& rng) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::domain_error("sample_mvnormal: mean/covariance dimension mismatch");
  const Eigen::MatrixXd chol = cholesky_spd(cov, "sample_mvnormal covariance");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.standard_normal();
  return mean + chol * z;
}

Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale,
                                       RandomStream& rng) {
  const Eigen::Index d = scale.rows();
  if (scale.cols() != d || d < 1)
    throw std::domain_error("sample_inverse_wishart: scale must be square");
  if (!(df > static_cast<double>(d) - 1.0))
    throw std::domain_error("sample_inverse_wishart: df must exceed dimension - 1");

  const Eigen::MatrixXd scale_chol = cholesky_spd(scale, "inverse Wishart scale");
  const Eigen::MatrixXd scale_inv =
      scale_chol.triangularView<Eigen::Lower>()
          .solve(Eigen::MatrixXd::Identity(d, d))
          .transpose() *
      scale_chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd wishart_chol = cholesky_spd(scale_inv, "inverse Wishart inverted scale");

  // Bartlett: A lower triangular, A_ii = sqrt(chi2_{df-i}), A_ij ~ N(0,1).
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double dof = df - static_cast<double>(i);
    bartlett(i, i) = std::sqrt(2.0 * sample_gamma(dof / 2.0, 1.0, rng));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = rng.standard_normal();
  }
  const Eigen::MatrixXd factor = wishart_chol * bartlett;  // Wishart draw = factor factor^T
  const Eigen::MatrixXd inv_factor =
      factor.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd draw = inv_factor.transpose() * inv_factor;
  return 0.5 * (draw + draw.transpose());
}

}  // namespace bayesmc
