// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "bayesmc/rng.hpp"

namespace bayesmc {

// Parameter holders for every distribution family used by the engine.
// Constructors validate the parameter domain and throw std::domain_error.
// Points outside the support are not errors: log_density returns -infinity
// there so rejection-style acceptance ratios can handle boundary proposals.

struct GammaSpec {
  double shape;
  double rate;  // mean = shape / rate
  GammaSpec(double shape, double rate);
};

struct InverseGammaSpec {
  double shape;
  double scale;
  InverseGammaSpec(double shape, double scale);
};

struct NormalSpec {
  double mean;
  double variance;
  NormalSpec(double mean, double variance);
};

struct UniformSpec {
  double lower;
  double upper;
  UniformSpec(double lower, double upper);
};

struct PoissonSpec {
  double rate;
  explicit PoissonSpec(double rate);
};

struct DirichletSpec {
  Eigen::VectorXd alpha;
  explicit DirichletSpec(Eigen::VectorXd alpha);
};

struct MvNormalSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  MvNormalSpec(Eigen::VectorXd mean, Eigen::MatrixXd cov);
};

// Density is kept unnormalized: the constant is never needed because no
// acceptance ratio in the engine evaluates an inverse Wishart density.
struct InverseWishartSpec {
  double df;
  Eigen::MatrixXd scale;
  InverseWishartSpec(double df, Eigen::MatrixXd scale);
};

using DistributionSpec =
    std::variant<GammaSpec, InverseGammaSpec, NormalSpec, UniformSpec, PoissonSpec,
                 DirichletSpec, MvNormalSpec, InverseWishartSpec>;

double log_density(const DistributionSpec& spec, double x);
double log_density(const DistributionSpec& spec, const Eigen::VectorXd& x);
double log_density(const DistributionSpec& spec, const Eigen::MatrixXd& x);

// Cholesky with one jittered retry (ridge 1e-10 * trace/d) before failing;
// near-singular unit-information covariances on collinear designs need it.
// Throws std::runtime_error naming `context` if the retry also fails.
Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const std::string& context);

// Gamma-normalization Dirichlet sampler (rate fixed at 1; it cancels).
Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, RandomStream& rng);

Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                RandomStream& rng);

// Draws W with density |W|^-((df+d+1)/2) exp(-tr(scale W^-1)/2), so
// E(W) = scale/(df-d-1) when df > d+1. Bartlett construction on the
// Wishart(df, scale^-1) draw, then inversion. Requires df > d-1.
Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale,
                                       RandomStream& rng);

}  // namespace bayesmc
