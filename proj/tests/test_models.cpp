// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bayesmc/models.hpp"
#include "bayesmc/rng.hpp"
#include "oracles.hpp"

using bayesmc::DirichletMultinomialModel;
using bayesmc::PoissonGlmTarget;
using bayesmc::RandomStream;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("dirichlet posterior update") {
  SUBCASE("consultation counts with the Jeffreys prior") {
    const DirichletMultinomialModel model(vec({322, 56, 24, 7, 1}),
                                          VectorXd::Constant(5, 0.5));
    const VectorXd post = bayesmc::dirichlet_posterior_update(model);
    CHECK(post == vec({322.5, 56.5, 24.5, 7.5, 1.5}));
  }
  SUBCASE("zero counts leave the prior unchanged") {
    const DirichletMultinomialModel model(vec({0, 0, 0}), vec({0.5, 1.0, 2.0}));
    CHECK(bayesmc::dirichlet_posterior_update(model) == vec({0.5, 1.0, 2.0}));
  }
  SUBCASE("componentwise addition") {
    const DirichletMultinomialModel model(vec({10, 20}), vec({1, 1}));
    CHECK(bayesmc::dirichlet_posterior_update(model) == vec({11, 21}));
  }
  SUBCASE("invariants are enforced") {
    CHECK_THROWS_AS(DirichletMultinomialModel(vec({1.5, 2.0}), vec({1.0, 1.0})),
                    std::domain_error);
    CHECK_THROWS_AS(DirichletMultinomialModel(vec({1, 2}), vec({0.0, 1.0})), std::domain_error);
    CHECK_THROWS_AS(DirichletMultinomialModel(vec({-1, 2}), vec({1.0, 1.0})), std::domain_error);
  }
}

TEST_CASE("dirichlet posterior mean") {
  SUBCASE("leading consultation share is 78.18%") {
    const VectorXd mean = bayesmc::dirichlet_posterior_mean(vec({322.5, 56.5, 24.5, 7.5, 1.5}));
    CHECK(mean[0] == doctest::Approx(0.78182).epsilon(1e-4));
  }
  SUBCASE("symmetric input gives 1/k") {
    const VectorXd mean = bayesmc::dirichlet_posterior_mean(VectorXd::Constant(4, 2.5));
    for (int j = 0; j < 4; ++j) CHECK(mean[j] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("prior/data weighted decomposition holds to 1e-12") {
    const VectorXd a = vec({1.0, 1.0, 1.0});
    const VectorXd counts = vec({3, 3, 4});
    const DirichletMultinomialModel model(counts, a);
    const VectorXd mean =
        bayesmc::dirichlet_posterior_mean(bayesmc::dirichlet_posterior_update(model));
    CHECK((mean - vec({4.0 / 13.0, 4.0 / 13.0, 5.0 / 13.0})).cwiseAbs().maxCoeff() < 1e-12);
    const double a_total = a.sum();
    const double n = counts.sum();
    const VectorXd weighted = (a_total / (a_total + n)) * (a / a_total) +
                              (n / (a_total + n)) * (counts / n);
    CHECK((mean - weighted).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("decomposition holds for random inputs") {
    RandomStream rng(71);
    for (int rep = 0; rep < 200; ++rep) {
      const int k = 2 + static_cast<int>(rng.uniform01() * 5);
      VectorXd a(k);
      VectorXd counts(k);
      for (int j = 0; j < k; ++j) {
        a[j] = 0.1 + 3.0 * rng.uniform01();
        counts[j] = std::floor(rng.uniform01() * 50.0);
      }
      if (counts.sum() == 0.0) counts[0] = 1.0;
      const DirichletMultinomialModel model(counts, a);
      const VectorXd mean =
          bayesmc::dirichlet_posterior_mean(bayesmc::dirichlet_posterior_update(model));
      const double a_total = a.sum();
      const double n = counts.sum();
      const VectorXd weighted = (a_total / (a_total + n)) * (a / a_total) +
                                (n / (a_total + n)) * (counts / n);
      REQUIRE((mean - weighted).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("poisson GLM log posterior") {
  SUBCASE("beta = 0 with a centered prior gives -n") {
    RandomStream rng(72);
    const long n = 30;
    MatrixXd design(n, 2);
    VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = rng.standard_normal();
      y[i] = static_cast<double>(bayesmc::sample_poisson(2.0, rng));
    }
    const PoissonGlmTarget target(design, y, VectorXd::Zero(2), 10.0 * MatrixXd::Identity(2, 2));
    CHECK(target.log_posterior(VectorXd::Zero(2)) ==
          doctest::Approx(-static_cast<double>(n)).epsilon(1e-12));
  }
  SUBCASE("hand-evaluated single observation") {
    MatrixXd design(1, 1);
    design << 1.0;
    const PoissonGlmTarget target(design, vec({2}), VectorXd::Zero(1),
                                  10.0 * MatrixXd::Identity(1, 1));
    CHECK(target.log_posterior(vec({0.5})) == doctest::Approx(-0.6612213).epsilon(1e-6));
  }
  SUBCASE("runaway linear predictors return -infinity") {
    MatrixXd design(1, 1);
    design << 1.0;
    const PoissonGlmTarget target(design, vec({2}), VectorXd::Zero(1),
                                  10.0 * MatrixXd::Identity(1, 1));
    CHECK(target.log_posterior(vec({800.0})) == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("poisson GLM gradient") {
  SUBCASE("matches central finite differences on random datasets") {
    RandomStream rng(73);
    double max_rel_err = 0.0;
    for (int dataset = 0; dataset < 5; ++dataset) {
      const long n = 40;
      MatrixXd design(n, 3);
      VectorXd y(n);
      for (long i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = rng.standard_normal();
        design(i, 2) = rng.standard_normal();
        y[i] = static_cast<double>(bayesmc::sample_poisson(3.0, rng));
      }
      VectorXd prior_mean(3);
      prior_mean << 0.2, -0.1, 0.3;
      const PoissonGlmTarget target(design, y, prior_mean, 5.0 * MatrixXd::Identity(3, 3));
      for (int rep = 0; rep < 20; ++rep) {
        VectorXd beta(3);
        for (int j = 0; j < 3; ++j) beta[j] = 0.6 * rng.standard_normal();
        const VectorXd grad = target.grad(beta);
        for (int j = 0; j < 3; ++j) {
          const double h = 1e-5;
          VectorXd up = beta;
          VectorXd down = beta;
          up[j] += h;
          down[j] -= h;
          const double fd = (target.log_posterior(up) - target.log_posterior(down)) / (2.0 * h);
          max_rel_err = std::max(max_rel_err,
                                 std::fabs(fd - grad[j]) / std::max(1.0, std::fabs(grad[j])));
        }
      }
    }
    CHECK(max_rel_err < 1e-5);
  }
  SUBCASE("at beta = 0 with centered prior the gradient is sum (y_i - 1) x_i") {
    MatrixXd design(3, 2);
    design << 1.0, 2.0, 1.0, -1.0, 1.0, 0.5;
    const VectorXd y = vec({3, 0, 1});
    const PoissonGlmTarget target(design, y, VectorXd::Zero(2), 10.0 * MatrixXd::Identity(2, 2));
    const VectorXd grad = target.grad(VectorXd::Zero(2));
    const VectorXd expected = design.transpose() * (y.array() - 1.0).matrix();
    CHECK((grad - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("flat-prior gradient vanishes at the maximum-likelihood estimate") {
    RandomStream rng(74);
    const long n = 60;
    MatrixXd design(n, 2);
    VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = rng.uniform01() * 2.0;
      const double rate = std::exp(0.4 + 0.5 * design(i, 1));
      y[i] = static_cast<double>(bayesmc::sample_poisson(rate, rng));
    }
    const VectorXd mle = oracles::poisson_mle(design, y);
    const PoissonGlmTarget target(design, y, VectorXd::Zero(2), 1e12 * MatrixXd::Identity(2, 2));
    CHECK(target.grad(mle).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("likelihood-only mode drops the prior term") {
    MatrixXd design(2, 2);
    design << 1.0, 0.5, 1.0, -0.5;
    const VectorXd y = vec({1, 2});
    VectorXd prior_mean(2);
    prior_mean << 0.3, -0.2;
    const MatrixXd prior_cov = 2.0 * MatrixXd::Identity(2, 2);
    const PoissonGlmTarget target(design, y, prior_mean, prior_cov);
    const VectorXd beta = vec({0.2, 0.1});
    const VectorXd diff = target.grad(beta) - target.grad(beta, bayesmc::GradKind::likelihood_only);
    const VectorXd prior_grad = prior_cov.inverse() * (prior_mean - beta);
    CHECK((diff - prior_grad).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("quadratic design construction") {
  CHECK(bayesmc::build_quadratic_design(vec({1, 2})) ==
        (MatrixXd(2, 3) << 1, 1, 1, 1, 2, 4).finished());
  CHECK(bayesmc::build_quadratic_design(vec({3})) == (MatrixXd(1, 3) << 1, 3, 9).finished());
  RandomStream rng(75);
  VectorXd ages(10);
  for (int i = 0; i < 10; ++i) ages[i] = 1.0 + std::floor(rng.uniform01() * 6.0);
  const MatrixXd design = bayesmc::build_quadratic_design(ages);
  CHECK((design.col(2) - design.col(1).cwiseProduct(design.col(1))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ordinary least squares") {
  SUBCASE("interpolates exact linear data") {
    MatrixXd design(4, 2);
    design << 1, 0, 1, 1, 1, 2, 1, 3;
    const VectorXd beta_true = vec({2.0, -0.5});
    const VectorXd y = design * beta_true;
    const auto fit = bayesmc::ols_estimates(design, y);
    CHECK((fit.beta_hat - beta_true).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fit.sigma2_hat == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("intercept-only model returns mean and n-1 variance") {
    const VectorXd y = vec({1.0, 2.0, 4.0, 9.0});
    const auto fit = bayesmc::ols_estimates(MatrixXd::Ones(4, 1), y);
    CHECK(fit.beta_hat[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fit.sigma2_hat == doctest::Approx(oracles::sample_variance(y)).epsilon(1e-12));
  }
  SUBCASE("residuals are orthogonal to the design columns") {
    RandomStream rng(76);
    MatrixXd design(50, 3);
    VectorXd y(50);
    for (int i = 0; i < 50; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = rng.standard_normal();
      design(i, 2) = rng.standard_normal();
      y[i] = 1.0 + design(i, 1) - 0.5 * design(i, 2) + rng.standard_normal();
    }
    const auto fit = bayesmc::ols_estimates(design, y);
    const VectorXd resid = y - design * fit.beta_hat;
    CHECK((design.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("rank deficiency is reported") {
    MatrixXd design(5, 2);
    design.col(0).setOnes();
    design.col(1).setOnes();
    CHECK_THROWS_WITH_AS(bayesmc::ols_estimates(design, VectorXd::Ones(5)),
                         doctest::Contains("rank"), std::runtime_error);
  }
}

TEST_CASE("unit information hyperparameters") {
  RandomStream rng(77);
  const long n = 80;
  MatrixXd design(n, 3);
  VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    design(i, 2) = rng.uniform01() < 0.3 ? 1.0 : 0.0;
    y[i] = 50.0 + 3.0 * design(i, 1) + 9.0 * design(i, 2) + 12.0 * rng.standard_normal();
  }
  SUBCASE("model 1 covariance is n sigma2 (X'X)^-1 entrywise") {
    const auto hyper = bayesmc::unit_information_config(1, design, y);
    const auto fit = bayesmc::ols_estimates(design, y);
    const MatrixXd expected =
        static_cast<double>(n) * fit.sigma2_hat * (design.transpose() * design).inverse();
    CHECK((hyper.Sigma0 - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((hyper.beta0 - fit.beta_hat).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hyper.nu0 == 1.0);
    CHECK(hyper.sigma02 == doctest::Approx(fit.sigma2_hat).epsilon(1e-14));
  }
  SUBCASE("model 3 constants are data independent") {
    const auto hyper = bayesmc::unit_information_config(3, design, y);
    CHECK(hyper.n0 == 5.0);
    CHECK(hyper.eta0 == 1.0);
    CHECK(hyper.kappa0 == 1.0);
    CHECK(hyper.alpha0 == 1.0);
    CHECK((hyper.Lambda0 - hyper.S0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("scaling y by 2 scales sigma02 by 4 and beta0 by 2") {
    const auto base = bayesmc::unit_information_config(1, design, y);
    const auto scaled = bayesmc::unit_information_config(1, design, 2.0 * y);
    CHECK(scaled.sigma02 == doctest::Approx(4.0 * base.sigma02).epsilon(1e-12));
    CHECK((scaled.beta0 - 2.0 * base.beta0).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("every model id satisfies the hyperparameter invariants") {
    for (int model_id : {1, 2, 3}) {
      const auto hyper = bayesmc::unit_information_config(model_id, design, y);
      CHECK_NOTHROW(hyper.validate(3));
    }
  }
}
