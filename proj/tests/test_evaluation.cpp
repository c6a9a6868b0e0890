// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bayesmc/evaluation.hpp"
#include "bayesmc/rng.hpp"
#include "oracles.hpp"

using bayesmc::PointwiseLogLik;
using bayesmc::RandomStream;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double normal_loglik(const VectorXd& y, double mean, double variance) {
  const double log_two_pi = 1.8378770664093454836;
  return -0.5 * static_cast<double>(y.size()) * (log_two_pi + std::log(variance)) -
         0.5 * (y.array() - mean).square().sum() / variance;
}

}  // namespace

TEST_CASE("dic") {
  SUBCASE("point-mass posterior has zero effective parameters") {
    const MatrixXd draws = MatrixXd::Constant(200, 1, 0.7);
    const auto loglik = [](const VectorXd& theta) { return -2.0 * theta[0] * theta[0]; };
    const auto result = bayesmc::dic(loglik, draws);
    CHECK(result.p_dic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.dic == doctest::Approx(-2.0 * loglik(VectorXd::Constant(1, 0.7))).epsilon(1e-10));
  }
  SUBCASE("conjugate normal-mean model has about one effective parameter") {
    // y_i ~ N(theta, s2) with known s2; flat-ish prior; exact posterior
    // N(mean_post, var_post). One free parameter, so p_dic -> 1.
    RandomStream rng(101);
    const long n = 200;
    const double s2 = 4.0;
    VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = 1.3 + std::sqrt(s2) * rng.standard_normal();
    const double prior_var = 100.0;
    const double var_post = 1.0 / (1.0 / prior_var + n / s2);
    const double mean_post = var_post * (y.sum() / s2);
    const long b = 100000;
    MatrixXd draws(b, 1);
    for (long i = 0; i < b; ++i) draws(i, 0) = bayesmc::sample_normal(mean_post, var_post, rng);
    const auto result = bayesmc::dic(
        [&](const VectorXd& theta) { return normal_loglik(y, theta[0], s2); }, draws);
    CHECK(std::fabs(result.p_dic - 1.0) < 0.1);
  }
  SUBCASE("non-finite likelihood at the posterior mean is an error") {
    const MatrixXd draws = MatrixXd::Constant(10, 1, 1.0);
    CHECK_THROWS_AS(bayesmc::dic(
                        [](const VectorXd&) {
                          return -std::numeric_limits<double>::infinity();
                        },
                        draws),
                    std::runtime_error);
  }
}

TEST_CASE("waic") {
  SUBCASE("single draw gives zero penalty") {
    MatrixXd loglik(1, 3);
    loglik << -1.0, -2.0, -0.5;
    const auto result = bayesmc::waic(PointwiseLogLik(loglik));
    CHECK(result.p_waic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.lppd == doctest::Approx(-3.5).epsilon(1e-12));
    CHECK(result.waic == doctest::Approx(7.0).epsilon(1e-12));
  }
  SUBCASE("hand-computed two-draw example") {
    MatrixXd loglik(2, 1);
    loglik << std::log(0.2), std::log(0.4);
    const auto result = bayesmc::waic(PointwiseLogLik(loglik));
    CHECK(result.lppd == doctest::Approx(std::log(0.3)).epsilon(1e-12));
    CHECK(result.p_waic == doctest::Approx(0.117783).epsilon(1e-4));
  }
  SUBCASE("point-mass draws make waic coincide with dic") {
    RandomStream rng(102);
    VectorXd y(20);
    for (int i = 0; i < 20; ++i) y[i] = rng.standard_normal();
    const VectorXd theta0 = VectorXd::Constant(1, 0.4);
    MatrixXd pointwise(300, 20);
    for (int b = 0; b < 300; ++b) {
      for (int i = 0; i < 20; ++i) {
        pointwise(b, i) = -0.5 * (std::log(2.0 * M_PI) + (y[i] - theta0[0]) * (y[i] - theta0[0]));
      }
    }
    const auto w = bayesmc::waic(PointwiseLogLik(pointwise));
    const auto d = bayesmc::dic(
        [&](const VectorXd& theta) {
          double total = 0.0;
          for (int i = 0; i < 20; ++i) {
            total += -0.5 * (std::log(2.0 * M_PI) + (y[i] - theta[0]) * (y[i] - theta[0]));
          }
          return total;
        },
        MatrixXd::Constant(300, 1, 0.4));
    CHECK(w.p_waic == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(d.p_dic == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(w.waic == doctest::Approx(d.dic).epsilon(1e-10));
  }
  SUBCASE("p_waic is nonnegative on random matrices") {
    RandomStream rng(103);
    for (int rep = 0; rep < 2000; ++rep) {
      const int b = 2 + static_cast<int>(rng.uniform01() * 20);
      const int n = 1 + static_cast<int>(rng.uniform01() * 8);
      MatrixXd loglik(b, n);
      for (int r = 0; r < b; ++r) {
        for (int c = 0; c < n; ++c) loglik(r, c) = -8.0 * rng.uniform01();
      }
      REQUIRE(bayesmc::waic(PointwiseLogLik(loglik)).p_waic >= 0.0);
    }
  }
  SUBCASE("waic and dic are invariant to reordering draws and observations") {
    RandomStream rng(104);
    MatrixXd loglik(40, 6);
    for (int r = 0; r < 40; ++r) {
      for (int c = 0; c < 6; ++c) loglik(r, c) = -5.0 * rng.uniform01();
    }
    const auto base = bayesmc::waic(PointwiseLogLik(loglik));
    MatrixXd rows_flipped = loglik.colwise().reverse();
    MatrixXd cols_flipped = loglik.rowwise().reverse();
    const auto flipped_rows = bayesmc::waic(PointwiseLogLik(rows_flipped));
    const auto flipped_cols = bayesmc::waic(PointwiseLogLik(cols_flipped));
    CHECK(flipped_rows.waic == doctest::Approx(base.waic).epsilon(1e-12));
    CHECK(flipped_cols.waic == doctest::Approx(base.waic).epsilon(1e-12));

    MatrixXd draws(40, 1);
    for (int r = 0; r < 40; ++r) draws(r, 0) = rng.standard_normal();
    const auto loglik_fn = [](const VectorXd& theta) { return -theta[0] * theta[0]; };
    const auto d1 = bayesmc::dic(loglik_fn, draws);
    const auto d2 = bayesmc::dic(loglik_fn, draws.colwise().reverse());
    CHECK(d1.dic == doctest::Approx(d2.dic).epsilon(1e-12));
  }
  SUBCASE("a column with zero likelihood everywhere names the observation") {
    MatrixXd loglik(3, 2);
    loglik.setConstant(-1.0);
    loglik.col(1).setConstant(-std::numeric_limits<double>::infinity());
    CHECK_THROWS_WITH_AS(bayesmc::waic(PointwiseLogLik(loglik)), doctest::Contains("2"),
                         std::runtime_error);
  }
  SUBCASE("+infinity entries are rejected at construction") {
    MatrixXd loglik(1, 1);
    loglik << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(PointwiseLogLik{loglik}, std::domain_error);
  }
}

TEST_CASE("posterior predictive p-values") {
  const std::function<Eigen::VectorXd(const VectorXd&, RandomStream&)> replicate =
      [](const VectorXd& theta, RandomStream& rng) {
        VectorXd out(40);
        for (int i = 0; i < 40; ++i) out[i] = theta[0] + rng.standard_normal();
        return out;
      };
  SUBCASE("a constant statistic yields ppp = 0 under the strict inequality") {
    RandomStream rng(111);
    const MatrixXd draws = MatrixXd::Constant(150, 1, 0.0);
    const std::function<double(const VectorXd&)> constant_stat = [](const VectorXd&) {
      return 1.0;
    };
    const auto report = bayesmc::posterior_predictive_p<VectorXd>(
        draws, replicate, constant_stat, VectorXd::Zero(40), rng, "constant");
    CHECK(report.ppp == 0.0);
  }
  SUBCASE("well-specified data gives a central ppp") {
    RandomStream rng(112);
    VectorXd observed(40);
    for (int i = 0; i < 40; ++i) observed[i] = rng.standard_normal();
    // crude posterior for the mean: N(ybar, 1/n)
    MatrixXd draws(400, 1);
    for (int b = 0; b < 400; ++b) {
      draws(b, 0) = observed.mean() + rng.standard_normal() / std::sqrt(40.0);
    }
    const std::function<double(const VectorXd&)> mean_stat = [](const VectorXd& y) {
      return y.mean();
    };
    const auto report = bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                                  observed, rng, "mean");
    CHECK(report.ppp > 0.05);
    CHECK(report.ppp < 0.95);
  }
  SUBCASE("identical streams give identical ppp") {
    const MatrixXd draws = MatrixXd::Constant(120, 1, 0.2);
    const std::function<double(const VectorXd&)> mean_stat = [](const VectorXd& y) {
      return y.mean();
    };
    RandomStream r1(113, 5);
    RandomStream r2(113, 5);
    const auto a = bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                             VectorXd::Zero(40), r1, "mean");
    const auto b = bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                             VectorXd::Zero(40), r2, "mean");
    CHECK(a.ppp == b.ppp);
    CHECK(a.replicate_stats == b.replicate_stats);
  }
  SUBCASE("independent streams agree within the binomial noise bound") {
    RandomStream data_rng(115);
    VectorXd observed(40);
    for (int i = 0; i < 40; ++i) observed[i] = data_rng.standard_normal();
    MatrixXd draws(2000, 1);
    for (int b = 0; b < 2000; ++b) {
      draws(b, 0) = observed.mean() + data_rng.standard_normal() / std::sqrt(40.0);
    }
    const std::function<double(const VectorXd&)> mean_stat = [](const VectorXd& y) {
      return y.mean();
    };
    RandomStream r1(116, 1);
    RandomStream r2(116, 2);
    const double p1 = bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                                observed, r1, "mean")
                          .ppp;
    const double p2 = bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                                observed, r2, "mean")
                          .ppp;
    CHECK(std::fabs(p1 - p2) < 3.0 / std::sqrt(2000.0));
  }
  SUBCASE("fewer than 100 draws is an error") {
    RandomStream rng(114);
    const MatrixXd draws = MatrixXd::Constant(50, 1, 0.0);
    const std::function<double(const VectorXd&)> mean_stat = [](const VectorXd& y) {
      return y.mean();
    };
    CHECK_THROWS_AS(bayesmc::posterior_predictive_p<VectorXd>(draws, replicate, mean_stat,
                                                              VectorXd::Zero(40), rng, "mean"),
                    std::domain_error);
  }
}
