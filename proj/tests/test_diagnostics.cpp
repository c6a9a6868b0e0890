// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bayesmc/diagnostics.hpp"
#include "bayesmc/rng.hpp"
#include "oracles.hpp"

using bayesmc::Chain;
using bayesmc::RandomStream;
using Eigen::VectorXd;

namespace {
VectorXd iid_normal(long n, std::uint64_t seed) {
  RandomStream rng(seed);
  VectorXd x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.standard_normal();
  return x;
}

Chain chain_of(const Eigen::MatrixXd& draws) {
  Chain c;
  c.draws = draws;
  c.parameter_names.resize(static_cast<size_t>(draws.cols()));
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    c.parameter_names[static_cast<size_t>(j)] = "p" + std::to_string(j + 1);
  }
  c.accepted = c.proposed = draws.rows();
  return c;
}
}  // namespace

TEST_CASE("effective size") {
  SUBCASE("IID series is close to its length") {
    const double ess = bayesmc::effective_size(iid_normal(10000, 81));
    CHECK(ess > 9000.0);
    CHECK(ess < 11000.0);
  }
  SUBCASE("AR(1) with coefficient 0.9 has ess near B/19") {
    RandomStream rng(82);
    const long n = 100000;
    const double ess = bayesmc::effective_size(oracles::ar1_series(0.9, n, rng));
    const double expected = static_cast<double>(n) / 19.0;
    CHECK(std::fabs(ess - expected) < 0.15 * expected);
  }
  SUBCASE("alternating series exceeds B without crashing") {
    VectorXd x(1000);
    for (long i = 0; i < 1000; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(bayesmc::effective_size(x) > 1000.0);
  }
  SUBCASE("constant series raises zero variance") {
    CHECK_THROWS_WITH_AS(bayesmc::effective_size(VectorXd::Ones(100)),
                         doctest::Contains("zero variance"), std::runtime_error);
  }
  SUBCASE("short series is rejected") {
    CHECK_THROWS_AS(bayesmc::effective_size(VectorXd::Ones(5)), std::invalid_argument);
  }
}

TEST_CASE("mc standard error") {
  SUBCASE("IID N(0,1) of 10000 is about 0.01") {
    const double se = bayesmc::mc_standard_error(iid_normal(10000, 83));
    CHECK(std::fabs(se - 0.01) < 0.002);
  }
  SUBCASE("scales linearly with the series") {
    const VectorXd x = iid_normal(5000, 84);
    CHECK(bayesmc::mc_standard_error(10.0 * x) ==
          doctest::Approx(10.0 * bayesmc::mc_standard_error(x)).epsilon(1e-12));
  }
  SUBCASE("decreases with length on IID input") {
    const double se3 = bayesmc::mc_standard_error(iid_normal(1000, 85));
    const double se4 = bayesmc::mc_standard_error(iid_normal(10000, 85));
    const double se5 = bayesmc::mc_standard_error(iid_normal(100000, 85));
    CHECK(se3 > se4);
    CHECK(se4 > se5);
  }
}

TEST_CASE("split rhat") {
  SUBCASE("four converged chains sit below 1.01") {
    std::vector<VectorXd> chains;
    for (int c = 0; c < 4; ++c) chains.push_back(iid_normal(5000, 90 + c));
    CHECK(bayesmc::split_rhat(chains) < 1.01);
  }
  SUBCASE("displaced chains blow past 5") {
    std::vector<VectorXd> chains{iid_normal(2000, 94),
                                 iid_normal(2000, 95).array() + 100.0};
    CHECK(bayesmc::split_rhat(chains) > 5.0);
  }
  SUBCASE("a chain against itself stays at or above 1") {
    const VectorXd x = iid_normal(4000, 96);
    CHECK(bayesmc::split_rhat({x}) >= 1.0 - 1e-12);
  }
  SUBCASE("zero within variance errors") {
    CHECK_THROWS_AS(bayesmc::split_rhat({VectorXd::Ones(100)}), std::runtime_error);
  }
}

TEST_CASE("type-7 quantiles") {
  VectorXd x(100);
  for (int i = 0; i < 100; ++i) x[i] = static_cast<double>(i + 1);
  CHECK(bayesmc::quantile(x, 0.25) == doctest::Approx(25.75).epsilon(1e-12));
  CHECK(bayesmc::quantile(x, 0.75) == doctest::Approx(75.25).epsilon(1e-12));
}

TEST_CASE("summarize") {
  SUBCASE("degenerate chain reports sd zero and flat quantiles") {
    const Chain c = chain_of(Eigen::MatrixXd::Constant(500, 2, 3.25));
    const auto report = bayesmc::summarize(c, {0.025, 0.5, 0.975});
    for (const auto& p : report.parameters) {
      CHECK(p.sd == 0.0);
      CHECK(p.mc_se == 0.0);
      CHECK(p.rhat == 1.0);
      for (double q : p.quantiles) CHECK(q == 3.25);
    }
  }
  SUBCASE("mean and quantiles are permutation invariant, ess is not required to be") {
    RandomStream rng(97);
    Eigen::MatrixXd draws(4000, 1);
    for (int i = 0; i < 4000; ++i) draws(i, 0) = rng.standard_normal();
    Eigen::MatrixXd shuffled = draws;
    for (int i = 3999; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform01() * (i + 1));
      std::swap(shuffled(i, 0), shuffled(j, 0));
    }
    const auto a = bayesmc::summarize(chain_of(draws), {0.025, 0.5, 0.975});
    const auto b = bayesmc::summarize(chain_of(shuffled), {0.025, 0.5, 0.975});
    CHECK(a.parameters[0].mean == doctest::Approx(b.parameters[0].mean).epsilon(1e-12));
    CHECK(a.parameters[0].sd == doctest::Approx(b.parameters[0].sd).epsilon(1e-12));
    for (size_t q = 0; q < 3; ++q) {
      CHECK(a.parameters[0].quantiles[q] ==
            doctest::Approx(b.parameters[0].quantiles[q]).epsilon(1e-12));
    }
  }
  SUBCASE("affine transforms map mean/quantiles and leave ess and rhat alone") {
    RandomStream rng(98);
    Eigen::MatrixXd draws(3000, 1);
    for (int i = 0; i < 3000; ++i) draws(i, 0) = rng.standard_normal();
    const auto base = bayesmc::summarize(chain_of(draws), {0.025, 0.5, 0.975});
    const auto scaled =
        bayesmc::summarize(chain_of((2.5 * draws.array() - 4.0).matrix()), {0.025, 0.5, 0.975});
    CHECK(scaled.parameters[0].mean ==
          doctest::Approx(2.5 * base.parameters[0].mean - 4.0).epsilon(1e-9));
    CHECK(scaled.parameters[0].quantiles[2] ==
          doctest::Approx(2.5 * base.parameters[0].quantiles[2] - 4.0).epsilon(1e-9));
    CHECK(scaled.parameters[0].ess == doctest::Approx(base.parameters[0].ess).epsilon(1e-9));
    CHECK(scaled.parameters[0].rhat == doctest::Approx(base.parameters[0].rhat).epsilon(1e-9));
  }
  SUBCASE("reported ess never exceeds 1.05x the pooled draw count") {
    Eigen::MatrixXd anti(2000, 1);
    for (int i = 0; i < 2000; ++i) anti(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
    const auto report = bayesmc::summarize(chain_of(anti), {0.025, 0.5, 0.975});
    CHECK(report.parameters[0].ess <= 1.05 * 2000.0);
  }
  SUBCASE("quantile probabilities are validated") {
    const Chain c = chain_of(Eigen::MatrixXd::Random(100, 1));
    CHECK_THROWS_AS(bayesmc::summarize(c, {0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(bayesmc::summarize(c, {0.9, 0.1}), std::invalid_argument);
  }
}
