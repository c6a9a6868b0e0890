// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bayesmc/rng.hpp"
#include "oracles.hpp"

using bayesmc::RandomStream;

TEST_CASE("streams are reproducible and distinct across stream ids") {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  RandomStream c(42, 8);
  bool all_equal = true;
  bool any_equal_other_stream = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_equal_other_stream = any_equal_other_stream || (x == c.next_u64());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_other_stream);
}

TEST_CASE("uniform01 lies in [0,1) and has the right moments") {
  RandomStream rng(1);
  const long n = 1000000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("standard_normal moments match over a million draws") {
  RandomStream rng(2);
  const long n = 1000000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double z = rng.standard_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 5 MC standard errors: se(mean) = 1/sqrt(n), se(var) ~ sqrt(2/n)
  CHECK(std::fabs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("gamma(1,2) sample mean is the exponential mean 1/2") {
  RandomStream rng(3);
  const long n = 1000000;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) sum += bayesmc::sample_gamma(1.0, 2.0, rng);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));  // +-0.002 absolute
  CHECK(std::fabs(sum / n - 0.5) < 0.002);
}

TEST_CASE("gamma(3,1) sample variance is 3") {
  RandomStream rng(4);
  const long n = 1000000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double g = bayesmc::sample_gamma(3.0, 1.0, rng);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  CHECK(std::fabs(sum_sq / n - mean * mean - 3.0) < 0.05);
}

TEST_CASE("gamma(0.5,1) empirical CDF matches the quadrature oracle") {
  RandomStream rng(5);
  const long n = 1000000;
  std::vector<double> draws(n);
  for (long i = 0; i < n; ++i) draws[i] = bayesmc::sample_gamma(0.5, 1.0, rng);
  const oracles::QuadGammaCdf cdf(0.5, 1.0, 60.0);
  const double d = oracles::ks_distance(std::move(draws), [&](double x) { return cdf(x); });
  CHECK(d < 0.005);
}

TEST_CASE("gamma moments match analytic values within 5 MC standard errors") {
  // skewness-aware bound: se(mean) = sd/sqrt(n)
  for (const auto [shape, rate] : {std::pair{0.3, 2.0}, {2.5, 0.5}, {40.0, 4.0}}) {
    RandomStream rng(6);
    const long n = 1000000;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += bayesmc::sample_gamma(shape, rate, rng);
    const double mean = shape / rate;
    const double sd = std::sqrt(shape) / rate;
    CHECK(std::fabs(sum / n - mean) < 5.0 * sd / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("gamma rejects nonpositive parameters") {
  RandomStream rng(7);
  CHECK_THROWS_AS(bayesmc::sample_gamma(0.0, 1.0, rng), std::domain_error);
  CHECK_THROWS_AS(bayesmc::sample_gamma(1.0, -2.0, rng), std::domain_error);
}

TEST_CASE("inverse gamma agrees with reciprocal gamma CDF") {
  RandomStream rng(8);
  const long n = 200000;
  std::vector<double> draws(n);
  for (long i = 0; i < n; ++i) draws[i] = bayesmc::sample_inverse_gamma(3.0, 2.0, rng);
  const double d = oracles::ks_distance(
      std::move(draws), [](double x) { return oracles::inverse_gamma_cdf(x, 3.0, 2.0); });
  CHECK(d < 0.005);
}

TEST_CASE("poisson mean and variance match the rate") {
  for (const double rate : {0.8, 4.5, 35.0, 210.0}) {
    RandomStream rng(9);
    const long n = 1000000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < n; ++i) {
      const double k = static_cast<double>(bayesmc::sample_poisson(rate, rng));
      sum += k;
      sum_sq += k * k;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean - rate) < 5.0 * std::sqrt(rate / static_cast<double>(n)));
    CHECK(var == doctest::Approx(rate).epsilon(0.03));
  }
}

TEST_CASE("poisson small-mean frequencies match the pmf") {
  RandomStream rng(10);
  const double rate = 2.5;
  const long n = 400000;
  std::vector<double> freq(30, 0.0);
  for (long i = 0; i < n; ++i) {
    const long k = bayesmc::sample_poisson(rate, rng);
    if (k < 30) freq[static_cast<size_t>(k)] += 1.0 / static_cast<double>(n);
  }
  std::vector<double> pmf(30);
  for (int k = 0; k < 30; ++k) {
    pmf[static_cast<size_t>(k)] =
        std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
  }
  CHECK(oracles::tv_distance(freq, pmf) < 0.005);
}

TEST_CASE("normal and uniform samplers validate their parameters") {
  RandomStream rng(11);
  CHECK_THROWS_AS(bayesmc::sample_normal(0.0, 0.0, rng), std::domain_error);
  CHECK_THROWS_AS(bayesmc::sample_uniform(2.0, 2.0, rng), std::domain_error);
  CHECK_THROWS_AS(bayesmc::sample_poisson(0.0, rng), std::domain_error);
}
