// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "bayesmc/rng.hpp"

namespace bayesmc {

SparrowData generate_sparrows(const SparrowParams& params, std::uint64_t seed) {
  if (params.n <= 0) throw std::domain_error("generate_sparrows: n must be positive");
  if (params.age_min < 1 || params.age_max < params.age_min)
    throw std::domain_error("generate_sparrows: bad age range");
  if (params.beta.size() != 3)
    throw std::domain_error("generate_sparrows: beta must have 3 components");
  if (!(params.overdispersion >= 1.0))
    throw std::domain_error("generate_sparrows: overdispersion must be >= 1");
  RandomStream rng(seed);
  SparrowData data;
  data.ages.resize(params.n);
  data.offspring.resize(params.n);
  const long span = params.age_max - params.age_min + 1;
  for (long i = 0; i < params.n; ++i) {
    const long age = params.age_min +
                     std::min<long>(span - 1, static_cast<long>(rng.uniform01() * span));
    const double a = static_cast<double>(age);
    double rate = std::exp(params.beta[0] + params.beta[1] * a + params.beta[2] * a * a);
    if (params.overdispersion > 1.0) {
      // gamma multiplier with shape rate/(w-1) makes Var = w * mean
      const double shape = rate / (params.overdispersion - 1.0);
      rate *= sample_gamma(shape, shape, rng);
    }
    data.ages[i] = a;
    data.offspring[i] = static_cast<double>(sample_poisson(rate, rng));
  }
  return data;
}

std::vector<Saber11Row> generate_saber11(const Saber11Params& params, std::uint64_t seed) {
  if (params.groups <= 0 || params.rows_per_group <= 0)
    throw std::domain_error("generate_saber11: sizes must be positive");
  if (!(params.sigma2 > 0.0) || params.tau2 < 0.0 || params.coef_spread < 0.0 ||
      params.sigma_spread < 0.0)
    throw std::domain_error("generate_saber11: bad variance parameters");
  if (params.beta.size() != 3)
    throw std::domain_error("generate_saber11: beta must have 3 components");
  RandomStream rng(seed);
  std::vector<Saber11Row> rows;
  rows.reserve(static_cast<size_t>(params.groups * params.rows_per_group));
  for (long j = 0; j < params.groups; ++j) {
    const double group_effect =
        params.tau2 > 0.0 ? sample_normal(0.0, params.tau2, rng) : 0.0;
    Eigen::VectorXd coefs = params.beta;
    if (params.coef_spread > 0.0) {
      for (int c = 0; c < 3; ++c) {
        coefs[c] += params.coef_spread * rng.standard_normal();
      }
    }
    double group_sd = std::sqrt(params.sigma2);
    if (params.sigma_spread > 0.0) {
      group_sd *= std::exp(params.sigma_spread * rng.standard_normal() -
                           0.5 * params.sigma_spread * params.sigma_spread);
    }
    char label[24];
    std::snprintf(label, sizeof(label), "D%02ld", j + 1);
    for (long i = 0; i < params.rows_per_group; ++i) {
      Saber11Row row;
      row.sex = rng.uniform01() < params.male_rate ? 1 : 0;
      row.work = rng.uniform01() < params.work0_rate ? 1 : 0;
      row.department = label;
      const double mean = coefs[0] + coefs[1] * row.sex + coefs[2] * row.work + group_effect;
      row.score = mean + group_sd * rng.standard_normal();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace bayesmc
