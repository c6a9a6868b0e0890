// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace bayesmc {

// Stand-in for the sparrow offspring data: ages uniform on an integer range,
// counts Poisson with a quadratic log rate. overdispersion = w > 1 mixes the
// rate with a Gamma multiplier so that Var(y) = w * E(y).
struct SparrowParams {
  long n = 52;
  Eigen::VectorXd beta = (Eigen::VectorXd(3) << 0.22, 0.65, -0.13).finished();
  double overdispersion = 1.0;
  long age_min = 1;
  long age_max = 6;
};

struct SparrowData {
  Eigen::VectorXd ages;
  Eigen::VectorXd offspring;
};

SparrowData generate_sparrows(const SparrowParams& params, std::uint64_t seed);

// Stand-in for the standardized-test data: group effects Normal(0, tau2),
// scores Normal around a linear predictor in (1, sex, work). coef_spread and
// sigma_spread control per-group coefficient and residual-sd heterogeneity;
// zero for both gives the homogeneous single-line model.
struct Saber11Params {
  long groups = 25;
  long rows_per_group = 120;
  Eigen::VectorXd beta = (Eigen::VectorXd(3) << 50.0, 3.0, 9.0).finished();
  double tau2 = 25.0;
  double sigma2 = 160.0;
  double coef_spread = 1.5;
  double sigma_spread = 0.3;
  double male_rate = 0.5;
  double work0_rate = 0.3;
};

struct Saber11Row {
  double score;
  int sex;
  int work;
  std::string department;
};

std::vector<Saber11Row> generate_saber11(const Saber11Params& params, std::uint64_t seed);

}  // namespace bayesmc
