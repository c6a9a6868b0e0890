// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "bayesmc/diagnostics.hpp"
#include "bayesmc/io.hpp"
#include "bayesmc/pipelines.hpp"
#include "bayesmc/samplers.hpp"

namespace bayesmc::detail {

using nlohmann::json;

inline const std::vector<double> kDefaultProbs{0.025, 0.5, 0.975};

std::string slugify(const std::string& name);

// Runs one sampler closure per chain (stream ids 0..n-1) concurrently.
std::vector<Chain> run_chains(int n_chains, const std::function<Chain(std::uint64_t)>& runner);

Eigen::MatrixXd pooled_draws(const std::vector<Chain>& chains);

// parameters -> {mean, sd, q025, q50, q975, ess, mcse, rhat}; `scale`
// multiplies location/scale statistics (percentage-point reporting).
json parameters_json(const DiagnosticsReport& report, double scale = 1.0);

json config_json(const RunConfig& config);

void write_json_file(const json& value, const std::string& path);

void ensure_out_dir(const std::string& out_dir);

// Rebuilds per-chain Chain objects from a chains table on disk.
std::vector<Chain> chains_from_table(const ChainsTable& table);

// Compares every numeric field of `expected` ("parameters" block) against a
// fresh summary of the chains table; throws OutputError on mismatch.
void audit_parameters_block(const json& expected, const std::string& chains_path,
                            double scale = 1.0);

void audit_close(double expected, double actual, const std::string& what);

}  // namespace bayesmc::detail
