// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/pipelines.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>

#include "bayesmc/io.hpp"
#include "pipeline_detail.hpp"

namespace bayesmc {

Schedule RunConfig::schedule(long default_iters, long default_burn_in) const {
  const long post = iters >= 0 ? iters : default_iters;
  const long warm = burn_in >= 0 ? burn_in : default_burn_in;
  Schedule s;
  s.iterations = warm + post;
  s.burn_in = warm;
  s.thin = thin;
  s.seed = seed;
  s.validate();
  return s;
}

void generate_synthetic(const SynthConfig& config) {
  if (config.kind == "sparrows") {
    write_sparrow_csv(generate_sparrows(config.sparrows, config.seed), config.out_path);
  } else if (config.kind == "saber11") {
    write_saber11_csv(generate_saber11(config.saber11, config.seed), config.out_path);
  } else {
    throw std::domain_error("generate_synthetic: kind must be 'sparrows' or 'saber11'");
  }
}

namespace detail {

std::string slugify(const std::string& name) {
  std::string slug;
  bool last_sep = true;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      slug.push_back(static_cast<char>(std::tolower(c)));
      last_sep = false;
    } else if (!last_sep) {
      slug.push_back('_');
      last_sep = true;
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug.empty() ? "group" : slug;
}

std::vector<Chain> run_chains(int n_chains, const std::function<Chain(std::uint64_t)>& runner) {
  std::vector<std::future<Chain>> futures;
  futures.reserve(static_cast<size_t>(n_chains));
  for (int c = 0; c < n_chains; ++c) {
    futures.push_back(std::async(std::launch::async, runner, static_cast<std::uint64_t>(c)));
  }
  std::vector<Chain> chains;
  chains.reserve(static_cast<size_t>(n_chains));
  for (auto& f : futures) chains.push_back(f.get());
  return chains;
}

Eigen::MatrixXd pooled_draws(const std::vector<Chain>& chains) {
  long total = 0;
  for (const auto& c : chains) total += c.draws.rows();
  Eigen::MatrixXd pooled(total, chains.front().draws.cols());
  long at = 0;
  for (const auto& c : chains) {
    pooled.middleRows(at, c.draws.rows()) = c.draws;
    at += c.draws.rows();
  }
  return pooled;
}

json parameters_json(const DiagnosticsReport& report, double scale) {
  json params = json::object();
  for (const auto& p : report.parameters) {
    params[p.name] = {
        {"mean", scale * p.mean},        {"sd", scale * p.sd},
        {"q025", scale * p.quantiles[0]}, {"q50", scale * p.quantiles[1]},
        {"q975", scale * p.quantiles[2]}, {"ess", p.ess},
        {"mcse", scale * p.mc_se},       {"rhat", p.rhat},
    };
  }
  return params;
}

json config_json(const RunConfig& config) {
  return json{{"subcommand", config.subcommand},
              {"input", config.input_path},
              {"out", config.out_dir},
              {"seed", config.seed},
              {"chains", config.chains},
              {"iters", config.iters},
              {"burnin", config.burn_in},
              {"thin", config.thin},
              {"c", config.proposal_scale},
              {"L", config.leapfrog_steps},
              {"eps", config.step_size},
              {"nu_max", config.nu_grid_max},
              {"model", config.model},
              {"sampler", config.sampler},
              {"integrator", config.integrator},
              {"alpha", config.prior_alpha},
              {"focus", config.focus == LikelihoodFocus::marginal ? "marginal" : "conditional"},
              {"audit", config.audit}};
}

void write_json_file(const json& value, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot open output file: " + path);
  out << value.dump(2) << "\n";
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw OutputError("cannot create output directory: " + out_dir);
}

std::vector<Chain> chains_from_table(const ChainsTable& table) {
  if (table.chain_index.empty()) throw InputError("chains table has no rows");
  const int n_chains = *std::max_element(table.chain_index.begin(), table.chain_index.end());
  std::vector<Chain> chains(static_cast<size_t>(n_chains));
  std::vector<std::vector<long>> row_ids(static_cast<size_t>(n_chains));
  for (size_t r = 0; r < table.chain_index.size(); ++r) {
    row_ids[static_cast<size_t>(table.chain_index[r] - 1)].push_back(static_cast<long>(r));
  }
  for (int c = 0; c < n_chains; ++c) {
    Chain& chain = chains[static_cast<size_t>(c)];
    chain.parameter_names = table.parameter_names;
    chain.stream_id = static_cast<std::uint64_t>(c);
    const auto& ids = row_ids[static_cast<size_t>(c)];
    chain.draws.resize(static_cast<Eigen::Index>(ids.size()), table.values.cols());
    for (size_t r = 0; r < ids.size(); ++r) {
      chain.draws.row(static_cast<Eigen::Index>(r)) = table.values.row(ids[r]);
    }
  }
  return chains;
}

void audit_close(double expected, double actual, const std::string& what) {
  if (std::isnan(expected) && std::isnan(actual)) return;
  const double tol = 1e-9 * std::max(1.0, std::fabs(expected));
  if (!(std::fabs(expected - actual) <= tol)) {
    throw OutputError("audit mismatch for " + what + ": summary " + format_double(expected) +
                      " vs recomputed " + format_double(actual));
  }
}

void audit_parameters_block(const json& expected, const std::string& chains_path, double scale) {
  const ChainsTable table = read_chains_csv(chains_path);
  const std::vector<Chain> chains = chains_from_table(table);
  const DiagnosticsReport report = summarize(chains, kDefaultProbs);
  for (const auto& p : report.parameters) {
    if (!expected.contains(p.name)) continue;
    const json& e = expected.at(p.name);
    audit_close(e.at("mean").get<double>(), scale * p.mean, p.name + ".mean");
    audit_close(e.at("sd").get<double>(), scale * p.sd, p.name + ".sd");
    audit_close(e.at("q025").get<double>(), scale * p.quantiles[0], p.name + ".q025");
    audit_close(e.at("q50").get<double>(), scale * p.quantiles[1], p.name + ".q50");
    audit_close(e.at("q975").get<double>(), scale * p.quantiles[2], p.name + ".q975");
    audit_close(e.at("ess").get<double>(), p.ess, p.name + ".ess");
    audit_close(e.at("mcse").get<double>(), scale * p.mc_se, p.name + ".mcse");
    audit_close(e.at("rhat").get<double>(), p.rhat, p.name + ".rhat");
  }
}

}  // namespace detail

}  // namespace bayesmc
