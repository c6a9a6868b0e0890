// Apache License, Version 2.0, refer to LICENSE.txt

#include <chrono>
#include <cstdio>

#include "bayesmc/io.hpp"
#include "bayesmc/models.hpp"
#include "bayesmc/pipelines.hpp"
#include "pipeline_detail.hpp"

namespace bayesmc {

using detail::json;

ReportBundle run_consultas(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  CsvReadStats read_stats;
  const auto groups = read_consultation_counts(config.input_path, &read_stats);
  if (read_stats.rows_dropped > 0 && !config.quiet) {
    std::fprintf(stderr, "warning: dropped %ld rows with missing fields\n",
                 read_stats.rows_dropped);
  }
  const Schedule sched = config.schedule(50000, 0);
  detail::ensure_out_dir(config.out_dir);

  ReportBundle bundle;
  bundle.summary["parameters"] = json::object();
  bundle.summary["groups"] = json::object();

  for (const auto& group : groups) {
    const Eigen::Index k = static_cast<Eigen::Index>(group.candidates.size());
    Eigen::VectorXd counts(k);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < k; ++j) {
      counts[j] = group.candidates[static_cast<size_t>(j)].second;
      names.push_back(group.candidates[static_cast<size_t>(j)].first);
    }
    const DirichletMultinomialModel model(
        counts, Eigen::VectorXd::Constant(k, config.prior_alpha));
    const Eigen::VectorXd alpha_post = dirichlet_posterior_update(model);

    std::vector<Chain> chains = detail::run_chains(config.chains, [&](std::uint64_t stream) {
      return run_iid_dirichlet(alpha_post, sched, stream);
    });
    for (auto& chain : chains) chain.parameter_names = names;

    const DiagnosticsReport report = summarize(chains, detail::kDefaultProbs);
    const std::string chains_file =
        config.out_dir + "/chains_consultas_" + detail::slugify(group.group) + ".csv";
    write_chains_csv(chains, chains_file);
    bundle.files_written.push_back(chains_file);

    // summary statistics in percentage points
    const json params = detail::parameters_json(report, 100.0);
    bundle.summary["groups"][group.group] = {{"parameters", params},
                                             {"chains_file", chains_file},
                                             {"n", model.total_count()}};
    for (const auto& p : report.parameters) {
      bundle.summary["parameters"][group.group + "/" + p.name] = params.at(p.name);
    }

    if (!config.quiet) {
      std::printf("%s (n = %.0f)\n", group.group.c_str(), model.total_count());
      for (const auto& p : report.parameters) {
        // pad by codepoint count so accented names stay aligned
        long width = 0;
        for (unsigned char c : p.name) width += (c & 0xC0) != 0x80;
        const std::string pad(width < 16 ? static_cast<size_t>(16 - width) : 1, ' ');
        std::printf("  %s%smean %6.2f  95%% [%6.2f, %6.2f]\n", p.name.c_str(), pad.c_str(),
                    100.0 * p.mean, 100.0 * p.quantiles[0], 100.0 * p.quantiles[2]);
      }
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bundle.meta = {{"config", detail::config_json(config)},
                 {"schedule",
                  {{"iterations", sched.iterations},
                   {"burn_in", sched.burn_in},
                   {"thin", sched.thin},
                   {"seed", sched.seed}}},
                 {"rows_kept", read_stats.rows_kept},
                 {"rows_dropped", read_stats.rows_dropped},
                 {"build", "bayesmc 0.1.0"},
                 {"wall_seconds", wall}};

  detail::write_json_file(bundle.summary, config.out_dir + "/summary.json");
  detail::write_json_file(bundle.meta, config.out_dir + "/meta.json");
  bundle.files_written.push_back(config.out_dir + "/summary.json");
  bundle.files_written.push_back(config.out_dir + "/meta.json");

  if (config.audit) {
    for (const auto& [name, entry] : bundle.summary["groups"].items()) {
      detail::audit_parameters_block(entry.at("parameters"),
                                     entry.at("chains_file").get<std::string>(), 100.0);
    }
  }
  return bundle;
}

}  // namespace bayesmc
