// Apache License, Version 2.0, refer to LICENSE.txt

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "bayesmc/diagnostics.hpp"
#include "bayesmc/evaluation.hpp"
#include "bayesmc/io.hpp"
#include "bayesmc/models.hpp"
#include "bayesmc/pipelines.hpp"
#include "pipeline_detail.hpp"

namespace bayesmc {

using detail::json;

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

HlmData group_rows(const std::vector<Saber11Row>& rows) {
  std::vector<HlmGroup> groups;
  std::map<std::string, size_t> index;
  for (const auto& row : rows) {
    auto it = index.find(row.department);
    if (it == index.end()) {
      index.emplace(row.department, groups.size());
      groups.push_back(HlmGroup{Eigen::MatrixXd(), Eigen::VectorXd(), row.department});
    }
  }
  std::vector<std::vector<const Saber11Row*>> buckets(groups.size());
  for (const auto& row : rows) buckets[index.at(row.department)].push_back(&row);
  for (size_t g = 0; g < groups.size(); ++g) {
    const auto& bucket = buckets[g];
    groups[g].design.resize(static_cast<Eigen::Index>(bucket.size()), 3);
    groups[g].response.resize(static_cast<Eigen::Index>(bucket.size()));
    for (size_t i = 0; i < bucket.size(); ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(i);
      groups[g].design(r, 0) = 1.0;
      groups[g].design(r, 1) = bucket[i]->sex;
      groups[g].design(r, 2) = bucket[i]->work;
      groups[g].response[r] = bucket[i]->score;
    }
  }
  return HlmData(std::move(groups));
}

struct GroupSuffStats {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  Eigen::VectorXd col_sum;
  double y_sum = 0.0;
  double yty = 0.0;
  double n = 0.0;
};

std::vector<GroupSuffStats> suff_stats(const HlmData& data) {
  std::vector<GroupSuffStats> stats;
  for (const auto& g : data.groups()) {
    GroupSuffStats s;
    s.xtx = g.design.transpose() * g.design;
    s.xty = g.design.transpose() * g.response;
    s.col_sum = g.design.colwise().sum().transpose();
    s.y_sum = g.response.sum();
    s.yty = g.response.squaredNorm();
    s.n = static_cast<double>(g.design.rows());
    stats.push_back(std::move(s));
  }
  return stats;
}

double group_ssr(const GroupSuffStats& s, const Eigen::VectorXd& beta, double theta) {
  const double resid_sum = s.y_sum - s.col_sum.dot(beta);
  return s.yty - 2.0 * beta.dot(s.xty) + beta.dot(s.xtx * beta) - 2.0 * theta * resid_sum +
         s.n * theta * theta;
}

// Column offsets inside a Gibbs chain row; see hlm_parameter_names.
struct RowLayout {
  int model_id;
  Eigen::Index p;
  Eigen::Index m;
  Eigen::Index sigma2() const { return p; }
  Eigen::Index tau2() const { return p + 1; }
  Eigen::Index theta(Eigen::Index j) const { return p + 2 + j; }
  Eigen::Index nu() const { return p + 2 + m; }
  Eigen::Index sigma2_group(Eigen::Index j) const { return p + 3 + m + j; }
  Eigen::Index group_coef(Eigen::Index j) const { return p + 3 + 2 * m + j * p; }
};

// Conditional-focus log likelihood: group-level parameters are plugged in,
// not integrated out.
double loglik_row(const RowLayout& layout, const std::vector<GroupSuffStats>& stats,
                  const Eigen::VectorXd& row) {
  double total = 0.0;
  if (layout.model_id <= 2) {
    const Eigen::VectorXd beta = row.head(layout.p);
    const double sigma2 = row[layout.sigma2()];
    for (Eigen::Index j = 0; j < layout.m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const double theta = layout.model_id == 2 ? row[layout.theta(j)] : 0.0;
      total += -0.5 * s.n * (kLogTwoPi + std::log(sigma2)) -
               0.5 * group_ssr(s, beta, theta) / sigma2;
    }
  } else {
    for (Eigen::Index j = 0; j < layout.m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const Eigen::VectorXd beta_j = row.segment(layout.group_coef(j), layout.p);
      const double sigma2_j = row[layout.sigma2_group(j)];
      const double theta = row[layout.theta(j)];
      total += -0.5 * s.n * (kLogTwoPi + std::log(sigma2_j)) -
               0.5 * group_ssr(s, beta_j, theta) / sigma2_j;
    }
  }
  return total;
}

Eigen::VectorXd pointwise_row(const RowLayout& layout, const HlmData& data,
                              const Eigen::VectorXd& row) {
  Eigen::VectorXd out(data.n());
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < layout.m; ++j) {
    const auto& g = data.group(j);
    const Eigen::VectorXd beta = layout.model_id == 3
                                     ? Eigen::VectorXd(row.segment(layout.group_coef(j), layout.p))
                                     : Eigen::VectorXd(row.head(layout.p));
    const double sigma2 = layout.model_id == 3 ? row[layout.sigma2_group(j)] : row[layout.sigma2()];
    const double theta = layout.model_id >= 2 ? row[layout.theta(j)] : 0.0;
    const Eigen::VectorXd resid = g.response - g.design * beta -
                                  Eigen::VectorXd::Constant(g.response.size(), theta);
    out.segment(at, g.response.size()) =
        (-0.5 * (kLogTwoPi + std::log(sigma2)) -
         0.5 * resid.array().square() / sigma2)
            .matrix();
    at += g.response.size();
  }
  return out;
}

// Marginal focus: the group effect theta_j is integrated out, so group j
// contributes N(y_j | X_j beta, sigma2 I + tau2 1 1') evaluated by the
// rank-one Woodbury identities. Models 1 and 3-without-effects reduce to the
// conditional value.
double marginal_group_loglik(const GroupSuffStats& s, const Eigen::VectorXd& beta, double sigma2,
                             double tau2) {
  const double resid_sum = s.y_sum - s.col_sum.dot(beta);
  const double ssr = group_ssr(s, beta, 0.0);
  const double total_var = sigma2 + s.n * tau2;
  const double log_det = (s.n - 1.0) * std::log(sigma2) + std::log(total_var);
  const double quad = ssr / sigma2 - tau2 * resid_sum * resid_sum / (sigma2 * total_var);
  return -0.5 * (s.n * kLogTwoPi + log_det + quad);
}

double marginal_loglik_row(const RowLayout& layout, const std::vector<GroupSuffStats>& stats,
                           const Eigen::VectorXd& row) {
  if (layout.model_id == 1) return loglik_row(layout, stats, row);
  const double tau2 = row[layout.tau2()];
  double total = 0.0;
  for (Eigen::Index j = 0; j < layout.m; ++j) {
    const auto& s = stats[static_cast<size_t>(j)];
    const Eigen::VectorXd beta = layout.model_id == 3
                                     ? Eigen::VectorXd(row.segment(layout.group_coef(j), layout.p))
                                     : Eigen::VectorXd(row.head(layout.p));
    const double sigma2 = layout.model_id == 3 ? row[layout.sigma2_group(j)] : row[layout.sigma2()];
    total += marginal_group_loglik(s, beta, sigma2, tau2);
  }
  return total;
}

EvaluationReport evaluate_hlm(const RowLayout& layout, const HlmData& data,
                              const std::vector<GroupSuffStats>& stats,
                              const Eigen::MatrixXd& draws, LikelihoodFocus focus) {
  EvaluationReport report;
  if (focus == LikelihoodFocus::conditional) {
    const DicResult d = dic(
        [&](const Eigen::VectorXd& row) { return loglik_row(layout, stats, row); }, draws);
    report.dic = d.dic;
    report.p_dic = d.p_dic;
    WaicAccumulator acc(data.n());
    for (Eigen::Index b = 0; b < draws.rows(); ++b) {
      acc.add_draw(pointwise_row(layout, data, draws.row(b)));
    }
    const WaicResult w = acc.result();
    report.waic = w.waic;
    report.lppd = w.lppd;
    report.p_waic = w.p_waic;
    return report;
  }
  // marginal focus: per-group likelihood contributions feed both scores
  const DicResult d = dic(
      [&](const Eigen::VectorXd& row) { return marginal_loglik_row(layout, stats, row); },
      draws);
  report.dic = d.dic;
  report.p_dic = d.p_dic;
  WaicAccumulator acc(layout.m);
  Eigen::VectorXd per_group(layout.m);
  for (Eigen::Index b = 0; b < draws.rows(); ++b) {
    const Eigen::VectorXd row = draws.row(b);
    const double tau2 = layout.model_id == 1 ? 0.0 : row[layout.tau2()];
    for (Eigen::Index j = 0; j < layout.m; ++j) {
      const auto& s = stats[static_cast<size_t>(j)];
      const Eigen::VectorXd beta =
          layout.model_id == 3 ? Eigen::VectorXd(row.segment(layout.group_coef(j), layout.p))
                               : Eigen::VectorXd(row.head(layout.p));
      const double sigma2 =
          layout.model_id == 3 ? row[layout.sigma2_group(j)] : row[layout.sigma2()];
      per_group[j] = layout.model_id == 1
                         ? -0.5 * s.n * (kLogTwoPi + std::log(sigma2)) -
                               0.5 * group_ssr(s, beta, 0.0) / sigma2
                         : marginal_group_loglik(s, beta, sigma2, tau2);
    }
    acc.add_draw(per_group);
  }
  const WaicResult w = acc.result();
  report.waic = w.waic;
  report.lppd = w.lppd;
  report.p_waic = w.p_waic;
  return report;
}

// mean/sd/quantile/ess summary of sqrt(sigma2), reported as "sigma".
json sigma_summary_json(const std::vector<Chain>& chains, Eigen::Index sigma2_col) {
  std::vector<Chain> transformed;
  for (const auto& c : chains) {
    Chain t;
    t.draws = c.draws.col(sigma2_col).array().sqrt().matrix();
    t.parameter_names = {"sigma"};
    t.accepted = c.accepted;
    t.proposed = c.proposed;
    t.schedule = c.schedule;
    transformed.push_back(std::move(t));
  }
  const DiagnosticsReport r = summarize(transformed, detail::kDefaultProbs);
  return detail::parameters_json(r).at("sigma");
}

struct IntervalRow {
  std::string group;
  std::string coefficient;
  double reference;
  double mean, q025, q975, q005, q995;
  bool excludes95, excludes99;
};

std::vector<IntervalRow> group_interval_rows(const RowLayout& layout, const HlmData& data,
                                             const Eigen::MatrixXd& draws) {
  const char* coef_names[3] = {"intercept", "sex", "work"};
  std::vector<IntervalRow> rows;
  for (Eigen::Index j = 0; j < layout.m; ++j) {
    for (Eigen::Index k = 0; k < layout.p; ++k) {
      const Eigen::VectorXd column = draws.col(layout.group_coef(j) + k);
      IntervalRow row;
      row.group = data.group(j).label;
      row.coefficient = k < 3 ? coef_names[k] : "coef_" + std::to_string(k + 1);
      row.reference = k == 0 ? 50.0 : 0.0;
      row.mean = column.mean();
      row.q025 = quantile(column, 0.025);
      row.q975 = quantile(column, 0.975);
      row.q005 = quantile(column, 0.005);
      row.q995 = quantile(column, 0.995);
      row.excludes95 = row.q025 > row.reference || row.q975 < row.reference;
      row.excludes99 = row.q005 > row.reference || row.q995 < row.reference;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_intervals_csv(const std::vector<IntervalRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot open output file: " + path);
  out << "group,coefficient,reference,mean,q025,q975,q005,q995,excludes95,excludes99\n";
  for (const auto& r : rows) {
    out << r.group << "," << r.coefficient << "," << format_double(r.reference) << ","
        << format_double(r.mean) << "," << format_double(r.q025) << "," << format_double(r.q975)
        << "," << format_double(r.q005) << "," << format_double(r.q995) << "," << r.excludes95
        << "," << r.excludes99 << "\n";
  }
}

}  // namespace

ReportBundle run_saber11(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  CsvReadStats read_stats;
  const auto rows = read_saber11_observations(config.input_path, &read_stats);
  if (read_stats.rows_dropped > 0 && !config.quiet) {
    std::fprintf(stderr, "warning: dropped %ld rows with missing fields\n",
                 read_stats.rows_dropped);
  }
  const HlmData data = group_rows(rows);
  if (data.m() < 2) throw std::domain_error("run_saber11: needs at least two departments");
  const std::vector<GroupSuffStats> stats = suff_stats(data);
  const Eigen::MatrixXd pooled_design = data.pooled_design();
  const Eigen::VectorXd pooled_response = data.pooled_response();
  const Schedule sched = config.schedule(50000, 5000);
  detail::ensure_out_dir(config.out_dir);

  std::vector<int> model_ids;
  if (config.model == 0) {
    model_ids = {1, 2, 3};
  } else if (config.model >= 1 && config.model <= 3) {
    model_ids = {config.model};
  } else {
    throw std::domain_error("run_saber11: model must be 1, 2, 3, or all");
  }

  ReportBundle bundle;
  bundle.summary["models"] = json::object();
  json dic_table = json::object();

  for (int model_id : model_ids) {
    const HlmHyperparams hyper = unit_information_config(model_id, pooled_design, pooled_response);
    std::vector<Chain> chains = detail::run_chains(config.chains, [&](std::uint64_t stream) {
      switch (model_id) {
        case 1:
          return run_gibbs_hlm1(data, hyper, sched, stream);
        case 2:
          return run_gibbs_hlm2(data, hyper, sched, stream);
        default:
          return run_gibbs_hlm3(data, hyper, sched, stream, std::nullopt, config.nu_grid_max);
      }
    });
    const RowLayout layout{model_id, data.p(), data.m()};
    const DiagnosticsReport report = summarize(chains, detail::kDefaultProbs);
    const Eigen::MatrixXd draws = detail::pooled_draws(chains);
    const EvaluationReport evaluation = evaluate_hlm(layout, data, stats, draws, config.focus);

    const std::string key = "model" + std::to_string(model_id);
    const std::string chains_file = config.out_dir + "/chains_" + key + ".csv";
    write_chains_csv(chains, chains_file);
    bundle.files_written.push_back(chains_file);

    json params = detail::parameters_json(report);
    params["sigma"] = sigma_summary_json(chains, layout.sigma2());
    bundle.summary["models"][key] = {
        {"parameters", params},
        {"model",
         {{"dic", evaluation.dic},
          {"p_dic", evaluation.p_dic},
          {"waic", evaluation.waic},
          {"lppd", evaluation.lppd},
          {"p_waic", evaluation.p_waic}}},
        {"chains_file", chains_file}};
    dic_table[key] = evaluation.dic;

    if (model_id == 3) {
      const auto intervals = group_interval_rows(layout, data, draws);
      const std::string intervals_file = config.out_dir + "/intervals_model3.csv";
      write_intervals_csv(intervals, intervals_file);
      bundle.files_written.push_back(intervals_file);
      bundle.summary["group_intervals_file"] = intervals_file;
      long flagged95 = 0;
      long flagged99 = 0;
      for (const auto& r : intervals) {
        flagged95 += r.excludes95;
        flagged99 += r.excludes99;
      }
      bundle.summary["group_intervals"] = {{"excludes95", flagged95}, {"excludes99", flagged99}};
    }

    if (!config.quiet) {
      std::printf("model %d:\n", model_id);
      for (const char* name : {"beta_1", "beta_2", "beta_3"}) {
        for (const auto& p : report.parameters) {
          if (p.name == name) {
            std::printf("  %-7s mean %8.2f  95%% [%8.2f, %8.2f]\n", p.name.c_str(), p.mean,
                        p.quantiles[0], p.quantiles[2]);
          }
        }
      }
      const json& sg = bundle.summary["models"][key]["parameters"]["sigma"];
      std::printf("  sigma   mean %8.2f  95%% [%8.2f, %8.2f]\n", sg.at("mean").get<double>(),
                  sg.at("q025").get<double>(), sg.at("q975").get<double>());
      std::printf("  dic %.2f (p_dic %.2f)  waic %.2f\n", evaluation.dic, evaluation.p_dic,
                  evaluation.waic);
    }
  }

  bundle.summary["dic"] = dic_table;
  const std::string last_key = "model" + std::to_string(model_ids.back());
  bundle.summary["parameters"] = bundle.summary["models"][last_key]["parameters"];
  bundle.summary["model"] = bundle.summary["models"][last_key]["model"];

  if (!config.quiet && dic_table.size() > 1) {
    std::printf("DIC:");
    for (const auto& [key, value] : dic_table.items()) {
      std::printf("  %s %.1f", key.c_str(), value.get<double>());
    }
    std::printf("\n");
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bundle.meta = {{"config", detail::config_json(config)},
                 {"schedule",
                  {{"iterations", sched.iterations},
                   {"burn_in", sched.burn_in},
                   {"thin", sched.thin},
                   {"seed", sched.seed}}},
                 {"departments", data.m()},
                 {"rows_kept", read_stats.rows_kept},
                 {"rows_dropped", read_stats.rows_dropped},
                 {"build", "bayesmc 0.1.0"},
                 {"wall_seconds", wall}};
  detail::write_json_file(bundle.summary, config.out_dir + "/summary.json");
  detail::write_json_file(bundle.meta, config.out_dir + "/meta.json");
  bundle.files_written.push_back(config.out_dir + "/summary.json");
  bundle.files_written.push_back(config.out_dir + "/meta.json");

  if (config.audit) {
    for (int model_id : model_ids) {
      const std::string key = "model" + std::to_string(model_id);
      const json& entry = bundle.summary["models"][key];
      const std::string chains_file = entry.at("chains_file").get<std::string>();
      detail::audit_parameters_block(entry.at("parameters"), chains_file);
      const ChainsTable table = read_chains_csv(chains_file);
      const std::vector<Chain> reread = detail::chains_from_table(table);
      const RowLayout layout{model_id, data.p(), data.m()};
      detail::audit_close(entry.at("parameters").at("sigma").at("mean").get<double>(),
                          sigma_summary_json(reread, layout.sigma2()).at("mean").get<double>(),
                          key + ".sigma.mean");
      const EvaluationReport again =
          evaluate_hlm(layout, data, stats, detail::pooled_draws(reread), config.focus);
      detail::audit_close(entry.at("model").at("dic").get<double>(), again.dic, key + ".dic");
      detail::audit_close(entry.at("model").at("waic").get<double>(), again.waic, key + ".waic");
    }
  }
  return bundle;
}

}  // namespace bayesmc
