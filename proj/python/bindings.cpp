// Apache License, Version 2.0, refer to LICENSE.txt

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bayesmc/diagnostics.hpp"
#include "bayesmc/distributions.hpp"
#include "bayesmc/evaluation.hpp"
#include "bayesmc/models.hpp"
#include "bayesmc/rng.hpp"
#include "bayesmc/samplers.hpp"
#include "bayesmc/synthetic.hpp"

namespace py = pybind11;
using namespace bayesmc;

namespace {

py::dict report_to_dict(const DiagnosticsReport& report) {
  py::dict out;
  for (const auto& p : report.parameters) {
    py::dict entry;
    entry["mean"] = p.mean;
    entry["sd"] = p.sd;
    entry["ess"] = p.ess;
    entry["mcse"] = p.mc_se;
    entry["rhat"] = p.rhat;
    py::list quantiles;
    for (double q : p.quantiles) quantiles.append(q);
    entry["quantiles"] = quantiles;
    out[py::str(p.name)] = entry;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian inference engine: conjugate analysis, Metropolis/HMC, Gibbs samplers, "
            "chain diagnostics, and model evaluation";

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RandomStream::seed)
      .def_property_readonly("stream_id", &RandomStream::stream_id)
      .def("uniform01", &RandomStream::uniform01)
      .def("standard_normal", &RandomStream::standard_normal);

  m.def("sample_gamma", &sample_gamma, py::arg("shape"), py::arg("rate"), py::arg("rng"));
  m.def("sample_poisson", &sample_poisson, py::arg("mean"), py::arg("rng"));
  m.def("sample_dirichlet", &sample_dirichlet, py::arg("alpha"), py::arg("rng"));
  m.def("sample_mvnormal", &sample_mvnormal, py::arg("mean"), py::arg("cov"), py::arg("rng"));
  m.def("sample_inverse_wishart", &sample_inverse_wishart, py::arg("df"), py::arg("scale"),
        py::arg("rng"));

  py::class_<DirichletMultinomialModel>(m, "DirichletMultinomialModel")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("counts"),
           py::arg("prior_alpha"))
      .def_readonly("counts", &DirichletMultinomialModel::counts)
      .def_readonly("prior_alpha", &DirichletMultinomialModel::prior_alpha)
      .def_property_readonly("n", &DirichletMultinomialModel::total_count);
  m.def("dirichlet_posterior_update", &dirichlet_posterior_update, py::arg("model"));
  m.def("dirichlet_posterior_mean", &dirichlet_posterior_mean, py::arg("alpha_post"));

  py::enum_<GradKind>(m, "GradKind")
      .value("posterior", GradKind::posterior)
      .value("likelihood_only", GradKind::likelihood_only);

  py::class_<PoissonGlmTarget>(m, "PoissonGlmTarget")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, Eigen::VectorXd, Eigen::MatrixXd>(),
           py::arg("design"), py::arg("y"), py::arg("prior_mean"), py::arg("prior_cov"))
      .def("log_posterior", &PoissonGlmTarget::log_posterior, py::arg("beta"))
      .def("grad", &PoissonGlmTarget::grad, py::arg("beta"),
           py::arg("kind") = GradKind::posterior)
      .def("log_likelihood", &PoissonGlmTarget::log_likelihood, py::arg("beta"))
      .def("pointwise_log_likelihood", &PoissonGlmTarget::pointwise_log_likelihood,
           py::arg("beta"));

  m.def("build_quadratic_design", &build_quadratic_design, py::arg("ages"));
  py::class_<OlsEstimates>(m, "OlsEstimates")
      .def_readonly("beta_hat", &OlsEstimates::beta_hat)
      .def_readonly("sigma2_hat", &OlsEstimates::sigma2_hat);
  m.def("ols_estimates", &ols_estimates, py::arg("design"), py::arg("y"));

  py::class_<HlmGroup>(m, "HlmGroup")
      .def(py::init([](Eigen::MatrixXd design, Eigen::VectorXd response, std::string label) {
             return HlmGroup{std::move(design), std::move(response), std::move(label)};
           }),
           py::arg("design"), py::arg("response"), py::arg("label") = "");
  py::class_<HlmData>(m, "HlmData")
      .def(py::init<std::vector<HlmGroup>>(), py::arg("groups"))
      .def_property_readonly("m", &HlmData::m)
      .def_property_readonly("p", &HlmData::p)
      .def_property_readonly("n", &HlmData::n)
      .def("pooled_design", &HlmData::pooled_design)
      .def("pooled_response", &HlmData::pooled_response);

  py::class_<HlmHyperparams>(m, "HlmHyperparams")
      .def_readonly("model_id", &HlmHyperparams::model_id)
      .def_readonly("beta0", &HlmHyperparams::beta0)
      .def_readonly("Sigma0", &HlmHyperparams::Sigma0)
      .def_readonly("nu0", &HlmHyperparams::nu0)
      .def_readonly("sigma02", &HlmHyperparams::sigma02)
      .def_readonly("eta0", &HlmHyperparams::eta0)
      .def_readonly("tau02", &HlmHyperparams::tau02)
      .def_readonly("mu0", &HlmHyperparams::mu0)
      .def_readonly("Lambda0", &HlmHyperparams::Lambda0)
      .def_readonly("n0", &HlmHyperparams::n0)
      .def_readonly("S0", &HlmHyperparams::S0)
      .def_readonly("kappa0", &HlmHyperparams::kappa0)
      .def_readonly("alpha0", &HlmHyperparams::alpha0)
      .def_readonly("beta0_rate", &HlmHyperparams::beta0_rate);
  m.def("unit_information_config", &unit_information_config, py::arg("model_id"),
        py::arg("design"), py::arg("y"));

  py::class_<Schedule>(m, "Schedule")
      .def(py::init([](long iterations, long burn_in, long thin, std::uint64_t seed) {
             Schedule s{iterations, burn_in, thin, seed};
             s.validate();
             return s;
           }),
           py::arg("iterations"), py::arg("burn_in") = 0, py::arg("thin") = 1,
           py::arg("seed") = 0)
      .def_readonly("iterations", &Schedule::iterations)
      .def_readonly("burn_in", &Schedule::burn_in)
      .def_readonly("thin", &Schedule::thin)
      .def_readonly("seed", &Schedule::seed)
      .def("retained", &Schedule::retained);

  py::class_<Chain>(m, "Chain")
      .def_readonly("draws", &Chain::draws)
      .def_readonly("parameter_names", &Chain::parameter_names)
      .def_readonly("accepted", &Chain::accepted)
      .def_readonly("proposed", &Chain::proposed)
      .def_readonly("nonfinite_rejects", &Chain::nonfinite_rejects)
      .def("acceptance_rate", &Chain::acceptance_rate);

  py::class_<MetropolisConfig>(m, "MetropolisConfig")
      .def(py::init([](Eigen::MatrixXd proposal_cov) {
             return MetropolisConfig{std::move(proposal_cov)};
           }),
           py::arg("proposal_cov"));
  m.def("scaled_proposal", &scaled_proposal, py::arg("c"), py::arg("design"));

  py::enum_<HmcIntegrator>(m, "HmcIntegrator")
      .value("canonical_leapfrog", HmcIntegrator::canonical_leapfrog)
      .value("paper_literal", HmcIntegrator::paper_literal);
  py::class_<HmcConfig>(m, "HmcConfig")
      .def(py::init([](long leapfrog_steps, double step_size, Eigen::VectorXd mass_diag,
                       HmcIntegrator integrator) {
             HmcConfig c;
             c.leapfrog_steps = leapfrog_steps;
             c.step_size = step_size;
             c.mass_diag = std::move(mass_diag);
             c.integrator = integrator;
             return c;
           }),
           py::arg("leapfrog_steps"), py::arg("step_size"),
           py::arg("mass_diag") = Eigen::VectorXd(),
           py::arg("integrator") = HmcIntegrator::canonical_leapfrog);

  m.def("run_iid_dirichlet", &run_iid_dirichlet, py::arg("alpha_post"), py::arg("schedule"),
        py::arg("stream_id") = 0);
  m.def("run_metropolis", &run_metropolis, py::arg("target"), py::arg("config"), py::arg("init"),
        py::arg("schedule"), py::arg("stream_id") = 0);
  m.def("run_hmc", &run_hmc, py::arg("target"), py::arg("gradient"), py::arg("config"),
        py::arg("init"), py::arg("schedule"), py::arg("stream_id") = 0);
  m.def("run_gibbs_hlm1", &run_gibbs_hlm1, py::arg("data"), py::arg("hyper"),
        py::arg("schedule"), py::arg("stream_id") = 0, py::arg("init") = std::nullopt);
  m.def("run_gibbs_hlm2", &run_gibbs_hlm2, py::arg("data"), py::arg("hyper"),
        py::arg("schedule"), py::arg("stream_id") = 0, py::arg("init") = std::nullopt);
  m.def("run_gibbs_hlm3", &run_gibbs_hlm3, py::arg("data"), py::arg("hyper"),
        py::arg("schedule"), py::arg("stream_id") = 0, py::arg("init") = std::nullopt,
        py::arg("nu_grid_max") = 100);
  m.def("sample_nu_conditional", &sample_nu_conditional, py::arg("sigma2_groups"),
        py::arg("sigma2"), py::arg("kappa0"), py::arg("grid"), py::arg("rng"));
  m.def("hlm_parameter_names", &hlm_parameter_names, py::arg("model_id"), py::arg("p"),
        py::arg("m"));

  m.def("effective_size", &effective_size, py::arg("series"));
  m.def("mc_standard_error", &mc_standard_error, py::arg("series"));
  m.def("split_rhat", &split_rhat, py::arg("chains"));
  m.def("quantile", &quantile, py::arg("series"), py::arg("prob"));
  m.def(
      "summarize",
      [](const std::vector<Chain>& chains, const std::vector<double>& probs) {
        return report_to_dict(summarize(chains, probs));
      },
      py::arg("chains"), py::arg("probs") = std::vector<double>{0.025, 0.5, 0.975});

  m.def(
      "dic",
      [](const std::function<double(const Eigen::VectorXd&)>& loglik_at,
         const Eigen::MatrixXd& draws) {
        const auto result = dic(loglik_at, draws);
        return py::make_tuple(result.dic, result.p_dic);
      },
      py::arg("loglik_at"), py::arg("draws"));
  m.def(
      "waic",
      [](const Eigen::MatrixXd& pointwise) {
        const auto result = waic(PointwiseLogLik(pointwise));
        return py::make_tuple(result.waic, result.lppd, result.p_waic);
      },
      py::arg("pointwise_loglik"));
  m.def(
      "posterior_predictive_p",
      [](const Eigen::MatrixXd& draws,
         const std::function<Eigen::VectorXd(const Eigen::VectorXd&, RandomStream&)>& replicate,
         const std::function<double(const Eigen::VectorXd&)>& statistic,
         const Eigen::VectorXd& observed, RandomStream& rng, const std::string& name) {
        const auto report =
            posterior_predictive_p<Eigen::VectorXd>(draws, replicate, statistic, observed, rng,
                                                    name);
        py::dict out;
        out["statistic"] = report.statistic;
        out["observed"] = report.observed;
        out["replicate_stats"] = report.replicate_stats;
        out["ppp"] = report.ppp;
        return out;
      },
      py::arg("draws"), py::arg("replicate"), py::arg("statistic"), py::arg("observed"),
      py::arg("rng"), py::arg("name") = "statistic");

  py::class_<SparrowParams>(m, "SparrowParams")
      .def(py::init<>())
      .def_readwrite("n", &SparrowParams::n)
      .def_readwrite("beta", &SparrowParams::beta)
      .def_readwrite("overdispersion", &SparrowParams::overdispersion);
  py::class_<SparrowData>(m, "SparrowData")
      .def_readonly("ages", &SparrowData::ages)
      .def_readonly("offspring", &SparrowData::offspring);
  m.def("generate_sparrows", &generate_sparrows, py::arg("params"), py::arg("seed"));

  py::class_<Saber11Params>(m, "Saber11Params")
      .def(py::init<>())
      .def_readwrite("groups", &Saber11Params::groups)
      .def_readwrite("rows_per_group", &Saber11Params::rows_per_group)
      .def_readwrite("beta", &Saber11Params::beta)
      .def_readwrite("tau2", &Saber11Params::tau2)
      .def_readwrite("sigma2", &Saber11Params::sigma2)
      .def_readwrite("coef_spread", &Saber11Params::coef_spread)
      .def_readwrite("sigma_spread", &Saber11Params::sigma_spread);
  py::class_<Saber11Row>(m, "Saber11Row")
      .def_readonly("score", &Saber11Row::score)
      .def_readonly("sex", &Saber11Row::sex)
      .def_readonly("work", &Saber11Row::work)
      .def_readonly("department", &Saber11Row::department);
  m.def("generate_saber11", &generate_saber11, py::arg("params"), py::arg("seed"));

  m.attr("__version__") = "0.1.0";
}
