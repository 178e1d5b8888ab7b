#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cganeb/eb.hpp"
#include "cganeb/harness.hpp"
#include "cganeb/nb_glm.hpp"

namespace py = pybind11;
using namespace cganeb;

PYBIND11_MODULE(_core, m) {
    m.doc() = "NB-EB vs CGAN-EB crash hotspot simulation benchmark";

    py::enum_<FunctionalForm>(m, "FunctionalForm")
        .value("LOG_LINEAR", FunctionalForm::LogLinear)
        .value("LOG_NONLINEAR", FunctionalForm::LogNonlinear);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](double alpha, double beta0, FunctionalForm form,
                         std::size_t n_sites, std::uint64_t seed) {
                 return SimConfig{alpha, beta0, form, n_sites, seed};
             }),
             py::arg("alpha"), py::arg("beta0"),
             py::arg("form") = FunctionalForm::LogLinear,
             py::arg("n_sites") = 2000, py::arg("seed") = 0)
        .def_readwrite("alpha", &SimConfig::dispersion_alpha)
        .def_readwrite("beta0", &SimConfig::intercept_beta0)
        .def_readwrite("form", &SimConfig::functional_form)
        .def_readwrite("n_sites", &SimConfig::n_sites)
        .def_readwrite("seed", &SimConfig::seed);

    py::class_<Site>(m, "Site")
        .def_readonly("features", &Site::features)
        .def_readonly("true_lambda", &Site::true_lambda)
        .def_readonly("observed_count", &Site::observed_count);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("sites", &Dataset::sites)
        .def_readonly("config", &Dataset::config)
        .def("__len__", [](const Dataset& d) { return d.sites.size(); });

    m.def("simulate_dataset", &simulate_dataset, py::arg("config"));
    m.def("analytic_loglinear_mean", &analytic_loglinear_mean, py::arg("beta0"));

    py::class_<NbFit>(m, "NbFit")
        .def_property_readonly("coefficients",
                               [](const NbFit& f) {
                                   std::vector<double> c(f.coefficients.data(),
                                                         f.coefficients.data() +
                                                             f.coefficients.size());
                                   return c;
                               })
        .def_readonly("dispersion_alpha_hat", &NbFit::dispersion_alpha_hat)
        .def_readonly("converged", &NbFit::converged)
        .def_readonly("iterations", &NbFit::iterations)
        .def_readonly("log_likelihood", &NbFit::log_likelihood);

    m.def(
        "fit_nb",
        [](const Dataset& ds, double tol, int max_iter) {
            NbFit fit = fit_poisson_glm(ds, tol, max_iter);
            Eigen::VectorXd mu(ds.sites.size());
            for (std::size_t i = 0; i < ds.sites.size(); ++i)
                mu(static_cast<Eigen::Index>(i)) = predict_mu(fit, ds.sites[i].features);
            fit.dispersion_alpha_hat = estimate_dispersion_aux_ols(ds, mu);
            return fit;
        },
        py::arg("dataset"), py::arg("tol") = 1e-8, py::arg("max_iter") = 100,
        "Poisson IRLS fit plus auxiliary-OLS dispersion estimate");
    m.def("predict_mu", &predict_mu, py::arg("fit"), py::arg("features"));
    m.def("nb_pmf", &nb_pmf, py::arg("y"), py::arg("mu"), py::arg("alpha"));

    py::class_<EbEstimate>(m, "EbEstimate")
        .def_readonly("prior_mean", &EbEstimate::prior_mean)
        .def_readonly("prior_variance", &EbEstimate::prior_variance)
        .def_readonly("weight", &EbEstimate::weight)
        .def_readonly("observed", &EbEstimate::observed)
        .def_readonly("value", &EbEstimate::value);

    m.def("nb_eb", &nb_eb, py::arg("mu"), py::arg("alpha"), py::arg("y"));
    m.def("cgan_eb", &cgan_eb, py::arg("prior_mean"), py::arg("prior_variance"),
          py::arg("y"));

    py::class_<CganConfig>(m, "CganConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &CganConfig::epochs)
        .def_readwrite("batch_size", &CganConfig::batch_size)
        .def_readwrite("gen_lr", &CganConfig::gen_lr)
        .def_readwrite("disc_lr", &CganConfig::disc_lr)
        .def_readwrite("gen_decay", &CganConfig::gen_decay)
        .def_readwrite("disc_decay", &CganConfig::disc_decay)
        .def_readwrite("noise_dim", &CganConfig::noise_dim)
        .def_readwrite("seed", &CganConfig::seed);

    py::class_<CganModel>(m, "CganModel")
        .def_readonly("y_scale", &CganModel::y_scale)
        .def_readonly("loss_history", &CganModel::loss_history);

    m.def("train_cgan", &train_cgan, py::arg("dataset"), py::arg("config"));
    m.def(
        "cgan_sample",
        [](const CganModel& model, const std::array<double, 4>& features, int m_draws,
           std::uint64_t seed) {
            Rng rng(seed);
            return cgan_sample(model, features, m_draws, rng);
        },
        py::arg("model"), py::arg("features"), py::arg("m"), py::arg("seed"));
    m.def(
        "predictive_moments",
        [](const CganModel& model, const std::array<double, 4>& features, int m_draws,
           std::uint64_t seed) {
            Rng rng(seed);
            return predictive_moments(model, features, m_draws, rng);
        },
        py::arg("model"), py::arg("features"), py::arg("m"), py::arg("seed"));

    m.def("rank_sites", &rank_sites, py::arg("scores"));
    m.def("fi_test", &fi_test, py::arg("true_lambdas"), py::arg("scores"),
          py::arg("cutoff"));
    m.def("pmd_test", &pmd_test, py::arg("true_lambdas"), py::arg("scores"),
          py::arg("cutoff"));
    m.def(
        "mape_hotspots",
        [](const std::vector<double>& lam, const std::vector<double>& eb,
           const std::vector<double>& scores, double cutoff, const std::string& set) {
            return mape_hotspots(lam, eb, scores, cutoff,
                                 set == "true" ? MapeSet::True : MapeSet::Proposed);
        },
        py::arg("true_lambdas"), py::arg("eb_values"), py::arg("scores"),
        py::arg("cutoff"), py::arg("set") = "proposed");

    py::class_<SummaryStat>(m, "SummaryStat")
        .def_readonly("mean", &SummaryStat::mean)
        .def_readonly("ci_low", &SummaryStat::ci_low)
        .def_readonly("ci_high", &SummaryStat::ci_high)
        .def_readonly("n", &SummaryStat::n);

    m.def("summarize", &summarize, py::arg("values"));
    m.def(
        "paired_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            PairedTestResult r = paired_t_test(a, b);
            return py::make_tuple(r.t_stat, r.significant, r.better);
        },
        py::arg("a"), py::arg("b"),
        "Returns (t_stat, significant, better); better is -1 for a, +1 for b, 0 if n.s.");

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("id", &ExperimentSpec::id)
        .def_readwrite("alpha", &ExperimentSpec::alpha)
        .def_readwrite("beta0", &ExperimentSpec::beta0)
        .def_readwrite("n_sites", &ExperimentSpec::n_sites)
        .def_readwrite("form", &ExperimentSpec::form)
        .def_readwrite("n_train_sets", &ExperimentSpec::n_train_sets)
        .def_readwrite("n_test_sets_per_train", &ExperimentSpec::n_test_sets_per_train)
        .def_readwrite("cutoffs", &ExperimentSpec::cutoffs)
        .def_readwrite("cgan_config", &ExperimentSpec::cgan_config)
        .def_readwrite("m_samples", &ExperimentSpec::m_samples)
        .def_readwrite("master_seed", &ExperimentSpec::master_seed);

    m.def("builtin_grid", &builtin_grid);
    m.def("builtin_spec", &builtin_spec, py::arg("id"));
    m.def(
        "run_experiment",
        [](const ExperimentSpec& spec, int parallel, const std::string& out_dir) {
            ExperimentReport report = run_experiment(spec, parallel);
            if (!out_dir.empty()) emit_report(report, out_dir);
            py::dict d;
            d["experiment_id"] = report.spec.id;
            d["rows"] = report.rows.size();
            d["failed_replications"] = report.failed_replications;
            d["wall_seconds"] = report.wall_seconds;
            return d;
        },
        py::arg("spec"), py::arg("parallel") = 1, py::arg("out_dir") = "");
}
