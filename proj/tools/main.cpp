#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cganeb/harness.hpp"

using namespace cganeb;

namespace {

void apply_overrides(ExperimentSpec& spec, std::uint64_t seed, bool seed_set,
                     int replications_override, int epochs, int m_samples,
                     const std::string& mape_set) {
    if (seed_set) spec.master_seed = seed;
    if (replications_override > 0) {
        spec.n_train_sets = replications_override;
        spec.n_test_sets_per_train = replications_override;
    }
    if (epochs >= 0) spec.cgan_config.epochs = epochs;
    if (m_samples > 0) spec.m_samples = m_samples;
    if (mape_set == "true") spec.mape_set = MapeSet::True;
    else if (mape_set == "proposed") spec.mape_set = MapeSet::Proposed;
}

int run_one(const ExperimentSpec& spec, const std::string& out_dir, int parallel) {
    std::cout << "running " << spec.id << " (" << spec.n_train_sets << " train x "
              << spec.n_test_sets_per_train << " test, n=" << spec.n_sites << ")"
              << std::endl;
    ExperimentReport report = run_experiment(spec, parallel);
    std::filesystem::path dir = std::filesystem::path(out_dir) / spec.id;
    emit_report(report, dir.string());
    std::cout << spec.id << ": " << report.rows.size() << " rows, "
              << report.failed_replications << " failed replications, "
              << report.wall_seconds << " s -> " << dir.string() << std::endl;
    for (const auto& e : report.errors) std::cerr << "  error: " << e << std::endl;
    return report.failed_replications == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation benchmark comparing NB-EB and CGAN-EB crash hotspot estimators"};
    app.require_subcommand(1);

    auto* grid_cmd = app.add_subcommand("grid", "list built-in experiments");

    std::string experiment = "all";
    std::string out_dir = "out";
    std::string config_file;
    std::string mape_set;
    std::uint64_t seed = 0;
    int replications_override = 0, epochs = -1, m_samples = 0, parallel = 1;
    auto* run_cmd = app.add_subcommand("run", "run experiments end to end");
    run_cmd->add_option("--experiment", experiment, "experiment id or 'all'");
    run_cmd->add_option("--out", out_dir, "output directory");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "master seed");
    run_cmd->add_option("--replications-override", replications_override,
                        "use K train sets and K test sets per train (K^2 replications)");
    run_cmd->add_option("--epochs", epochs, "override CGAN epochs");
    run_cmd->add_option("--m-samples", m_samples, "override CGAN sample count m");
    run_cmd->add_option("--parallel", parallel, "max concurrent train sets");
    run_cmd->add_option("--mape-set", mape_set, "MAPE hotspot set: proposed|true")
        ->check(CLI::IsMember({"proposed", "true"}));
    run_cmd->add_option("--config", config_file,
                        "JSON experiment spec overriding the builtin grid");

    std::string sim_experiment = "E1";
    std::string histogram_file = "histogram.svg";
    auto* sim_cmd = app.add_subcommand("simulate", "simulate one dataset and plot counts");
    sim_cmd->add_option("--experiment", sim_experiment, "experiment id");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", seed, "dataset seed");
    sim_cmd->add_option("--histogram", histogram_file, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (grid_cmd->parsed()) {
            std::cout << "id,alpha,beta0,n_sites,form\n";
            for (const auto& s : builtin_grid())
                std::cout << s.id << ',' << s.alpha << ',' << s.beta0 << ','
                          << s.n_sites << ','
                          << (s.form == FunctionalForm::LogLinear ? "log_linear"
                                                                  : "log_nonlinear")
                          << '\n';
            return 0;
        }

        if (run_cmd->parsed()) {
            std::vector<ExperimentSpec> specs;
            if (!config_file.empty()) {
                std::ifstream f(config_file);
                if (!f) throw std::runtime_error("cannot read " + config_file);
                specs.push_back(nlohmann::json::parse(f).get<ExperimentSpec>());
            } else if (experiment == "all") {
                specs = builtin_grid();
            } else {
                specs.push_back(builtin_spec(experiment));
            }
            int rc = 0;
            for (auto& spec : specs) {
                apply_overrides(spec, seed, seed_opt->count() > 0,
                                replications_override, epochs, m_samples, mape_set);
                rc = std::max(rc, run_one(spec, out_dir, parallel));
            }
            return rc;
        }

        if (sim_cmd->parsed()) {
            ExperimentSpec spec = builtin_spec(sim_experiment);
            SimConfig cfg{spec.alpha, spec.beta0, spec.form,
                          static_cast<std::size_t>(spec.n_sites),
                          sim_seed_opt->count() > 0 ? seed : spec.master_seed};
            Dataset ds = simulate_dataset(cfg);
            emit_histogram(ds, histogram_file);
            std::cout << "wrote " << histogram_file << std::endl;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
