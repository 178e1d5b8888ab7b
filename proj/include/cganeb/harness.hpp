#ifndef CGANEB_HARNESS_HPP
#define CGANEB_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cganeb/cgan.hpp"
#include "cganeb/screening.hpp"
#include "cganeb/sim.hpp"

namespace cganeb {

struct ExperimentSpec {
    std::string id;
    double alpha = 0.5;
    double beta0 = 0.5;
    int n_sites = 2000;
    FunctionalForm form = FunctionalForm::LogLinear;
    int n_train_sets = 5;
    int n_test_sets_per_train = 5;
    std::vector<double> cutoffs = {0.025, 0.05, 0.075, 0.10};
    CganConfig cgan_config;
    int m_samples = 500;
    std::uint64_t master_seed = 42;
    MapeSet mape_set = MapeSet::Proposed;
};

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
void from_json(const nlohmann::json& j, ExperimentSpec& spec);

struct ReplicationRow {
    std::string experiment_id;
    int train_idx;
    int test_idx;
    std::string method; // "nb_eb" or "cgan_eb"
    double cutoff;
    double fi;
    double pmd;
    double mape;
};

struct SummaryRow {
    std::string experiment_id;
    std::string method;
    double cutoff;
    std::string metric; // "fi", "pmd", "mape"
    SummaryStat stat;
};

struct TestRow {
    std::string experiment_id;
    double cutoff;
    std::string metric;
    double t_stat;
    int dof;
    bool significant;
    std::string better_method; // empty when not significant
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<ReplicationRow> rows;
    std::vector<SummaryRow> summaries;
    std::vector<TestRow> tests;
    int planned_replications = 0;
    int failed_replications = 0;
    std::vector<std::string> errors;
    double wall_seconds = 0.0;
};

// Table-1 grid E1-E12 plus the log-nonlinear F5-F8 clones of E5-E8.
std::vector<ExperimentSpec> builtin_grid();

// Find a builtin spec by id ("E1".."E12", "F5".."F8").
ExperimentSpec builtin_spec(const std::string& id);

// Full protocol for one experiment: per train set fit NB + train CGAN, score
// every test set with both EB methods, evaluate all cutoffs, aggregate.
// `parallel` caps the number of train sets processed concurrently.
ExperimentReport run_experiment(const ExperimentSpec& spec, int parallel = 1);

// replications.csv / summary.csv / tests.csv / ci_plot_{metric}.svg under dir;
// timings go to metadata.json so the CSVs stay byte-stable.
void emit_report(const ExperimentReport& report, const std::string& dir);

// SVG histogram of observed counts, integer bins from 0 to max.
void emit_histogram(const Dataset& dataset, const std::string& path);

} // namespace cganeb

#endif
