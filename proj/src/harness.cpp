#include "cganeb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "cganeb/eb.hpp"
#include "cganeb/nb_glm.hpp"

namespace cganeb {

using nlohmann::json;

namespace {

const char* form_name(FunctionalForm f) {
    return f == FunctionalForm::LogLinear ? "log_linear" : "log_nonlinear";
}

FunctionalForm form_from_name(const std::string& s) {
    if (s == "log_linear") return FunctionalForm::LogLinear;
    if (s == "log_nonlinear") return FunctionalForm::LogNonlinear;
    throw std::invalid_argument("unknown functional form: " + s);
}

} // namespace

void to_json(json& j, const ExperimentSpec& spec) {
    j = json{{"id", spec.id},
             {"alpha", spec.alpha},
             {"beta0", spec.beta0},
             {"n_sites", spec.n_sites},
             {"form", form_name(spec.form)},
             {"n_train_sets", spec.n_train_sets},
             {"n_test_sets_per_train", spec.n_test_sets_per_train},
             {"cutoffs", spec.cutoffs},
             {"m_samples", spec.m_samples},
             {"master_seed", spec.master_seed},
             {"mape_set", spec.mape_set == MapeSet::Proposed ? "proposed" : "true"},
             {"cgan",
              {{"epochs", spec.cgan_config.epochs},
               {"batch_size", spec.cgan_config.batch_size},
               {"gen_lr", spec.cgan_config.gen_lr},
               {"disc_lr", spec.cgan_config.disc_lr},
               {"gen_decay", spec.cgan_config.gen_decay},
               {"disc_decay", spec.cgan_config.disc_decay},
               {"noise_dim", spec.cgan_config.noise_dim}}}};
}

void from_json(const json& j, ExperimentSpec& spec) {
    spec = ExperimentSpec{};
    j.at("id").get_to(spec.id);
    j.at("alpha").get_to(spec.alpha);
    j.at("beta0").get_to(spec.beta0);
    j.at("n_sites").get_to(spec.n_sites);
    spec.form = form_from_name(j.at("form").get<std::string>());
    if (j.contains("n_train_sets")) j.at("n_train_sets").get_to(spec.n_train_sets);
    if (j.contains("n_test_sets_per_train"))
        j.at("n_test_sets_per_train").get_to(spec.n_test_sets_per_train);
    if (j.contains("cutoffs")) j.at("cutoffs").get_to(spec.cutoffs);
    if (j.contains("m_samples")) j.at("m_samples").get_to(spec.m_samples);
    if (j.contains("master_seed")) j.at("master_seed").get_to(spec.master_seed);
    if (j.contains("mape_set"))
        spec.mape_set = j.at("mape_set").get<std::string>() == "true"
                            ? MapeSet::True
                            : MapeSet::Proposed;
    if (j.contains("cgan")) {
        const json& c = j.at("cgan");
        if (c.contains("epochs")) c.at("epochs").get_to(spec.cgan_config.epochs);
        if (c.contains("batch_size")) c.at("batch_size").get_to(spec.cgan_config.batch_size);
        if (c.contains("gen_lr")) c.at("gen_lr").get_to(spec.cgan_config.gen_lr);
        if (c.contains("disc_lr")) c.at("disc_lr").get_to(spec.cgan_config.disc_lr);
        if (c.contains("gen_decay")) c.at("gen_decay").get_to(spec.cgan_config.gen_decay);
        if (c.contains("disc_decay")) c.at("disc_decay").get_to(spec.cgan_config.disc_decay);
        if (c.contains("noise_dim")) c.at("noise_dim").get_to(spec.cgan_config.noise_dim);
    }
}

std::vector<ExperimentSpec> builtin_grid() {
    std::vector<ExperimentSpec> grid;
    const int sizes[3] = {2000, 1000, 500};
    // Table columns: (alpha, beta0) = (0.5,0.5), (0.5,2.5), (1.5,0.5), (1.5,2.5)
    const double alphas[4] = {0.5, 0.5, 1.5, 1.5};
    const double betas[4] = {0.5, 2.5, 0.5, 2.5};
    int e = 1;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 4; ++col) {
            ExperimentSpec s;
            s.id = "E" + std::to_string(e++);
            s.alpha = alphas[col];
            s.beta0 = betas[col];
            s.n_sites = sizes[row];
            s.form = FunctionalForm::LogLinear;
            grid.push_back(s);
        }
    for (int e_id = 5; e_id <= 8; ++e_id) {
        ExperimentSpec s = grid[static_cast<std::size_t>(e_id - 1)];
        s.id = "F" + std::to_string(e_id);
        s.form = FunctionalForm::LogNonlinear;
        grid.push_back(s);
    }
    return grid;
}

ExperimentSpec builtin_spec(const std::string& id) {
    for (const auto& s : builtin_grid())
        if (s.id == id) return s;
    throw std::invalid_argument("unknown experiment id: " + id);
}

namespace {

// seed-derivation tags; combined with master_seed and replication indices
enum SeedTag : std::uint64_t {
    kTrainData = 1,
    kCganTrain = 2,
    kTestData = 3,
    kCganSample = 4,
};

struct TrainOutcome {
    std::vector<ReplicationRow> rows;
    std::vector<std::string> errors;
    int failed = 0;
};

TrainOutcome run_train_set(const ExperimentSpec& spec, int t) {
    TrainOutcome out;
    NbFit fit;
    CganModel model;
    try {
        SimConfig cfg{spec.alpha, spec.beta0, spec.form,
                      static_cast<std::size_t>(spec.n_sites),
                      derive_seed(spec.master_seed, kTrainData, static_cast<std::uint64_t>(t))};
        Dataset train = simulate_dataset(cfg);

        fit = fit_poisson_glm(train);
        Eigen::VectorXd mu(train.sites.size());
        for (std::size_t i = 0; i < train.sites.size(); ++i)
            mu(static_cast<Eigen::Index>(i)) = predict_mu(fit, train.sites[i].features);
        fit.dispersion_alpha_hat = estimate_dispersion_aux_ols(train, mu);

        CganConfig cc = spec.cgan_config;
        cc.seed = derive_seed(spec.master_seed, kCganTrain, static_cast<std::uint64_t>(t));
        model = train_cgan(train, cc);
    } catch (const std::exception& e) {
        out.failed = spec.n_test_sets_per_train;
        out.errors.push_back("train_set " + std::to_string(t) + ": " + e.what());
        return out;
    }

    for (int s = 0; s < spec.n_test_sets_per_train; ++s) {
        try {
            SimConfig cfg{spec.alpha, spec.beta0, spec.form,
                          static_cast<std::size_t>(spec.n_sites),
                          derive_seed(spec.master_seed, kTestData,
                                      static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(s))};
            Dataset test = simulate_dataset(cfg);
            Rng sample_root(derive_seed(spec.master_seed, kCganSample,
                                        static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(s)));

            const std::size_t n = test.sites.size();
            std::vector<double> lambdas(n), nb_values(n), cgan_values(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Site& site = test.sites[i];
                lambdas[i] = site.true_lambda;
                double mu = predict_mu(fit, site.features);
                nb_values[i] =
                    nb_eb(mu, fit.dispersion_alpha_hat, site.observed_count).value;

                // common random numbers: every site reuses the same noise
                // stream, which stabilizes the ranking across sites
                Rng site_rng = sample_root.substream(0);
                auto [mean, var] =
                    predictive_moments(model, site.features, spec.m_samples, site_rng);
                mean = std::max(mean, kPriorMeanFloor);
                cgan_values[i] = cgan_eb(mean, var, site.observed_count).value;
            }

            for (double cutoff : spec.cutoffs) {
                out.rows.push_back({spec.id, t, s, "nb_eb", cutoff,
                                    fi_test(lambdas, nb_values, cutoff),
                                    pmd_test(lambdas, nb_values, cutoff),
                                    mape_hotspots(lambdas, nb_values, nb_values,
                                                  cutoff, spec.mape_set)});
                out.rows.push_back({spec.id, t, s, "cgan_eb", cutoff,
                                    fi_test(lambdas, cgan_values, cutoff),
                                    pmd_test(lambdas, cgan_values, cutoff),
                                    mape_hotspots(lambdas, cgan_values, cgan_values,
                                                  cutoff, spec.mape_set)});
            }
        } catch (const std::exception& e) {
            ++out.failed;
            out.errors.push_back("replication (" + std::to_string(t) + "," +
                                 std::to_string(s) + "): " + e.what());
        }
    }
    return out;
}

double metric_value(const ReplicationRow& row, const std::string& metric) {
    if (metric == "fi") return row.fi;
    if (metric == "pmd") return row.pmd;
    return row.mape;
}

} // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, int parallel) {
    auto start = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.spec = spec;
    report.planned_replications = spec.n_train_sets * spec.n_test_sets_per_train;

    std::vector<TrainOutcome> outcomes(static_cast<std::size_t>(spec.n_train_sets));
    if (parallel <= 1) {
        for (int t = 0; t < spec.n_train_sets; ++t)
            outcomes[static_cast<std::size_t>(t)] = run_train_set(spec, t);
    } else {
        int next = 0;
        while (next < spec.n_train_sets) {
            int stop = std::min(spec.n_train_sets, next + parallel);
            std::vector<std::future<TrainOutcome>> batch;
            for (int t = next; t < stop; ++t)
                batch.push_back(std::async(std::launch::async, run_train_set, spec, t));
            for (int t = next; t < stop; ++t)
                outcomes[static_cast<std::size_t>(t)] =
                    batch[static_cast<std::size_t>(t - next)].get();
            next = stop;
        }
    }

    // deterministic fold in train-set order
    for (auto& o : outcomes) {
        report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
        report.errors.insert(report.errors.end(), o.errors.begin(), o.errors.end());
        report.failed_replications += o.failed;
    }

    const std::vector<std::string> metrics = {"fi", "pmd", "mape"};
    const std::vector<std::string> methods = {"nb_eb", "cgan_eb"};
    for (double cutoff : spec.cutoffs) {
        for (const auto& metric : metrics) {
            std::map<std::string, std::vector<double>> values;
            for (const auto& row : report.rows)
                if (row.cutoff == cutoff) values[row.method].push_back(metric_value(row, metric));
            for (const auto& method : methods) {
                auto it = values.find(method);
                if (it != values.end() && it->second.size() >= 2)
                    report.summaries.push_back({spec.id, method, cutoff, metric,
                                                summarize(it->second)});
            }
            auto nb = values.find("nb_eb");
            auto cg = values.find("cgan_eb");
            if (nb != values.end() && cg != values.end() &&
                nb->second.size() == cg->second.size() && nb->second.size() >= 2) {
                PairedTestResult t = paired_t_test(nb->second, cg->second);
                std::string better;
                if (t.better < 0) better = "nb_eb";
                else if (t.better > 0) better = "cgan_eb";
                report.tests.push_back({spec.id, cutoff, metric, t.t_stat,
                                        static_cast<int>(nb->second.size()) - 1,
                                        t.significant, better});
            }
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void open_out(std::ofstream& f, const std::filesystem::path& p) {
    f.open(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

// Per-metric CI plot: one group of paired error bars per cutoff, triangle
// marker where the paired test rejects.
void emit_ci_plot(const ExperimentReport& report, const std::string& metric,
                  const std::filesystem::path& path) {
    std::vector<const SummaryRow*> nb, cg;
    for (const auto& s : report.summaries)
        if (s.metric == metric)
            (s.method == "nb_eb" ? nb : cg).push_back(&s);
    std::ofstream f;
    open_out(f, path);

    const double w = 640, h = 400, ml = 60, mr = 20, mt = 40, mb = 50;
    double lo = 0.0, hi = 1e-9;
    for (const auto* s : nb) { lo = std::min(lo, s->stat.ci_low); hi = std::max(hi, s->stat.ci_high); }
    for (const auto* s : cg) { lo = std::min(lo, s->stat.ci_low); hi = std::max(hi, s->stat.ci_high); }
    double span = hi - lo > 0 ? hi - lo : 1.0;
    lo -= 0.05 * span; hi += 0.05 * span; span = hi - lo;
    auto ypix = [&](double v) { return mt + (h - mt - mb) * (1.0 - (v - lo) / span); };

    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
      << h << "\">\n";
    f << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">"
      << report.spec.id << " " << metric << " (95% CI)</text>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << ypix(lo) << "\" x2=\"" << ml
      << "\" y2=\"" << mt << "\" stroke=\"black\"/>\n";

    const auto n_groups = report.spec.cutoffs.size();
    double group_w = (w - ml - mr) / std::max<std::size_t>(n_groups, 1);
    for (std::size_t g = 0; g < n_groups; ++g) {
        double cutoff = report.spec.cutoffs[g];
        double cx = ml + group_w * (static_cast<double>(g) + 0.5);
        f << "<text x=\"" << cx << "\" y=\"" << h - 20
          << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt(cutoff * 100)
          << "%</text>\n";
        auto draw = [&](const std::vector<const SummaryRow*>& rows, double dx,
                        const char* color) {
            for (const auto* s : rows) {
                if (s->cutoff != cutoff) continue;
                double x = cx + dx;
                f << "<line x1=\"" << x << "\" y1=\"" << ypix(s->stat.ci_low)
                  << "\" x2=\"" << x << "\" y2=\"" << ypix(s->stat.ci_high)
                  << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
                f << "<circle cx=\"" << x << "\" cy=\"" << ypix(s->stat.mean)
                  << "\" r=\"4\" fill=\"" << color << "\"/>\n";
            }
        };
        draw(nb, -12, "#1f77b4");
        draw(cg, 12, "#d62728");
        for (const auto& t : report.tests)
            if (t.metric == metric && t.cutoff == cutoff && t.significant)
                f << "<polygon points=\"" << cx - 5 << "," << mt + 12 << " " << cx + 5
                  << "," << mt + 12 << " " << cx << "," << mt + 2
                  << "\" fill=\"green\"/>\n";
    }
    f << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 12
      << "\" font-size=\"11\" fill=\"#1f77b4\">nb_eb</text>\n";
    f << "<text x=\"" << ml + 60 << "\" y=\"" << mt + 12
      << "\" font-size=\"11\" fill=\"#d62728\">cgan_eb</text>\n";
    f << "</svg>\n";
}

} // namespace

void emit_report(const ExperimentReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::filesystem::path base(dir);

    std::ofstream reps;
    open_out(reps, base / "replications.csv");
    reps << "experiment_id,train_idx,test_idx,method,cutoff,fi,pmd,mape\n";
    for (const auto& r : report.rows)
        reps << r.experiment_id << ',' << r.train_idx << ',' << r.test_idx << ','
             << r.method << ',' << fmt(r.cutoff) << ',' << fmt(r.fi) << ','
             << fmt(r.pmd) << ',' << fmt(r.mape) << '\n';

    std::ofstream sum;
    open_out(sum, base / "summary.csv");
    sum << "experiment_id,method,cutoff,metric,mean,ci_low,ci_high,n\n";
    for (const auto& s : report.summaries)
        sum << s.experiment_id << ',' << s.method << ',' << fmt(s.cutoff) << ','
            << s.metric << ',' << fmt(s.stat.mean) << ',' << fmt(s.stat.ci_low)
            << ',' << fmt(s.stat.ci_high) << ',' << s.stat.n << '\n';

    std::ofstream tst;
    open_out(tst, base / "tests.csv");
    tst << "experiment_id,cutoff,metric,t_stat,dof,significant,better_method\n";
    for (const auto& t : report.tests)
        tst << t.experiment_id << ',' << fmt(t.cutoff) << ',' << t.metric << ','
            << fmt(t.t_stat) << ',' << t.dof << ',' << (t.significant ? "true" : "false")
            << ',' << t.better_method << '\n';

    for (const char* metric : {"fi", "pmd", "mape"})
        emit_ci_plot(report, metric,
                     base / (std::string("ci_plot_") + metric + ".svg"));

    json meta{{"experiment_id", report.spec.id},
              {"wall_seconds", report.wall_seconds},
              {"planned_replications", report.planned_replications},
              {"failed_replications", report.failed_replications},
              {"errors", report.errors},
              {"spec", report.spec}};
    std::ofstream mf;
    open_out(mf, base / "metadata.json");
    mf << meta.dump(2) << "\n";
}

void emit_histogram(const Dataset& dataset, const std::string& path) {
    if (dataset.sites.empty())
        throw std::invalid_argument("emit_histogram: empty dataset");
    long max_count = 0;
    for (const auto& s : dataset.sites) max_count = std::max(max_count, s.observed_count);
    std::vector<long> bins(static_cast<std::size_t>(max_count) + 1, 0);
    for (const auto& s : dataset.sites) ++bins[static_cast<std::size_t>(s.observed_count)];
    long peak = *std::max_element(bins.begin(), bins.end());

    std::ofstream f;
    open_out(f, path);
    const double w = 640, h = 400, ml = 50, mr = 20, mt = 30, mb = 40;
    double bar_w = (w - ml - mr) / static_cast<double>(bins.size());
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
      << h << "\">\n";
    f << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << "observed crash counts (n=" << dataset.sites.size() << ")</text>\n";
    for (std::size_t k = 0; k < bins.size(); ++k) {
        double bh = (h - mt - mb) * static_cast<double>(bins[k]) / static_cast<double>(peak);
        f << "<rect x=\"" << ml + bar_w * static_cast<double>(k) + 1 << "\" y=\""
          << h - mb - bh << "\" width=\"" << std::max(bar_w - 2, 1.0) << "\" height=\""
          << bh << "\" fill=\"#1f77b4\"/>\n";
        if (bins.size() <= 30 || k % 5 == 0)
            f << "<text x=\"" << ml + bar_w * (static_cast<double>(k) + 0.5) << "\" y=\""
              << h - mb + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << k
              << "</text>\n";
    }
    f << "</svg>\n";
}

} // namespace cganeb
