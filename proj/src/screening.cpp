#include "cganeb/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>

namespace cganeb {

std::vector<std::size_t> rank_sites(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("rank_sites: empty scores");
    for (double s : scores)
        if (std::isnan(s)) throw std::invalid_argument("rank_sites: NaN score");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });
    return order;
}

std::size_t hotspot_count(std::size_t n, double cutoff_fraction) {
    if (!(cutoff_fraction > 0.0) || !(cutoff_fraction < 1.0))
        throw std::invalid_argument("hotspot_count: cutoff must be in (0,1)");
    auto r = static_cast<std::size_t>(
        std::ceil(cutoff_fraction * static_cast<double>(n)));
    return std::min(std::max<std::size_t>(r, 1), n);
}

namespace {

void check_pair(const std::vector<double>& a, const std::vector<double>& b,
                const char* what) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": length mismatch");
    if (a.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
}

} // namespace

double fi_test(const std::vector<double>& true_lambdas,
               const std::vector<double>& scores, double cutoff_fraction) {
    check_pair(true_lambdas, scores, "fi_test");
    std::size_t r = hotspot_count(true_lambdas.size(), cutoff_fraction);
    auto truth = rank_sites(true_lambdas);
    auto proposed = rank_sites(scores);
    std::unordered_set<std::size_t> x(proposed.begin(),
                                      proposed.begin() + static_cast<long>(r));
    std::size_t missed = 0;
    for (std::size_t k = 0; k < r; ++k)
        if (!x.count(truth[k])) ++missed;
    return static_cast<double>(missed) / static_cast<double>(r);
}

double pmd_test(const std::vector<double>& true_lambdas,
                const std::vector<double>& scores, double cutoff_fraction) {
    check_pair(true_lambdas, scores, "pmd_test");
    std::size_t r = hotspot_count(true_lambdas.size(), cutoff_fraction);
    auto truth = rank_sites(true_lambdas);
    auto proposed = rank_sites(scores);
    double sum_h = 0.0, sum_x = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        sum_h += true_lambdas[truth[k]];
        sum_x += true_lambdas[proposed[k]];
    }
    double pmd = (sum_h - sum_x) / sum_h;
    // H maximizes the true-mean sum, so the shortfall cannot be negative
    if (pmd < -1e-12) throw std::logic_error("pmd_test: negative shortfall");
    return std::max(pmd, 0.0);
}

double mape_hotspots(const std::vector<double>& true_lambdas,
                     const std::vector<double>& eb_values,
                     const std::vector<double>& scores, double cutoff_fraction,
                     MapeSet set) {
    check_pair(true_lambdas, scores, "mape_hotspots");
    check_pair(true_lambdas, eb_values, "mape_hotspots");
    std::size_t r = hotspot_count(true_lambdas.size(), cutoff_fraction);
    auto order = set == MapeSet::Proposed ? rank_sites(scores) : rank_sites(true_lambdas);
    double total = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t i = order[k];
        if (!(true_lambdas[i] > 0.0))
            throw std::invalid_argument("mape_hotspots: lambda must be > 0 on evaluated sites");
        total += std::fabs(eb_values[i] - true_lambdas[i]) / true_lambdas[i];
    }
    return total / static_cast<double>(r);
}

double t_critical_975(int dof) {
    if (dof == 24) return kTCrit24;
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.975);
}

SummaryStat summarize(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("summarize: need n >= 2");
    const auto n = static_cast<double>(values.size());
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / (n - 1.0));
    double half = t_critical_975(static_cast<int>(values.size()) - 1) * sd / std::sqrt(n);
    return {mean, mean - half, mean + half, static_cast<int>(values.size())};
}

PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b, double alpha_level) {
    check_pair(a, b, "paired_t_test");
    if (a.size() < 2) throw std::invalid_argument("paired_t_test: need n >= 2");
    if (alpha_level != 0.05)
        throw std::invalid_argument("paired_t_test: only alpha = 0.05 supported");
    const auto n = static_cast<double>(a.size());
    double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double dbar = mean_a - mean_b;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        ss += (d - dbar) * (d - dbar);
    }
    double sd = std::sqrt(ss / (n - 1.0));

    PairedTestResult res{};
    if (sd == 0.0) {
        if (dbar == 0.0) return {0.0, false, 0};
        double inf = std::numeric_limits<double>::infinity();
        res.t_stat = dbar > 0.0 ? inf : -inf;
        res.significant = true;
    } else {
        res.t_stat = dbar / (sd / std::sqrt(n));
        res.significant =
            std::fabs(res.t_stat) > t_critical_975(static_cast<int>(a.size()) - 1);
    }
    res.better = res.significant ? (dbar < 0.0 ? -1 : 1) : 0;
    return res;
}

} // namespace cganeb
