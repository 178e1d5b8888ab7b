#ifndef CGANEB_SCREENING_HPP
#define CGANEB_SCREENING_HPP

#include <string>
#include <vector>

namespace cganeb {

// t-critical pinned for the paper's 25-replication protocol (95%, DOF 24).
inline constexpr double kTCrit24 = 2.0639;

struct SummaryStat {
    double mean;
    double ci_low;
    double ci_high;
    int n;
};

struct PairedTestResult {
    double t_stat;
    bool significant;
    int better; // -1: a better, +1: b better, 0: not significant
};

// Indices in descending score order; ties broken by ascending index.
std::vector<std::size_t> rank_sites(const std::vector<double>& scores);

// R = ceil(fraction * n)
std::size_t hotspot_count(std::size_t n, double cutoff_fraction);

// fraction of true top-R sites missing from the method's top-R set
double fi_test(const std::vector<double>& true_lambdas,
               const std::vector<double>& scores, double cutoff_fraction);

// normalized true-mean shortfall of the proposed hotspot set
double pmd_test(const std::vector<double>& true_lambdas,
                const std::vector<double>& scores, double cutoff_fraction);

enum class MapeSet { Proposed, True };

// mean |EB - lambda|/lambda over the top-R set (method-proposed by default)
double mape_hotspots(const std::vector<double>& true_lambdas,
                     const std::vector<double>& eb_values,
                     const std::vector<double>& scores, double cutoff_fraction,
                     MapeSet set = MapeSet::Proposed);

// mean and 95% t-interval; DOF 24 uses the pinned critical value
SummaryStat summarize(const std::vector<double>& values);

double t_critical_975(int dof);

// two-sided paired t-test on a - b
PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b,
                               double alpha_level = 0.05);

} // namespace cganeb

#endif
