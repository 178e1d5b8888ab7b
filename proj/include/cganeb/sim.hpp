#ifndef CGANEB_SIM_HPP
#define CGANEB_SIM_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "cganeb/rng.hpp"

namespace cganeb {

enum class FunctionalForm { LogLinear, LogNonlinear };

struct SimConfig {
    double dispersion_alpha = 0.5; // alpha > 0
    double intercept_beta0 = 0.5;
    FunctionalForm functional_form = FunctionalForm::LogLinear;
    std::size_t n_sites = 2000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Site {
    std::array<double, 4> features; // each in [0,1)
    double true_lambda;             // > 0
    long observed_count;            // >= 0
};

struct Dataset {
    std::vector<Site> sites;
    SimConfig config;
};

// Four independent uniform [0,1) draws.
std::array<double, 4> sample_uniform_features(Rng& rng);

// lambda = exp(beta0 + covariate terms + epsilon) under the chosen form.
double mean_function(const std::array<double, 4>& features, double beta0,
                     double epsilon, FunctionalForm form);

// exp(epsilon) ~ gamma with mean 1 and variance alpha (shape 1/alpha, scale alpha).
double sample_heterogeneity(double alpha, Rng& rng);

// Per-site draw order on substream i: features (4 uniforms), exp(eps), Poisson.
Dataset simulate_dataset(const SimConfig& config);

// Analytic E[Y] for the LogLinear form with uniform features and mean-1 gamma mix:
// e^beta0 * prod over a in {0.05, -0.05, 1, -1} of (e^a - 1)/a.
double analytic_loglinear_mean(double beta0);

} // namespace cganeb

#endif
