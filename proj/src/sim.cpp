#include "cganeb/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace cganeb {

void SimConfig::validate() const {
    if (!(dispersion_alpha > 0.0))
        throw std::invalid_argument("SimConfig: dispersion_alpha must be > 0");
    if (n_sites < 1)
        throw std::invalid_argument("SimConfig: n_sites must be >= 1");
}

std::array<double, 4> sample_uniform_features(Rng& rng) {
    std::array<double, 4> x;
    for (double& v : x) v = rng.uniform();
    return x;
}

double mean_function(const std::array<double, 4>& x, double beta0,
                     double epsilon, FunctionalForm form) {
    double lin;
    if (form == FunctionalForm::LogLinear) {
        lin = 0.05 * x[0] - 0.05 * x[1] + x[2] - x[3];
    } else {
        lin = 0.05 * std::sqrt(x[0]) - 0.05 * std::sqrt(x[1]) + x[2] * x[2] -
              x[0] * x[3];
    }
    return std::exp(beta0 + lin + epsilon);
}

double sample_heterogeneity(double alpha, Rng& rng) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("sample_heterogeneity: alpha must be > 0");
    return rng.gamma(1.0 / alpha, alpha);
}

Dataset simulate_dataset(const SimConfig& config) {
    config.validate();
    Dataset ds;
    ds.config = config;
    ds.sites.resize(config.n_sites);
    Rng root(config.seed);
    for (std::size_t i = 0; i < config.n_sites; ++i) {
        Rng rng = root.substream(i);
        Site& s = ds.sites[i];
        s.features = sample_uniform_features(rng);
        double g = sample_heterogeneity(config.dispersion_alpha, rng);
        s.true_lambda = mean_function(s.features, config.intercept_beta0,
                                      std::log(g), config.functional_form);
        s.observed_count = rng.poisson(s.true_lambda);
    }
    return ds;
}

double analytic_loglinear_mean(double beta0) {
    double prod = 1.0;
    for (double a : {0.05, -0.05, 1.0, -1.0})
        prod *= (std::exp(a) - 1.0) / a;
    return std::exp(beta0) * prod;
}

} // namespace cganeb
