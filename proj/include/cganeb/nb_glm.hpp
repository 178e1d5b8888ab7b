#ifndef CGANEB_NB_GLM_HPP
#define CGANEB_NB_GLM_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

#include "cganeb/sim.hpp"

namespace cganeb {

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NbFit {
    Eigen::VectorXd coefficients; // intercept + 4 slopes, log scale
    double dispersion_alpha_hat = 0.0;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
    std::vector<double> ll_trace; // log-likelihood after each IRLS iteration
};

Eigen::MatrixXd design_matrix(const Dataset& dataset);

double poisson_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta);

// Poisson log-link IRLS. dispersion_alpha_hat is left at 0; fit it with
// estimate_dispersion_aux_ols afterwards.
NbFit fit_poisson_glm(const Dataset& dataset, double tol = 1e-8, int max_iter = 100);

// No-constant OLS of z_i = ((Y_i - mu_i)^2 - Y_i)/mu_i on mu_i; negative
// slopes are clamped to 0.
double estimate_dispersion_aux_ols(const Dataset& dataset,
                                   const Eigen::VectorXd& fitted_mu);

double predict_mu(const NbFit& fit, const std::array<double, 4>& features);

// NB2 pmf evaluated in log space; requires alpha > 0.
double nb_pmf(long y, double mu, double alpha);
double nb_log_pmf(long y, double mu, double alpha);

} // namespace cganeb

#endif
