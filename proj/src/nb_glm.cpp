#include "cganeb/nb_glm.hpp"

#include <cmath>

namespace cganeb {

Eigen::MatrixXd design_matrix(const Dataset& dataset) {
    const auto n = static_cast<Eigen::Index>(dataset.sites.size());
    Eigen::MatrixXd X(n, 5);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 0; j < 4; ++j) X(i, j + 1) = dataset.sites[i].features[j];
    }
    return X;
}

double poisson_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        ll += y(i) * eta(i) - std::exp(eta(i)) - std::lgamma(y(i) + 1.0);
    return ll;
}

NbFit fit_poisson_glm(const Dataset& dataset, double tol, int max_iter) {
    const auto n = static_cast<Eigen::Index>(dataset.sites.size());
    if (n < 6) throw std::invalid_argument("fit_poisson_glm: need at least 6 sites");
    Eigen::MatrixXd X = design_matrix(dataset);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = dataset.sites[i].observed_count;

    const Eigen::Index p = X.cols();
    double ybar = y.mean();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = std::log(std::max(ybar, 1e-8));

    NbFit fit;
    for (int iter = 1; iter <= max_iter; ++iter) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu = eta.array().exp();
        Eigen::VectorXd w = mu.cwiseMax(1e-12);
        // working response for the log link
        Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(w);
        Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::MatrixXd Xw = sw.asDiagonal() * X;
        Eigen::VectorXd zw = sw.asDiagonal() * z;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
        qr.setThreshold(1e-10);
        if (qr.rank() < p)
            throw RankDeficiencyError("fit_poisson_glm: singular weighted design");
        Eigen::VectorXd beta_new = qr.solve(zw);
        double delta = (beta_new - beta).cwiseAbs().maxCoeff();
        beta = beta_new;
        fit.iterations = iter;
        fit.ll_trace.push_back(poisson_log_likelihood(X, y, beta));
        if (delta < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.coefficients = beta;
    fit.log_likelihood = poisson_log_likelihood(X, y, beta);
    return fit;
}

double estimate_dispersion_aux_ols(const Dataset& dataset,
                                   const Eigen::VectorXd& fitted_mu) {
    const auto n = static_cast<Eigen::Index>(dataset.sites.size());
    if (fitted_mu.size() != n)
        throw std::invalid_argument("estimate_dispersion_aux_ols: length mismatch");
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double mu = fitted_mu(i);
        if (!(mu > 0.0))
            throw std::invalid_argument("estimate_dispersion_aux_ols: mu must be > 0");
        double y = static_cast<double>(dataset.sites[i].observed_count);
        double z = ((y - mu) * (y - mu) - y) / mu;
        num += z * mu;
        den += mu * mu;
    }
    double alpha = num / den;
    return alpha < 0.0 ? 0.0 : alpha;
}

double predict_mu(const NbFit& fit, const std::array<double, 4>& features) {
    if (fit.coefficients.size() != 5)
        throw std::invalid_argument("predict_mu: fit has no coefficients");
    double eta = fit.coefficients(0);
    for (int j = 0; j < 4; ++j) eta += fit.coefficients(j + 1) * features[j];
    return std::exp(eta);
}

double nb_log_pmf(long y, double mu, double alpha) {
    if (y < 0) throw std::invalid_argument("nb_pmf: y must be >= 0");
    if (!(mu > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("nb_pmf: mu and alpha must be > 0");
    const double r = 1.0 / alpha;
    const double am = alpha * mu;
    const double yd = static_cast<double>(y);
    return std::lgamma(yd + r) - std::lgamma(r) - std::lgamma(yd + 1.0) +
           yd * std::log(am / (1.0 + am)) - r * std::log1p(am);
}

double nb_pmf(long y, double mu, double alpha) {
    return std::exp(nb_log_pmf(y, mu, alpha));
}

} // namespace cganeb
