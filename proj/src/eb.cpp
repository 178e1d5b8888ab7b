#include "cganeb/eb.hpp"

namespace cganeb {

EbEstimate nb_eb(double mu, double alpha, long y) {
    if (!(mu > 0.0)) throw std::invalid_argument("nb_eb: mu must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("nb_eb: alpha must be >= 0");
    if (y < 0) throw std::invalid_argument("nb_eb: y must be >= 0");
    double w = 1.0 / (1.0 + alpha * mu);
    return {EbMethod::NbEb, mu, alpha * mu * mu, w, y,
            w * mu + (1.0 - w) * static_cast<double>(y)};
}

EbEstimate cgan_eb(double prior_mean, double prior_variance, long y) {
    if (!(prior_mean > 0.0))
        throw std::invalid_argument("cgan_eb: prior_mean must be > 0");
    if (prior_variance < 0.0)
        throw std::invalid_argument("cgan_eb: prior_variance must be >= 0");
    if (y < 0) throw std::invalid_argument("cgan_eb: y must be >= 0");
    double w = prior_mean / (prior_mean + prior_variance);
    return {EbMethod::CganEb, prior_mean, prior_variance, w, y,
            w * prior_mean + (1.0 - w) * static_cast<double>(y)};
}

} // namespace cganeb
