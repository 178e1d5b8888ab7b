#ifndef CGANEB_EB_HPP
#define CGANEB_EB_HPP

#include <stdexcept>

namespace cganeb {

enum class EbMethod { NbEb, CganEb };

struct EbEstimate {
    EbMethod method;
    double prior_mean;     // mu or E^CGAN(k)
    double prior_variance; // alpha*mu^2 or Var^CGAN(k)
    double weight;         // in (0, 1]
    long observed;
    double value; // lies between prior_mean and observed
};

// w = 1/(1 + alpha*mu); estimate = w*mu + (1-w)*y
EbEstimate nb_eb(double mu, double alpha, long y);

// w = mean/(mean + var); estimate = w*mean + (1-w)*y
EbEstimate cgan_eb(double prior_mean, double prior_variance, long y);

// Floor applied to degenerate all-zero CGAN sample means before cgan_eb.
inline constexpr double kPriorMeanFloor = 1e-6;

} // namespace cganeb

#endif
