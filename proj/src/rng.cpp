#include "cganeb/rng.hpp"

#include <cmath>

namespace cganeb {

double Rng::normal() {
    // u1 in (0,1] so the log is finite
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
        throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        double u = uniform();
        while (u == 0.0) u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

namespace {

// Poisson by sequential inversion; only valid for modest lambda.
long poisson_inversion(Rng& rng, double lambda) {
    double p = std::exp(-lambda);
    double cum = p;
    double u = rng.uniform();
    long k = 0;
    while (u > cum) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
        if (k > 10000) break; // unreachable for lambda < 30
    }
    return k;
}

// Hormann (1993) PTRS transformed rejection, lambda >= 10.
long poisson_ptrs(Rng& rng, double lambda) {
    const double log_lambda = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        double us = 0.5 - std::fabs(u);
        double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0))
            return static_cast<long>(k);
    }
}

} // namespace

long Rng::poisson(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("poisson: lambda must be >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) return poisson_inversion(*this, lambda);
    return poisson_ptrs(*this, lambda);
}

} // namespace cganeb
