#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cganeb/eb.hpp"
#include "cganeb/rng.hpp"

using namespace cganeb;

TEST_CASE("nb_eb hand values") {
    EbEstimate e = nb_eb(2.0, 0.5, 4);
    CHECK(e.weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-15));

    // Poisson limit: alpha = 0 fully trusts the prior
    CHECK(nb_eb(2.0, 0.0, 100).value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(nb_eb(2.0, 0.5, 2).value == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cgan_eb hand values") {
    CHECK(cgan_eb(3.0, 0.0, 7).value == doctest::Approx(3.0).epsilon(1e-15));
    EbEstimate e = cgan_eb(2.0, 2.0, 4);
    CHECK(e.weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(cgan_eb(2.0, 2.0, 2).value == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(nb_eb(0.0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(nb_eb(1.0, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(cgan_eb(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(cgan_eb(-1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("shrinkage and weight bounds hold on random inputs") {
    Rng rng(606);
    for (int i = 0; i < 1000; ++i) {
        double mu = 0.01 + 20.0 * rng.uniform();
        double alpha = 3.0 * rng.uniform();
        long y = rng.poisson(5.0);
        EbEstimate e = nb_eb(mu, alpha, y);
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
        CHECK(e.value >= std::min(mu, static_cast<double>(y)) - 1e-12);
        CHECK(e.value <= std::max(mu, static_cast<double>(y)) + 1e-12);

        double var = 25.0 * rng.uniform();
        EbEstimate c = cgan_eb(mu, var, y);
        CHECK(c.weight > 0.0);
        CHECK(c.weight <= 1.0);
        CHECK(c.value >= std::min(mu, static_cast<double>(y)) - 1e-12);
        CHECK(c.value <= std::max(mu, static_cast<double>(y)) + 1e-12);
    }
}

TEST_CASE("cgan_eb with NB moments reproduces nb_eb exactly") {
    Rng rng(607);
    for (int i = 0; i < 1000; ++i) {
        double mu = 0.01 + 20.0 * rng.uniform();
        double alpha = 0.01 + 3.0 * rng.uniform();
        long y = rng.poisson(4.0);
        double a = nb_eb(mu, alpha, y).value;
        double b = cgan_eb(mu, alpha * mu * mu, y).value;
        CHECK(std::fabs(a - b) < 1e-12);
    }
}

TEST_CASE("estimate is monotone in the observed count") {
    Rng rng(608);
    for (int i = 0; i < 200; ++i) {
        double mu = 0.1 + 10.0 * rng.uniform();
        double alpha = 2.0 * rng.uniform();
        double prev = -1.0;
        for (long y = 0; y <= 20; ++y) {
            double v = nb_eb(mu, alpha, y).value;
            CHECK(v >= prev);
            prev = v;
        }
    }
}
