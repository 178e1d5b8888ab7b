#include <doctest.h>

#include <cmath>
#include <vector>

#include "cganeb/rng.hpp"

using namespace cganeb;

TEST_CASE("same seed reproduces the stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams with different keys diverge") {
    Rng root(7);
    Rng s0 = root.substream(0);
    Rng s1 = root.substream(1);
    CHECK(s0.next_u64() != s1.next_u64());
}

TEST_CASE("uniform draws lie in [0,1)") {
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal has mean 0 and variance 1") {
    Rng rng(5);
    const int n = 200000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        ss += x * x;
    }
    double mean = sum / n;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(ss / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("gamma(1/alpha, alpha) has mean 1 and variance alpha") {
    const int n = 1000000;
    SUBCASE("alpha = 0.5") {
        Rng rng(11);
        double sum = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            double g = rng.gamma(1.0 / 0.5, 0.5);
            sum += g;
            ss += g * g;
        }
        double mean = sum / n;
        double var = ss / n - mean * mean;
        CHECK(std::fabs(mean - 1.0) < 0.01);
        CHECK(std::fabs(var - 0.5) < 0.02);
    }
    SUBCASE("alpha = 1.5 (shape < 1 path)") {
        Rng rng(12);
        double sum = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            double g = rng.gamma(1.0 / 1.5, 1.5);
            sum += g;
            ss += g * g;
        }
        double mean = sum / n;
        double var = ss / n - mean * mean;
        CHECK(std::fabs(mean - 1.0) < 0.01);
        CHECK(std::fabs(var - 1.5) < 0.05);
    }
}

TEST_CASE("gamma rejects non-positive parameters") {
    Rng rng(1);
    CHECK_THROWS_AS(rng.gamma(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rng.gamma(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("poisson matches mean and variance in both regimes") {
    for (double lambda : {1.8, 12.0, 50.0}) {
        Rng rng(static_cast<std::uint64_t>(lambda * 1000));
        const int n = 400000;
        double sum = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            double k = static_cast<double>(rng.poisson(lambda));
            sum += k;
            ss += k * k;
        }
        double mean = sum / n;
        double var = ss / n - mean * mean;
        CHECK(mean == doctest::Approx(lambda).epsilon(0.01));
        CHECK(var == doctest::Approx(lambda).epsilon(0.02));
    }
}

TEST_CASE("poisson edge cases") {
    Rng rng(3);
    CHECK(rng.poisson(0.0) == 0);
    CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
}
