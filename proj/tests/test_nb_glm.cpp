#include <doctest.h>

#include <cmath>

#include "cganeb/nb_glm.hpp"
#include "cganeb/sim.hpp"

using namespace cganeb;

namespace {

Dataset make_dataset(std::vector<std::array<double, 4>> features,
                     std::vector<long> counts) {
    Dataset ds;
    ds.config = SimConfig{0.5, 0.5, FunctionalForm::LogLinear, features.size(), 0};
    for (std::size_t i = 0; i < features.size(); ++i)
        ds.sites.push_back({features[i], 1.0, counts[i]});
    return ds;
}

Dataset e1_style(std::size_t n, std::uint64_t seed) {
    return simulate_dataset(SimConfig{0.5, 0.5, FunctionalForm::LogLinear, n, seed});
}

} // namespace

TEST_CASE("constant response recovers intercept ln(y) with zero slopes") {
    Rng rng(8);
    std::vector<std::array<double, 4>> feats;
    std::vector<long> counts;
    for (int i = 0; i < 50; ++i) {
        feats.push_back(sample_uniform_features(rng));
        counts.push_back(3);
    }
    NbFit fit = fit_poisson_glm(make_dataset(feats, counts));
    CHECK(fit.converged);
    CHECK(fit.coefficients(0) == doctest::Approx(std::log(3.0)).epsilon(1e-8));
    for (int j = 1; j < 5; ++j)
        CHECK(std::fabs(fit.coefficients(j)) < 1e-8);
}

TEST_CASE("identically zero feature column raises rank deficiency") {
    Rng rng(9);
    std::vector<std::array<double, 4>> feats;
    std::vector<long> counts;
    for (int i = 0; i < 50; ++i) {
        auto x = sample_uniform_features(rng);
        x[2] = 0.0;
        feats.push_back(x);
        counts.push_back(static_cast<long>(i % 4));
    }
    // a zero column is singular on its own (not collinear with the intercept)
    CHECK_THROWS_AS(fit_poisson_glm(make_dataset(feats, counts)), RankDeficiencyError);
}

TEST_CASE("too-small datasets are rejected") {
    Rng rng(10);
    std::vector<std::array<double, 4>> feats(3, sample_uniform_features(rng));
    CHECK_THROWS_AS(fit_poisson_glm(make_dataset(feats, {1, 2, 3})),
                    std::invalid_argument);
}

TEST_CASE("parameter recovery on an E1-style dataset") {
    Dataset ds = e1_style(20000, 4242);
    NbFit fit = fit_poisson_glm(ds);
    REQUIRE(fit.converged);
    const double truth[5] = {0.5, 0.05, -0.05, 1.0, -1.0};
    for (int j = 0; j < 5; ++j)
        CHECK(std::fabs(fit.coefficients(j) - truth[j]) < 0.1);

    Eigen::VectorXd mu(ds.sites.size());
    for (std::size_t i = 0; i < ds.sites.size(); ++i)
        mu(static_cast<Eigen::Index>(i)) = predict_mu(fit, ds.sites[i].features);
    double alpha_hat = estimate_dispersion_aux_ols(ds, mu);
    CHECK(alpha_hat == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("high-dispersion recovery (E3-style alpha = 1.5)") {
    Dataset ds = simulate_dataset(SimConfig{1.5, 0.5, FunctionalForm::LogLinear, 20000, 555});
    NbFit fit = fit_poisson_glm(ds);
    Eigen::VectorXd mu(ds.sites.size());
    for (std::size_t i = 0; i < ds.sites.size(); ++i)
        mu(static_cast<Eigen::Index>(i)) = predict_mu(fit, ds.sites[i].features);
    CHECK(estimate_dispersion_aux_ols(ds, mu) == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("IRLS log-likelihood is non-decreasing") {
    Dataset ds = e1_style(5000, 99);
    NbFit fit = fit_poisson_glm(ds);
    for (std::size_t i = 1; i < fit.ll_trace.size(); ++i)
        CHECK(fit.ll_trace[i] >= fit.ll_trace[i - 1] - 1e-10);
}

TEST_CASE("auxiliary OLS dispersion hand examples") {
    Rng rng(2);
    // (Y - mu)^2 = Y pattern gives a zero response vector
    std::vector<std::array<double, 4>> feats;
    std::vector<long> counts;
    for (int i = 0; i < 10; ++i) {
        feats.push_back(sample_uniform_features(rng));
        counts.push_back(4);
    }
    Dataset ds = make_dataset(feats, counts);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(10, 2.0);
    CHECK(estimate_dispersion_aux_ols(ds, mu) == 0.0);

    // mu = (1, 2), Y = (3, 1): z = (1, 0) -> slope 1/5
    Dataset two = make_dataset({{0, 0, 0, 0}, {0, 0, 0, 0}}, {3, 1});
    Eigen::VectorXd mu2(2);
    mu2 << 1.0, 2.0;
    CHECK(estimate_dispersion_aux_ols(two, mu2) == doctest::Approx(0.2).epsilon(1e-12));

    Eigen::VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(estimate_dispersion_aux_ols(two, bad), std::invalid_argument);
    Eigen::VectorXd wrong_len(3);
    CHECK_THROWS_AS(estimate_dispersion_aux_ols(two, wrong_len), std::invalid_argument);
}

TEST_CASE("predict_mu") {
    NbFit fit;
    fit.coefficients.resize(5);
    fit.coefficients << 0.5, 0.05, -0.05, 1.0, -1.0;
    CHECK(predict_mu(fit, {0, 0, 0, 0}) == doctest::Approx(std::exp(0.5)));
    CHECK(predict_mu(fit, {1, 1, 1, 1}) == doctest::Approx(std::exp(0.5)));
    fit.coefficients.setZero();
    CHECK(predict_mu(fit, {0.3, 0.9, 0.1, 0.7}) == doctest::Approx(1.0));
}

TEST_CASE("nb_pmf values and properties") {
    // alpha = 1 reduces to geometric with success probability 1/(1+mu)
    CHECK(nb_pmf(0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(nb_pmf(2, 1.0, 1.0) == doctest::Approx(0.125).epsilon(1e-12));

    for (double mu : {1.5, 12.0})
        for (double alpha : {0.5, 1.5}) {
            double total = 0.0, m1 = 0.0, m2 = 0.0;
            for (long y = 0; y <= 500; ++y) {
                double p = nb_pmf(y, mu, alpha);
                total += p;
                m1 += y * p;
                m2 += static_cast<double>(y) * y * p;
            }
            CHECK(total >= 0.999);
            CHECK(m1 == doctest::Approx(mu).epsilon(1e-3));
            CHECK(m2 - m1 * m1 ==
                  doctest::Approx(mu + alpha * mu * mu).epsilon(1e-3));
        }
}

TEST_CASE("nb_pmf converges to Poisson as alpha -> 0") {
    for (long y = 0; y <= 30; ++y) {
        double poisson = std::exp(-3.0 + y * std::log(3.0) - std::lgamma(y + 1.0));
        CHECK(std::fabs(nb_pmf(y, 3.0, 1e-8) - poisson) < 1e-5);
    }
}

TEST_CASE("nb_pmf rejects invalid inputs") {
    CHECK_THROWS_AS(nb_pmf(-1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(nb_pmf(0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(nb_pmf(0, 1.0, 0.0), std::invalid_argument);
}
