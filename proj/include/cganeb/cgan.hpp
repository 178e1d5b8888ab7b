#ifndef CGANEB_CGAN_HPP
#define CGANEB_CGAN_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cganeb/nn.hpp"
#include "cganeb/sim.hpp"

namespace cganeb {

struct CganConfig {
    int epochs = 500;
    int batch_size = 100;
    double gen_lr = 0.001;
    double disc_lr = 0.001;
    double gen_decay = 0.001;
    double disc_decay = 0.0;
    int noise_dim = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CganModel {
    TwoBranchNet generator;     // X, z -> yhat (ReLU head)
    TwoBranchNet discriminator; // X, y -> p(real) (Sigmoid head)
    double y_scale = 1.0;       // max observed count in training data (floor 1)
    CganConfig config;
    std::vector<std::pair<double, double>> loss_history; // per-epoch (real, fake)
};

// Untrained Fig.-style model: feature/noise branches Dense(100, ELU),
// generator trunk 3x Dense(40, ELU) + Dense(1, ReLU), discriminator trunk
// 2x Dense(40, ELU) + Dense(1, Sigmoid).
CganModel init_cgan(int feature_dim, const CganConfig& config);

// Adversarial loop: per mini-batch one discriminator step (real+fake BCE)
// then one generator step against target 1 with the discriminator frozen.
CganModel train_cgan(const Dataset& dataset, const CganConfig& config);

// m generator draws at one site, rescaled to count units (all >= 0).
std::vector<double> cgan_sample(const CganModel& model,
                                const std::array<double, 4>& features,
                                int m, Rng& rng);

// sample mean and (m-1)-denominator sample variance
std::pair<double, double> sample_mean_variance(const std::vector<double>& samples);

std::pair<double, double> predictive_moments(const CganModel& model,
                                             const std::array<double, 4>& features,
                                             int m, Rng& rng);

// JSON manifest + little-endian float64 parameter blob
void save_cgan(const CganModel& model, const std::string& manifest_path,
               const std::string& params_path);
CganModel load_cgan(const std::string& manifest_path, const std::string& params_path);

} // namespace cganeb

#endif
