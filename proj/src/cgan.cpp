#include "cganeb/cgan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace cganeb {

void CganConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("CganConfig: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("CganConfig: batch_size must be >= 1");
    if (!(gen_lr > 0.0) || !(disc_lr > 0.0))
        throw std::invalid_argument("CganConfig: learning rates must be > 0");
    if (gen_decay < 0.0 || disc_decay < 0.0)
        throw std::invalid_argument("CganConfig: decays must be >= 0");
    if (noise_dim < 1) throw std::invalid_argument("CganConfig: noise_dim must be >= 1");
}

CganModel init_cgan(int feature_dim, const CganConfig& config) {
    config.validate();
    Rng root(config.seed);
    Rng wrng = root.substream(0);

    CganModel m;
    m.config = config;

    m.generator.branch_a = DenseLayer::glorot(feature_dim, 100, Activation::Elu, wrng);
    m.generator.branch_b = DenseLayer::glorot(config.noise_dim, 100, Activation::Elu, wrng);
    m.generator.trunk = {
        DenseLayer::glorot(200, 40, Activation::Elu, wrng),
        DenseLayer::glorot(40, 40, Activation::Elu, wrng),
        DenseLayer::glorot(40, 40, Activation::Elu, wrng),
        DenseLayer::glorot(40, 1, Activation::Relu, wrng),
    };

    m.discriminator.branch_a = DenseLayer::glorot(feature_dim, 100, Activation::Elu, wrng);
    m.discriminator.branch_b = DenseLayer::glorot(1, 100, Activation::Elu, wrng);
    m.discriminator.trunk = {
        DenseLayer::glorot(200, 40, Activation::Elu, wrng),
        DenseLayer::glorot(40, 40, Activation::Elu, wrng),
        DenseLayer::glorot(40, 1, Activation::Sigmoid, wrng),
    };
    return m;
}

namespace {

Eigen::MatrixXd standard_normals(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = rng.normal();
    return z;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& m, const std::vector<int>& idx,
                             std::size_t begin, std::size_t end) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(end - begin));
    for (std::size_t k = begin; k < end; ++k)
        out.col(static_cast<Eigen::Index>(k - begin)) = m.col(idx[k]);
    return out;
}

} // namespace

CganModel train_cgan(const Dataset& dataset, const CganConfig& config) {
    if (dataset.sites.empty())
        throw std::invalid_argument("train_cgan: dataset is empty");
    CganModel model = init_cgan(4, config);

    const auto n = static_cast<Eigen::Index>(dataset.sites.size());
    Eigen::MatrixXd X(4, n);
    Eigen::MatrixXd y(1, n);
    double ymax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) X(j, i) = dataset.sites[i].features[j];
        y(0, i) = static_cast<double>(dataset.sites[i].observed_count);
        ymax = std::max(ymax, y(0, i));
    }
    model.y_scale = ymax > 0.0 ? ymax : 1.0;
    y /= model.y_scale;

    Rng root(config.seed);
    Rng shuffle_rng = root.substream(1);
    Rng noise_rng = root.substream(2);

    Eigen::VectorXd g_params = model.generator.params_flat();
    Eigen::VectorXd d_params = model.discriminator.params_flat();
    AdamState g_adam = AdamState::init(g_params.size(), config.gen_lr, config.gen_decay);
    AdamState d_adam = AdamState::init(d_params.size(), config.disc_lr, config.disc_decay);
    // momentum destabilizes the adversarial loop: the generator's ReLU head
    // dies irrecoverably after the first overshoot, so run both players
    // momentum-free
    g_adam.beta1 = 0.0;
    d_adam.beta1 = 0.0;

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates on the dedicated shuffle stream
        for (std::size_t i = order.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i));
            if (j >= i) j = i - 1;
            std::swap(order[i - 1], order[j]);
        }

        double epoch_real = 0.0, epoch_fake = 0.0;
        int n_batches = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t stop = std::min(order.size(),
                                        start + static_cast<std::size_t>(config.batch_size));
            Eigen::MatrixXd Xb = take_columns(X, order, start, stop);
            Eigen::MatrixXd yb = take_columns(y, order, start, stop);
            const auto batch = static_cast<Eigen::Index>(stop - start);
            Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, batch);
            Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(1, batch);

            // discriminator: real pass + fake pass
            Tape d_real_tape;
            Eigen::MatrixXd p_real = forward(model.discriminator, Xb, yb, &d_real_tape);
            double real_loss = bce_loss(p_real, ones);

            Eigen::MatrixXd z = standard_normals(noise_rng, config.noise_dim, batch);
            Eigen::MatrixXd yhat = forward(model.generator, Xb, z);
            Tape d_fake_tape;
            Eigen::MatrixXd p_fake = forward(model.discriminator, Xb, yhat, &d_fake_tape);
            double fake_loss = bce_loss(p_fake, zeros);

            if (!std::isfinite(real_loss) || !std::isfinite(fake_loss))
                throw TrainingDivergenceError(
                    "train_cgan: non-finite loss at epoch " + std::to_string(epoch));

            Gradients gd_real = backward(model.discriminator, d_real_tape,
                                         bce_grad(p_real, ones));
            Gradients gd_fake = backward(model.discriminator, d_fake_tape,
                                         bce_grad(p_fake, zeros));
            adam_step(d_adam, d_params, gd_real.flat() + gd_fake.flat());
            model.discriminator.set_params_flat(d_params);

            // generator: non-saturating target-1 objective, discriminator frozen
            Eigen::MatrixXd z2 = standard_normals(noise_rng, config.noise_dim, batch);
            Tape g_tape;
            Eigen::MatrixXd yhat2 = forward(model.generator, Xb, z2, &g_tape);
            Tape d_tape;
            Eigen::MatrixXd p_gen = forward(model.discriminator, Xb, yhat2, &d_tape);
            Gradients through_d = backward(model.discriminator, d_tape,
                                           bce_grad(p_gen, ones));
            Gradients gg = backward(model.generator, g_tape, through_d.d_input_b);
            adam_step(g_adam, g_params, gg.flat());
            model.generator.set_params_flat(g_params);

            epoch_real += real_loss;
            epoch_fake += fake_loss;
            ++n_batches;

            // a fully dead ReLU head (all generated samples exactly zero while
            // the data has positive counts) is an absorbing state: the gradient
            // through the head is identically zero. Kick the head bias back
            // above zero so the adversarial game resumes.
            if (ymax > 0.0 && yhat.maxCoeff() <= 0.0 && yhat2.maxCoeff() <= 0.0) {
                model.generator.trunk.back().b[0] = 0.1;
                g_params = model.generator.params_flat();
            }
        }
        model.loss_history.emplace_back(epoch_real / n_batches, epoch_fake / n_batches);
    }
    return model;
}

std::vector<double> cgan_sample(const CganModel& model,
                                const std::array<double, 4>& features,
                                int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("cgan_sample: m must be >= 1");
    Eigen::MatrixXd X(4, m);
    for (int j = 0; j < 4; ++j) X.row(j).setConstant(features[static_cast<std::size_t>(j)]);
    Eigen::MatrixXd z = standard_normals(rng, model.config.noise_dim, m);
    Eigen::MatrixXd out = forward(model.generator, X, z);
    std::vector<double> samples(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) samples[static_cast<std::size_t>(j)] = out(0, j) * model.y_scale;
    return samples;
}

std::pair<double, double> sample_mean_variance(const std::vector<double>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("sample_mean_variance: need at least 2 samples");
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                  static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (mean - v) * (mean - v);
    return {mean, ss / static_cast<double>(samples.size() - 1)};
}

std::pair<double, double> predictive_moments(const CganModel& model,
                                             const std::array<double, 4>& features,
                                             int m, Rng& rng) {
    if (m < 2) throw std::invalid_argument("predictive_moments: m must be >= 2");
    return sample_mean_variance(cgan_sample(model, features, m, rng));
}

namespace {

using nlohmann::json;

json net_manifest(const TwoBranchNet& net) {
    auto layer = [](const DenseLayer& l) {
        return json{{"in", l.W.cols()}, {"out", l.W.rows()},
                    {"activation", activation_name(l.act)}};
    };
    json trunk = json::array();
    for (const auto& l : net.trunk) trunk.push_back(layer(l));
    return json{{"branch_a", layer(net.branch_a)},
                {"branch_b", layer(net.branch_b)},
                {"trunk", trunk}};
}

DenseLayer layer_from_manifest(const json& j) {
    DenseLayer l;
    l.W = Eigen::MatrixXd::Zero(j.at("out").get<int>(), j.at("in").get<int>());
    l.b = Eigen::VectorXd::Zero(j.at("out").get<int>());
    l.act = activation_from_name(j.at("activation").get<std::string>());
    return l;
}

TwoBranchNet net_from_manifest(const json& j) {
    TwoBranchNet net;
    net.branch_a = layer_from_manifest(j.at("branch_a"));
    net.branch_b = layer_from_manifest(j.at("branch_b"));
    for (const auto& lj : j.at("trunk")) net.trunk.push_back(layer_from_manifest(lj));
    return net;
}

} // namespace

void save_cgan(const CganModel& model, const std::string& manifest_path,
               const std::string& params_path) {
    json manifest{
        {"format", "cganeb-model-v1"},
        {"y_scale", model.y_scale},
        {"generator", net_manifest(model.generator)},
        {"discriminator", net_manifest(model.discriminator)},
        {"config",
         {{"epochs", model.config.epochs},
          {"batch_size", model.config.batch_size},
          {"gen_lr", model.config.gen_lr},
          {"disc_lr", model.config.disc_lr},
          {"gen_decay", model.config.gen_decay},
          {"disc_decay", model.config.disc_decay},
          {"noise_dim", model.config.noise_dim},
          {"seed", model.config.seed}}},
    };
    std::ofstream mf(manifest_path);
    if (!mf) throw std::runtime_error("save_cgan: cannot write " + manifest_path);
    mf << manifest.dump(2) << "\n";

    Eigen::VectorXd g = model.generator.params_flat();
    Eigen::VectorXd d = model.discriminator.params_flat();
    std::ofstream pf(params_path, std::ios::binary);
    if (!pf) throw std::runtime_error("save_cgan: cannot write " + params_path);
    pf.write(reinterpret_cast<const char*>(g.data()),
             static_cast<std::streamsize>(g.size() * sizeof(double)));
    pf.write(reinterpret_cast<const char*>(d.data()),
             static_cast<std::streamsize>(d.size() * sizeof(double)));
}

CganModel load_cgan(const std::string& manifest_path, const std::string& params_path) {
    std::ifstream mf(manifest_path);
    if (!mf) throw std::runtime_error("load_cgan: cannot read " + manifest_path);
    json manifest = json::parse(mf);
    if (manifest.at("format") != "cganeb-model-v1")
        throw std::runtime_error("load_cgan: unknown model format");

    CganModel model;
    model.y_scale = manifest.at("y_scale").get<double>();
    model.generator = net_from_manifest(manifest.at("generator"));
    model.discriminator = net_from_manifest(manifest.at("discriminator"));
    const json& c = manifest.at("config");
    model.config.epochs = c.at("epochs").get<int>();
    model.config.batch_size = c.at("batch_size").get<int>();
    model.config.gen_lr = c.at("gen_lr").get<double>();
    model.config.disc_lr = c.at("disc_lr").get<double>();
    model.config.gen_decay = c.at("gen_decay").get<double>();
    model.config.disc_decay = c.at("disc_decay").get<double>();
    model.config.noise_dim = c.at("noise_dim").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();

    std::ifstream pf(params_path, std::ios::binary);
    if (!pf) throw std::runtime_error("load_cgan: cannot read " + params_path);
    Eigen::VectorXd g(model.generator.param_count());
    Eigen::VectorXd d(model.discriminator.param_count());
    pf.read(reinterpret_cast<char*>(g.data()),
            static_cast<std::streamsize>(g.size() * sizeof(double)));
    pf.read(reinterpret_cast<char*>(d.data()),
            static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!pf) throw std::runtime_error("load_cgan: parameter file truncated");
    model.generator.set_params_flat(g);
    model.discriminator.set_params_flat(d);
    return model;
}

} // namespace cganeb
