#ifndef CGANEB_NN_HPP
#define CGANEB_NN_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "cganeb/rng.hpp"

namespace cganeb {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TrainingDivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Activation { Elu, Relu, Sigmoid, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
    Eigen::MatrixXd W; // out_dim x in_dim
    Eigen::VectorXd b; // out_dim
    Activation act = Activation::Identity;

    static DenseLayer glorot(int in_dim, int out_dim, Activation act, Rng& rng);
};

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act);
Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, Activation act);

// Two input branches feeding a concatenation, then a dense trunk. Covers both
// the generator and the discriminator topology.
struct TwoBranchNet {
    DenseLayer branch_a; // feature branch
    DenseLayer branch_b; // noise / count branch
    std::vector<DenseLayer> trunk;

    int input_a_dim() const { return static_cast<int>(branch_a.W.cols()); }
    int input_b_dim() const { return static_cast<int>(branch_b.W.cols()); }
    int output_dim() const { return static_cast<int>(trunk.back().W.rows()); }

    Eigen::Index param_count() const;
    Eigen::VectorXd params_flat() const;
    void set_params_flat(const Eigen::VectorXd& theta);
};

// Forward tape: inputs and pre-activations for every layer, batch as columns.
struct Tape {
    Eigen::MatrixXd input_a, input_b;
    Eigen::MatrixXd pre_a, pre_b;              // branch pre-activations
    std::vector<Eigen::MatrixXd> trunk_inputs; // activation entering each trunk layer
    std::vector<Eigen::MatrixXd> trunk_pre;
    Eigen::MatrixXd output;
};

struct Gradients {
    std::vector<Eigen::MatrixXd> dW; // [branch_a, branch_b, trunk...]
    std::vector<Eigen::VectorXd> db;
    Eigen::MatrixXd d_input_a, d_input_b;

    Eigen::VectorXd flat() const;
};

Eigen::MatrixXd forward(const TwoBranchNet& net, const Eigen::MatrixXd& in_a,
                        const Eigen::MatrixXd& in_b, Tape* tape = nullptr);

// Reverse pass; d_output is dLoss/dOutput with the tape's batch shape.
Gradients backward(const TwoBranchNet& net, const Tape& tape,
                   const Eigen::MatrixXd& d_output);

// mean of -[t ln p + (1-t) ln(1-p)] with p clipped to [1e-7, 1-1e-7]
double bce_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);
Eigen::MatrixXd bce_grad(const Eigen::MatrixXd& predictions,
                         const Eigen::MatrixXd& targets);

struct AdamState {
    long step_count = 0;
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    double base_lr = 0.001;
    double decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState init(Eigen::Index n_params, double base_lr, double decay);
    double effective_lr() const { return base_lr / (1.0 + decay * step_count); }
};

// In-place Adam update with bias correction and inverse-time lr decay.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

} // namespace cganeb

#endif
