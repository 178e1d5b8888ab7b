#include "cganeb/nn.hpp"

#include <cmath>
#include <string>

namespace cganeb {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Elu: return "elu";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "elu") return Activation::Elu;
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

DenseLayer DenseLayer::glorot(int in_dim, int out_dim, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.W.resize(out_dim, in_dim);
    double limit = std::sqrt(6.0 / (in_dim + out_dim));
    for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.W.cols(); ++j)
            layer.W(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
    layer.b = Eigen::VectorXd::Zero(out_dim);
    layer.act = act;
    return layer;
}

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
    switch (act) {
        case Activation::Elu:
            return z.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
        case Activation::Relu:
            return z.cwiseMax(0.0);
        case Activation::Sigmoid:
            return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        case Activation::Identity:
            return z;
    }
    return z;
}

Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, Activation act) {
    switch (act) {
        case Activation::Elu:
            return z.unaryExpr([](double x) { return x > 0.0 ? 1.0 : std::exp(x); });
        case Activation::Relu:
            return z.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
        case Activation::Sigmoid:
            return z.unaryExpr([](double x) {
                double s = 1.0 / (1.0 + std::exp(-x));
                return s * (1.0 - s);
            });
        case Activation::Identity:
            return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    }
    return Eigen::MatrixXd::Ones(z.rows(), z.cols());
}

Eigen::Index TwoBranchNet::param_count() const {
    Eigen::Index n = branch_a.W.size() + branch_a.b.size() + branch_b.W.size() +
                     branch_b.b.size();
    for (const auto& l : trunk) n += l.W.size() + l.b.size();
    return n;
}

namespace {

void append_layer(const DenseLayer& l, Eigen::VectorXd& out, Eigen::Index& off) {
    out.segment(off, l.W.size()) =
        Eigen::Map<const Eigen::VectorXd>(l.W.data(), l.W.size());
    off += l.W.size();
    out.segment(off, l.b.size()) = l.b;
    off += l.b.size();
}

void read_layer(DenseLayer& l, const Eigen::VectorXd& in, Eigen::Index& off) {
    Eigen::Map<Eigen::VectorXd>(l.W.data(), l.W.size()) = in.segment(off, l.W.size());
    off += l.W.size();
    l.b = in.segment(off, l.b.size());
    off += l.b.size();
}

} // namespace

Eigen::VectorXd TwoBranchNet::params_flat() const {
    Eigen::VectorXd out(param_count());
    Eigen::Index off = 0;
    append_layer(branch_a, out, off);
    append_layer(branch_b, out, off);
    for (const auto& l : trunk) append_layer(l, out, off);
    return out;
}

void TwoBranchNet::set_params_flat(const Eigen::VectorXd& theta) {
    if (theta.size() != param_count())
        throw ShapeError("set_params_flat: wrong parameter vector length");
    Eigen::Index off = 0;
    read_layer(branch_a, theta, off);
    read_layer(branch_b, theta, off);
    for (auto& l : trunk) read_layer(l, theta, off);
}

Eigen::VectorXd Gradients::flat() const {
    Eigen::Index n = 0;
    for (const auto& m : dW) n += m.size();
    for (const auto& v : db) n += v.size();
    Eigen::VectorXd out(n);
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < dW.size(); ++i) {
        out.segment(off, dW[i].size()) =
            Eigen::Map<const Eigen::VectorXd>(dW[i].data(), dW[i].size());
        off += dW[i].size();
        out.segment(off, db[i].size()) = db[i];
        off += db[i].size();
    }
    return out;
}

Eigen::MatrixXd forward(const TwoBranchNet& net, const Eigen::MatrixXd& in_a,
                        const Eigen::MatrixXd& in_b, Tape* tape) {
    if (in_a.rows() != net.branch_a.W.cols())
        throw ShapeError("forward: branch-a input dimension mismatch");
    if (in_b.rows() != net.branch_b.W.cols())
        throw ShapeError("forward: branch-b input dimension mismatch");
    if (in_a.cols() != in_b.cols())
        throw ShapeError("forward: branch batch sizes differ");

    Eigen::MatrixXd pre_a = (net.branch_a.W * in_a).colwise() + net.branch_a.b;
    Eigen::MatrixXd pre_b = (net.branch_b.W * in_b).colwise() + net.branch_b.b;
    Eigen::MatrixXd act_a = apply_activation(pre_a, net.branch_a.act);
    Eigen::MatrixXd act_b = apply_activation(pre_b, net.branch_b.act);

    Eigen::MatrixXd h(act_a.rows() + act_b.rows(), act_a.cols());
    h << act_a, act_b;

    if (tape) {
        tape->input_a = in_a;
        tape->input_b = in_b;
        tape->pre_a = pre_a;
        tape->pre_b = pre_b;
        tape->trunk_inputs.clear();
        tape->trunk_pre.clear();
    }

    for (const auto& layer : net.trunk) {
        if (h.rows() != layer.W.cols())
            throw ShapeError("forward: trunk layer input dimension mismatch");
        if (tape) tape->trunk_inputs.push_back(h);
        Eigen::MatrixXd pre = (layer.W * h).colwise() + layer.b;
        if (tape) tape->trunk_pre.push_back(pre);
        h = apply_activation(pre, layer.act);
    }
    if (tape) tape->output = h;
    return h;
}

Gradients backward(const TwoBranchNet& net, const Tape& tape,
                   const Eigen::MatrixXd& d_output) {
    if (tape.trunk_pre.size() != net.trunk.size())
        throw std::logic_error("backward: tape does not match network");
    if (d_output.rows() != net.output_dim() || d_output.cols() != tape.output.cols())
        throw ShapeError("backward: output gradient shape mismatch");

    Gradients g;
    g.dW.resize(net.trunk.size() + 2);
    g.db.resize(net.trunk.size() + 2);

    Eigen::MatrixXd d_act = d_output;
    for (std::size_t k = net.trunk.size(); k-- > 0;) {
        const DenseLayer& layer = net.trunk[k];
        Eigen::MatrixXd d_pre =
            d_act.cwiseProduct(activation_derivative(tape.trunk_pre[k], layer.act));
        g.dW[k + 2] = d_pre * tape.trunk_inputs[k].transpose();
        g.db[k + 2] = d_pre.rowwise().sum();
        d_act = layer.W.transpose() * d_pre;
    }

    // split the concat gradient between the branches
    const Eigen::Index na = net.branch_a.W.rows();
    const Eigen::Index nb = net.branch_b.W.rows();
    Eigen::MatrixXd d_act_a = d_act.topRows(na);
    Eigen::MatrixXd d_act_b = d_act.bottomRows(nb);

    Eigen::MatrixXd d_pre_a =
        d_act_a.cwiseProduct(activation_derivative(tape.pre_a, net.branch_a.act));
    g.dW[0] = d_pre_a * tape.input_a.transpose();
    g.db[0] = d_pre_a.rowwise().sum();
    g.d_input_a = net.branch_a.W.transpose() * d_pre_a;

    Eigen::MatrixXd d_pre_b =
        d_act_b.cwiseProduct(activation_derivative(tape.pre_b, net.branch_b.act));
    g.dW[1] = d_pre_b * tape.input_b.transpose();
    g.db[1] = d_pre_b.rowwise().sum();
    g.d_input_b = net.branch_b.W.transpose() * d_pre_b;

    return g;
}

namespace {
constexpr double kBceClip = 1e-7;
}

double bce_loss(const Eigen::MatrixXd& p, const Eigen::MatrixXd& t) {
    if (p.rows() != t.rows() || p.cols() != t.cols())
        throw ShapeError("bce_loss: shape mismatch");
    double total = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            double pc = std::min(std::max(p(i, j), kBceClip), 1.0 - kBceClip);
            total -= t(i, j) * std::log(pc) + (1.0 - t(i, j)) * std::log(1.0 - pc);
        }
    return total / static_cast<double>(p.size());
}

Eigen::MatrixXd bce_grad(const Eigen::MatrixXd& p, const Eigen::MatrixXd& t) {
    if (p.rows() != t.rows() || p.cols() != t.cols())
        throw ShapeError("bce_grad: shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(p.size());
    Eigen::MatrixXd g(p.rows(), p.cols());
    for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            double pc = std::min(std::max(p(i, j), kBceClip), 1.0 - kBceClip);
            g(i, j) = (-t(i, j) / pc + (1.0 - t(i, j)) / (1.0 - pc)) * inv_n;
        }
    return g;
}

AdamState AdamState::init(Eigen::Index n_params, double base_lr, double decay) {
    AdamState s;
    s.first_moment = Eigen::VectorXd::Zero(n_params);
    s.second_moment = Eigen::VectorXd::Zero(n_params);
    s.base_lr = base_lr;
    s.decay = decay;
    return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (params.size() != state.first_moment.size() || grads.size() != params.size())
        throw ShapeError("adam_step: shape mismatch");
    if (!grads.allFinite())
        throw TrainingDivergenceError("adam_step: non-finite gradient");

    const double lr = state.effective_lr();
    const long t = state.step_count + 1;
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grads;
    state.second_moment = state.beta2 * state.second_moment +
                          (1.0 - state.beta2) * grads.cwiseProduct(grads).eval();
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
    Eigen::ArrayXd m_hat = state.first_moment.array() / bc1;
    Eigen::ArrayXd v_hat = state.second_moment.array() / bc2;
    params.array() -= lr * m_hat / (v_hat.sqrt() + state.eps);
    state.step_count = t;
}

} // namespace cganeb
