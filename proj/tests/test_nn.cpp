#include <doctest.h>

#include <cmath>

#include "cganeb/nn.hpp"

using namespace cganeb;

namespace {

// random two-branch net from the generator/discriminator layer-size family
TwoBranchNet random_net(Rng& rng, Activation head) {
    TwoBranchNet net;
    net.branch_a = DenseLayer::glorot(4, 100, Activation::Elu, rng);
    net.branch_b = DenseLayer::glorot(1, 100, Activation::Elu, rng);
    int depth = 2 + static_cast<int>(rng.uniform() * 2.0);
    int in = 200;
    for (int k = 0; k < depth; ++k) {
        net.trunk.push_back(DenseLayer::glorot(in, 40, Activation::Elu, rng));
        in = 40;
    }
    net.trunk.push_back(DenseLayer::glorot(in, 1, head, rng));
    return net;
}

// Scalar loss linear in the network output, so d_output is just the weights.
double linear_loss(const TwoBranchNet& net, const Eigen::MatrixXd& xa,
                   const Eigen::MatrixXd& xb, const Eigen::MatrixXd& c) {
    return (forward(net, xa, xb).cwiseProduct(c)).sum();
}

// true iff any ELU/ReLU pre-activation sits within `margin` of its kink
bool near_kink(const TwoBranchNet& net, const Tape& tape, double margin) {
    auto close = [&](const Eigen::MatrixXd& pre, Activation act) {
        if (act == Activation::Sigmoid || act == Activation::Identity) return false;
        return pre.cwiseAbs().minCoeff() < margin;
    };
    if (close(tape.pre_a, net.branch_a.act)) return true;
    if (close(tape.pre_b, net.branch_b.act)) return true;
    for (std::size_t k = 0; k < net.trunk.size(); ++k)
        if (close(tape.trunk_pre[k], net.trunk[k].act)) return true;
    return false;
}

} // namespace

TEST_CASE("identity layer passes input through") {
    TwoBranchNet net;
    net.branch_a = {Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                    Activation::Identity};
    net.branch_b = {Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1),
                    Activation::Identity};
    net.trunk.push_back({Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4),
                         Activation::Identity});
    Eigen::MatrixXd xa(3, 2), xb(1, 2);
    xa << 1, 4, 2, 5, 3, 6;
    xb << -1, -2;
    Eigen::MatrixXd out = forward(net, xa, xb);
    CHECK(out(0, 0) == 1.0);
    CHECK(out(2, 1) == 6.0);
    CHECK(out(3, 0) == -1.0);
}

TEST_CASE("sigmoid unit at zero outputs 0.5") {
    TwoBranchNet net;
    net.branch_a = {Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1),
                    Activation::Identity};
    net.branch_b = {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1),
                    Activation::Identity};
    net.trunk.push_back({Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1),
                         Activation::Sigmoid});
    Eigen::MatrixXd out = forward(net, Eigen::MatrixXd::Random(2, 3),
                                  Eigen::MatrixXd::Random(1, 3));
    for (int j = 0; j < 3; ++j) CHECK(out(0, j) == 0.5);
}

TEST_CASE("activation closed forms") {
    Eigen::MatrixXd z(1, 1);
    z << -1.0;
    CHECK(apply_activation(z, Activation::Elu)(0, 0) ==
          doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));
    CHECK(apply_activation(z, Activation::Relu)(0, 0) == 0.0);

    // ELU continuity at the kink
    Eigen::MatrixXd zp(1, 1), zm(1, 1);
    zp << 1e-9;
    zm << -1e-9;
    CHECK(std::fabs(apply_activation(zp, Activation::Elu)(0, 0) -
                    apply_activation(zm, Activation::Elu)(0, 0)) < 1e-8);

    // ReLU derivative at exactly 0 is 0
    Eigen::MatrixXd z0(1, 1);
    z0 << 0.0;
    CHECK(activation_derivative(z0, Activation::Relu)(0, 0) == 0.0);
}

TEST_CASE("bce loss values") {
    Eigen::MatrixXd p(1, 1), t(1, 1);
    p << 0.5;
    t << 1.0;
    CHECK(bce_loss(p, t) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    p << 0.9;
    CHECK(bce_loss(p, t) == doctest::Approx(-std::log(0.9)).epsilon(1e-12));

    Eigen::MatrixXd p2(1, 2), t2(1, 2);
    p2 << 0.5, 0.5;
    t2 << 1.0, 0.0;
    CHECK(bce_loss(p2, t2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Eigen::MatrixXd wrong(2, 1);
    CHECK_THROWS_AS(bce_loss(p2, wrong), ShapeError);
}

TEST_CASE("backward: zero output gradient yields zero parameter gradients") {
    Rng rng(21);
    TwoBranchNet net = random_net(rng, Activation::Sigmoid);
    Eigen::MatrixXd xa = Eigen::MatrixXd::Random(4, 3);
    Eigen::MatrixXd xb = Eigen::MatrixXd::Random(1, 3);
    Tape tape;
    forward(net, xa, xb, &tape);
    Gradients g = backward(net, tape, Eigen::MatrixXd::Zero(1, 3));
    CHECK(g.flat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward: single linear unit chain rule") {
    // y = w*x, loss = y, x = 2 -> dL/dw = 2
    TwoBranchNet net;
    net.branch_a = {Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::VectorXd::Zero(1),
                    Activation::Identity};
    net.branch_b = {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1),
                    Activation::Identity};
    Eigen::MatrixXd trunk_w(1, 2);
    trunk_w << 1.0, 0.0;
    net.trunk.push_back({trunk_w, Eigen::VectorXd::Zero(1), Activation::Identity});
    Eigen::MatrixXd xa(1, 1), xb(1, 1);
    xa << 2.0;
    xb << 0.0;
    Tape tape;
    forward(net, xa, xb, &tape);
    Gradients g = backward(net, tape, Eigen::MatrixXd::Ones(1, 1));
    CHECK(g.dW[0](0, 0) == doctest::Approx(2.0)); // d/dw_a (trunk_w * w_a * x) = x
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(77);
    int checked_nets = 0;
    while (checked_nets < 10) {
        TwoBranchNet net = random_net(rng, rng.uniform() < 0.5 ? Activation::Sigmoid
                                                               : Activation::Relu);
        Eigen::MatrixXd xa(4, 2), xb(1, 2);
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 4; ++i) xa(i, j) = rng.uniform();
            xb(0, j) = rng.normal();
        }
        Tape tape;
        forward(net, xa, xb, &tape);
        if (near_kink(net, tape, 1e-3)) continue; // FD would straddle the kink

        Eigen::MatrixXd c(1, 2);
        c << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
        Gradients g = backward(net, tape, c);
        Eigen::VectorXd analytic = g.flat();

        Eigen::VectorXd theta = net.params_flat();
        const double h = 1e-5;
        double max_rel = 0.0;
        for (int probe = 0; probe < 120; ++probe) {
            auto idx = static_cast<Eigen::Index>(rng.uniform() *
                                                 static_cast<double>(theta.size()));
            Eigen::VectorXd tp = theta, tm = theta;
            tp(idx) += h;
            tm(idx) -= h;
            TwoBranchNet np = net, nm = net;
            np.set_params_flat(tp);
            nm.set_params_flat(tm);
            double fd = (linear_loss(np, xa, xb, c) - linear_loss(nm, xa, xb, c)) /
                        (2.0 * h);
            double denom = std::max({std::fabs(fd), std::fabs(analytic(idx)), 1e-4});
            max_rel = std::max(max_rel, std::fabs(fd - analytic(idx)) / denom);
        }
        CHECK(max_rel < 1e-4);
        ++checked_nets;
    }
}

TEST_CASE("shape mismatches are rejected before any computation") {
    Rng rng(5);
    TwoBranchNet net = random_net(rng, Activation::Sigmoid);
    CHECK_THROWS_AS(forward(net, Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(1, 2)),
                    ShapeError);
    CHECK_THROWS_AS(forward(net, Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd::Zero(2, 2)),
                    ShapeError);
    CHECK_THROWS_AS(forward(net, Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd::Zero(1, 3)),
                    ShapeError);
    CHECK_THROWS_AS(net.set_params_flat(Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("adam update") {
    SUBCASE("zero gradient is a fixed point") {
        AdamState s = AdamState::init(3, 0.001, 0.0);
        Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 1.5);
        adam_step(s, p, Eigen::VectorXd::Zero(3));
        CHECK(p == Eigen::VectorXd::Constant(3, 1.5));
        CHECK(s.step_count == 1);
    }
    SUBCASE("first step moves by about lr in the gradient direction") {
        AdamState s = AdamState::init(1, 0.001, 0.0);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
        adam_step(s, p, Eigen::VectorXd::Ones(1));
        CHECK(p(0) == doctest::Approx(-0.001).epsilon(1e-4));
    }
    SUBCASE("inverse-time decay") {
        AdamState s = AdamState::init(1, 0.001, 0.001);
        s.step_count = 1000;
        CHECK(s.effective_lr() == doctest::Approx(0.0005).epsilon(1e-12));
    }
    SUBCASE("non-finite gradient raises divergence error") {
        AdamState s = AdamState::init(1, 0.001, 0.0);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
        Eigen::VectorXd g(1);
        g << std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(adam_step(s, p, g), TrainingDivergenceError);
    }
}
