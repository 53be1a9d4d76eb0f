#include <doctest.h>

#include <cmath>
#include <vector>

#include "fanetkoop/nn.hpp"

using namespace fanetkoop;
using nn::Activation;

namespace {

// finite-difference gradient of loss = ||f(x) - target||^2 w.r.t. every
// parameter of the net
double net_loss(const nn::Mlp& mlp, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
    return (nn::forward(mlp, x) - target).squaredNorm();
}

double max_rel_grad_error(nn::Mlp mlp, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                          double h = 1e-5) {
    nn::ForwardTape tape;
    Eigen::VectorXd out = nn::forward(mlp, x, &tape);
    nn::MlpGrads grads;
    grads.resize_like(mlp);
    Eigen::MatrixXd dy = 2.0 * (out - target).transpose();
    nn::backward(mlp, tape, dy, grads);

    double worst = 0.0;
    for (std::size_t li = 0; li < mlp.layers.size(); ++li) {
        auto check_param = [&](double& p, double analytic) {
            double save = p;
            p = save + h;
            double up = net_loss(mlp, x, target);
            p = save - h;
            double down = net_loss(mlp, x, target);
            p = save;
            double fd = (up - down) / (2.0 * h);
            double scale = std::max({std::abs(fd), std::abs(analytic), 1e-8});
            worst = std::max(worst, std::abs(fd - analytic) / scale);
        };
        auto& layer = mlp.layers[li];
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                check_param(layer.weight(r, c), grads.dweight[li](r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            check_param(layer.bias(r), grads.dbias[li](r));
    }
    return worst;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("forward: identity layer passes input through") {
    nn::Mlp mlp;
    mlp.layers.push_back({Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                          Activation::Identity});
    Eigen::VectorXd x(3);
    x << 1.5, -2.0, 0.25;
    CHECK(nn::forward(mlp, x) == x);
}

TEST_CASE("forward: tanh net maps zero to zero") {
    Rng rng(1);
    nn::Mlp mlp = nn::make_mlp({4, 8, 8, 2}, rng);
    Eigen::VectorXd out = nn::forward(mlp, Eigen::VectorXd(Eigen::VectorXd::Zero(4)));
    CHECK(out.norm() == 0.0);  // zero biases, tanh(0) = 0
}

TEST_CASE("forward: matches independent matrix arithmetic on a 2-layer net") {
    Rng rng(2);
    nn::Mlp mlp = nn::make_mlp({3, 5, 2}, rng);
    Eigen::VectorXd x(3);
    x << 0.3, -0.7, 1.1;
    Eigen::VectorXd h = (mlp.layers[0].weight * x + mlp.layers[0].bias);
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = std::tanh(h(i));
    Eigen::VectorXd expect = mlp.layers[1].weight * h + mlp.layers[1].bias;
    Eigen::VectorXd got = nn::forward(mlp, x);
    CHECK((got - expect).norm() < 1e-12);
}

TEST_CASE("forward: composition equals nested per-layer forwards") {
    Rng rng(3);
    nn::Mlp mlp = nn::make_mlp({4, 6, 5, 3}, rng);
    Eigen::VectorXd x(4);
    x << 1, 2, -1, 0.5;
    Eigen::VectorXd stagewise = x;
    for (const auto& layer : mlp.layers) {
        nn::Mlp single;
        single.layers.push_back(layer);
        stagewise = nn::forward(single, Eigen::VectorXd(stagewise));
    }
    CHECK((nn::forward(mlp, x) - stagewise).norm() == 0.0);
}

TEST_CASE("backward: quadratic form has closed-form input gradient") {
    // f(x) = ||W x||^2 / 2, gradient = W^T W x
    Rng rng(4);
    Eigen::MatrixXd w = nn::glorot_matrix(4, 3, rng);
    nn::Mlp mlp;
    mlp.layers.push_back({w, Eigen::VectorXd::Zero(4), Activation::Identity});
    Eigen::VectorXd x(3);
    x << 0.4, -1.2, 2.0;
    nn::ForwardTape tape;
    Eigen::VectorXd out = nn::forward(mlp, x, &tape);
    nn::MlpGrads grads;
    grads.resize_like(mlp);
    Eigen::MatrixXd input_grad = nn::backward(mlp, tape, out.transpose(), grads);
    Eigen::VectorXd expect = w.transpose() * w * x;
    CHECK((input_grad.row(0).transpose() - expect).norm() < 1e-12);
}

TEST_CASE("backward: matches central finite differences on random nets") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        int in = 2 + static_cast<int>(rng.uniform() * 3);
        int mid = 3 + static_cast<int>(rng.uniform() * 4);
        int out = 1 + static_cast<int>(rng.uniform() * 3);
        nn::Mlp mlp = nn::make_mlp({in, mid, mid, out}, rng);
        for (auto& layer : mlp.layers)  // nonzero biases exercise those grads
            for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
                layer.bias(i) = rng.uniform(-0.3, 0.3);
        Eigen::VectorXd x(in), target(out);
        for (int i = 0; i < in; ++i) x(i) = rng.uniform(-1, 1);
        for (int i = 0; i < out; ++i) target(i) = rng.uniform(-1, 1);
        CHECK(max_rel_grad_error(mlp, x, target) < 1e-4);
    }
}

TEST_CASE("backward: zero output gradient yields zero parameter gradients") {
    Rng rng(6);
    nn::Mlp mlp = nn::make_mlp({3, 4, 2}, rng);
    Eigen::VectorXd x(3);
    x << 1, -1, 2;
    nn::ForwardTape tape;
    nn::forward(mlp, x, &tape);
    nn::MlpGrads grads;
    grads.resize_like(mlp);
    Eigen::MatrixXd input_grad =
        nn::backward(mlp, tape, Eigen::MatrixXd::Zero(1, 2), grads);
    CHECK(input_grad.isZero(0.0));
    for (const auto& g : grads.dweight) CHECK(g.isZero(0.0));
    for (const auto& g : grads.dbias) CHECK(g.isZero(0.0));
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Eigen::VectorXd p(2), g(2);
    p << 1.0, -2.0;
    g << 0.0, 0.0;
    nn::AdamState state;
    nn::adam_step(state, {}, {nn::tensor_ref(p, g)});
    CHECK(p(0) == 1.0);
    CHECK(p(1) == -2.0);
}

TEST_CASE("adam: moves against the gradient sign") {
    Eigen::VectorXd p(2), g(2);
    p << 0.0, 0.0;
    g << 3.0, -0.5;
    nn::AdamState state;
    for (int i = 0; i < 10; ++i) nn::adam_step(state, {}, {nn::tensor_ref(p, g)});
    CHECK(p(0) < 0.0);
    CHECK(p(1) > 0.0);
}

TEST_CASE("adam: quadratic bowl converges and matches an oracle loop") {
    // oracle: textbook bias-corrected update written out longhand
    double op[2] = {1.0, 1.0}, om[2] = {0, 0}, ov[2] = {0, 0};
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= 200; ++t) {
        for (int i = 0; i < 2; ++i) {
            double grad = 2.0 * op[i];
            om[i] = b1 * om[i] + (1 - b1) * grad;
            ov[i] = b2 * ov[i] + (1 - b2) * grad * grad;
            double mh = om[i] / (1 - std::pow(b1, t));
            double vh = ov[i] / (1 - std::pow(b2, t));
            op[i] -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
    double oracle_norm = std::hypot(op[0], op[1]);
    CHECK(oracle_norm < 1e-3);

    Eigen::VectorXd p(2);
    p << 1.0, 1.0;
    nn::AdamState state;
    nn::AdamConfig cfg;
    cfg.learning_rate = 0.1;
    for (int t = 1; t <= 200; ++t) {
        Eigen::VectorXd g = 2.0 * p;
        nn::adam_step(state, cfg, {nn::tensor_ref(p, g)});
    }
    CHECK(p.norm() < 1e-3);
    CHECK(std::abs(p(0) - op[0]) < 1e-12);
    CHECK(std::abs(p(1) - op[1]) < 1e-12);
}

TEST_CASE("init: identical seeds give identical networks") {
    Rng a(123), b(123);
    nn::Mlp ma = nn::make_mlp({3, 7, 2}, a);
    nn::Mlp mb = nn::make_mlp({3, 7, 2}, b);
    for (std::size_t i = 0; i < ma.layers.size(); ++i)
        CHECK(ma.layers[i].weight == mb.layers[i].weight);
}

TEST_CASE("clip: rescales to the requested global norm") {
    Eigen::VectorXd p(2), g(2);
    p << 0, 0;
    g << 3.0, 4.0;  // norm 5
    double norm = nn::clip_gradients({nn::tensor_ref(p, g)}, 1.0);
    CHECK(norm == doctest::Approx(5.0));
    CHECK(std::hypot(g(0), g(1)) == doctest::Approx(1.0));
    g << 0.3, 0.4;
    nn::clip_gradients({nn::tensor_ref(p, g)}, 1.0);  // under the cap: untouched
    CHECK(g(0) == 0.3);
    CHECK(g(1) == 0.4);
}

TEST_CASE("shape mismatches are rejected") {
    Rng rng(9);
    nn::Mlp mlp = nn::make_mlp({3, 4, 2}, rng);
    Eigen::VectorXd wrong(5);
    wrong.setZero();
    CHECK_THROWS_AS(nn::forward(mlp, wrong), ValidationError);
}

}  // TEST_SUITE
