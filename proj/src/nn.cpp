#include "fanetkoop/nn.hpp"

#include <cmath>
#include <string>

namespace fanetkoop::nn {

int Mlp::input_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int Mlp::output_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

int Mlp::parameter_count() const {
    int count = 0;
    for (const auto& layer : layers)
        count += static_cast<int>(layer.weight.size() + layer.bias.size());
    return count;
}

void MlpGrads::resize_like(const Mlp& mlp) {
    dweight.resize(mlp.layers.size());
    dbias.resize(mlp.layers.size());
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        dweight[i].setZero(mlp.layers[i].weight.rows(), mlp.layers[i].weight.cols());
        dbias[i].setZero(mlp.layers[i].bias.size());
    }
}

void MlpGrads::set_zero() {
    for (auto& w : dweight) w.setZero();
    for (auto& b : dbias) b.setZero();
}

Eigen::MatrixXd glorot_matrix(int out, int in, Rng& rng) {
    if (in <= 0 || out <= 0) throw ValidationError("glorot_matrix: dims must be positive");
    double a = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-a, a);
    return w;
}

Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
    if (dims.size() < 2) throw ValidationError("make_mlp: need at least input and output dims");
    Mlp mlp;
    mlp.layers.reserve(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        int in = dims[i], out = dims[i + 1];
        DenseLayer layer;
        layer.weight = glorot_matrix(out, in, rng);
        layer.bias = Eigen::VectorXd::Zero(out);
        layer.activation =
            (i + 2 < dims.size()) ? Activation::Tanh : Activation::Identity;
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

Eigen::MatrixXd forward(const Mlp& mlp, const Eigen::MatrixXd& x, ForwardTape* tape) {
    if (x.cols() != mlp.input_dim())
        throw ValidationError("forward: input has " + std::to_string(x.cols()) +
                              " features, expected " + std::to_string(mlp.input_dim()));
    if (tape) {
        tape->inputs.clear();
        tape->preacts.clear();
        tape->inputs.reserve(mlp.layers.size());
        tape->preacts.reserve(mlp.layers.size());
    }
    Eigen::MatrixXd h = x;
    for (const auto& layer : mlp.layers) {
        if (tape) tape->inputs.push_back(h);
        Eigen::MatrixXd pre = (h * layer.weight.transpose()).rowwise() + layer.bias.transpose();
        if (tape) tape->preacts.push_back(pre);
        h = (layer.activation == Activation::Tanh) ? pre.array().tanh().matrix()
                                                   : std::move(pre);
    }
    return h;
}

Eigen::VectorXd forward(const Mlp& mlp, const Eigen::VectorXd& x, ForwardTape* tape) {
    Eigen::MatrixXd out = forward(mlp, Eigen::MatrixXd(x.transpose()), tape);
    return out.row(0).transpose();
}

Eigen::MatrixXd backward(const Mlp& mlp, const ForwardTape& tape,
                         const Eigen::MatrixXd& output_gradient, MlpGrads& grads) {
    if (tape.inputs.size() != mlp.layers.size() || grads.dweight.size() != mlp.layers.size())
        throw ValidationError("backward: tape/grads do not match the network");
    Eigen::MatrixXd dy = output_gradient;
    for (int i = static_cast<int>(mlp.layers.size()) - 1; i >= 0; --i) {
        const auto& layer = mlp.layers[static_cast<std::size_t>(i)];
        if (dy.rows() != tape.preacts[static_cast<std::size_t>(i)].rows() ||
            dy.cols() != layer.weight.rows())
            throw ValidationError("backward: gradient shape does not match tape");
        if (layer.activation == Activation::Tanh) {
            // d tanh(y) = 1 - tanh(y)^2
            Eigen::ArrayXXd t = tape.preacts[static_cast<std::size_t>(i)].array().tanh();
            dy = (dy.array() * (1.0 - t.square())).matrix();
        }
        grads.dweight[static_cast<std::size_t>(i)].noalias() +=
            dy.transpose() * tape.inputs[static_cast<std::size_t>(i)];
        grads.dbias[static_cast<std::size_t>(i)] += dy.colwise().sum().transpose();
        dy = dy * layer.weight;
    }
    return dy;
}

void adam_step(AdamState& state, const AdamConfig& cfg, const std::vector<TensorRef>& tensors) {
    if (state.m.empty()) {
        state.m.resize(tensors.size());
        state.v.resize(tensors.size());
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            state.m[i] = Eigen::VectorXd::Zero(tensors[i].size);
            state.v[i] = Eigen::VectorXd::Zero(tensors[i].size);
        }
    }
    if (state.m.size() != tensors.size())
        throw ValidationError("adam_step: tensor list changed size");
    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const TensorRef& t = tensors[i];
        if (state.m[i].size() != t.size)
            throw ValidationError("adam_step: tensor shape changed");
        Eigen::Map<Eigen::VectorXd> value(t.value, t.size);
        Eigen::Map<const Eigen::VectorXd> grad(t.grad, t.size);
        auto& m = state.m[i];
        auto& v = state.v[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v.array().matrix() + (1.0 - cfg.beta2) * grad.array().square().matrix();
        value.array() -= cfg.learning_rate * (m.array() / bc1) /
                         ((v.array() / bc2).sqrt() + cfg.epsilon);
    }
}

double clip_gradients(const std::vector<TensorRef>& tensors, double max_norm) {
    double sq = 0.0;
    for (const auto& t : tensors) {
        Eigen::Map<const Eigen::VectorXd> grad(t.grad, t.size);
        sq += grad.squaredNorm();
    }
    double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        double scale = max_norm / norm;
        for (const auto& t : tensors) {
            Eigen::Map<Eigen::VectorXd> grad(t.grad, t.size);
            grad *= scale;
        }
    }
    return norm;
}

}  // namespace fanetkoop::nn
