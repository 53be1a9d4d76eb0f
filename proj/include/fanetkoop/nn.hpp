#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fanetkoop/common.hpp"

namespace fanetkoop::nn {

enum class Activation { Tanh, Identity };

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
    Activation activation = Activation::Identity;
};

struct Mlp {
    std::vector<DenseLayer> layers;

    int input_dim() const;
    int output_dim() const;
    int parameter_count() const;
};

/// Activation record of one forward pass. Batch convention throughout:
/// rows are samples, columns are features.
struct ForwardTape {
    std::vector<Eigen::MatrixXd> inputs;   // per layer, N x in
    std::vector<Eigen::MatrixXd> preacts;  // per layer, N x out
};

struct MlpGrads {
    std::vector<Eigen::MatrixXd> dweight;
    std::vector<Eigen::VectorXd> dbias;

    void resize_like(const Mlp& mlp);
    void set_zero();
};

/// Glorot-uniform matrix, bound sqrt(6 / (fan_in + fan_out)).
Eigen::MatrixXd glorot_matrix(int out, int in, Rng& rng);

/// Dense layers with tanh on hidden layers and identity on the output layer,
/// Glorot-uniform initialized from the given stream.
Mlp make_mlp(const std::vector<int>& dims, Rng& rng);

/// Batched forward pass; records intermediates into `tape` when non-null.
Eigen::MatrixXd forward(const Mlp& mlp, const Eigen::MatrixXd& x, ForwardTape* tape = nullptr);

/// Single-vector convenience overload.
Eigen::VectorXd forward(const Mlp& mlp, const Eigen::VectorXd& x, ForwardTape* tape = nullptr);

/// Reverse-mode pass over a recorded forward. Accumulates parameter
/// gradients into `grads` (which must match the mlp's shapes) and returns
/// the gradient with respect to the input batch.
Eigen::MatrixXd backward(const Mlp& mlp, const ForwardTape& tape,
                         const Eigen::MatrixXd& output_gradient, MlpGrads& grads);

// ---------------------------------------------------------------------------
// Adaptive-moment optimizer over a flat list of parameter tensors.
// ---------------------------------------------------------------------------

/// Mutable view of one parameter tensor paired with its gradient buffer.
struct TensorRef {
    double* value = nullptr;
    double* grad = nullptr;
    Eigen::Index size = 0;
};

inline TensorRef tensor_ref(Eigen::MatrixXd& v, Eigen::MatrixXd& g) {
    return {v.data(), g.data(), v.size()};
}
inline TensorRef tensor_ref(Eigen::VectorXd& v, Eigen::VectorXd& g) {
    return {v.data(), g.data(), v.size()};
}

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<Eigen::VectorXd> m;  // first moments, one per tensor
    std::vector<Eigen::VectorXd> v;  // second moments
    long step = 0;
};

/// One bias-corrected update. The state is sized lazily on first use and
/// must afterwards always see the same tensor list.
void adam_step(AdamState& state, const AdamConfig& cfg, const std::vector<TensorRef>& tensors);

/// Scale gradients so their global norm does not exceed max_norm.
/// Returns the pre-clip norm. max_norm <= 0 disables clipping.
double clip_gradients(const std::vector<TensorRef>& tensors, double max_norm);

}  // namespace fanetkoop::nn
