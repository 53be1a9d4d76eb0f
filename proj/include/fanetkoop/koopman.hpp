#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fanetkoop/nn.hpp"

namespace fanetkoop {

/// The finite-dimensional Koopman operator restricted to the learned
/// latent subspace; applied as z(t+1) = K z(t).
using KoopmanMatrix = Eigen::MatrixXd;

/// Least-squares fit of K from consecutive-state pairs stacked as rows:
/// argmin ||X K^T - Y||_F, minimum-norm when rank-deficient.
KoopmanMatrix dmd_fit_pairs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// DMD over one trajectory z(0..T): pairs (z(t), z(t+1)).
KoopmanMatrix dmd_fit(const std::vector<Eigen::VectorXd>& states);

/// Per-feature affine normalization in dB space: x -> (to_db(x) - mean) / std.
/// Fitted on the training split; std entries are floored to keep the
/// transform invertible on constant features.
struct Normalizer {
    Eigen::VectorXd mean;  // dB domain
    Eigen::VectorXd std;   // dB domain, >= std_floor
    double db_floor = 1e-12;
    bool floored = false;  // set when any std hit the floor

    static Normalizer fit(const Eigen::MatrixXd& raw_rows, int train_rows,
                          double db_floor = 1e-12, double std_floor = 1e-6);

    Eigen::MatrixXd normalize(const Eigen::MatrixXd& raw_rows) const;
    Eigen::VectorXd normalize(const Eigen::VectorXd& raw) const;
    /// Inverse transform back to linear ratio. Normalized values are clamped
    /// to +-clamp_sigma before exponentiation so predictions stay finite and
    /// strictly positive.
    Eigen::MatrixXd denormalize(const Eigen::MatrixXd& normed, double clamp_sigma) const;
    Eigen::VectorXd denormalize(const Eigen::VectorXd& normed, double clamp_sigma) const;
};

struct KaeMeta {
    int input_dim = 0;
    int latent_dim = 0;
    int horizon = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

/// Koopman autoencoder: 5 encoder layers, the Koopman matrix as one
/// bias-free linear map, 5 decoder layers (11 layers in total).
struct KaeModel {
    nn::Mlp encoder;
    KoopmanMatrix koopman;
    nn::Mlp decoder;
    Normalizer normalizer;
    KaeMeta meta;

    int parameter_count() const;
    int layer_count() const;
};

/// Predictions are clamped to this many normalized units before
/// denormalization, bounding rollouts that drift off the data manifold.
inline constexpr double kPredictionClampSigma = 4.0;

/// Hyperparameters shared by the KAE and GKAE trainers.
struct TrainConfig {
    int latent_dim = 16;      // M
    int embedding_dim = 32;   // b (graph models only)
    int hidden_width = 64;
    int horizon = 20;         // L_h, rollout steps covered by the loss
    double learning_rate = 1e-3;
    int epochs = 40;
    int batch_size = 32;
    double split_fraction = 0.8;
    double grad_clip = 1.0;      // global-norm clip, <= 0 disables
    double lr_decay = 0.5;       // stepped decay factor, applied in thirds
    double affinity_scale = 100.0;   // d0 in the GNN edge affinity
    bool binary_adjacency = false;   // unit edge affinities in the GNN
    double db_floor = 1e-12;
    double std_floor = 1e-6;

    void validate() const;
    /// Learning rate for an epoch under the stepped thirds schedule.
    double epoch_lr(int epoch) const;
    /// Rows of an N-row series that belong to the training split.
    int train_rows(int total_rows) const;
};

struct EpochLoss {
    int epoch = 0;       // 0 = before training
    double loss = 0.0;   // mean per-window multi-step loss
};

using TrainLog = std::vector<EpochLoss>;

/// Build an untrained model (Glorot MLPs, identity Koopman matrix).
KaeModel make_kae(int input_dim, const TrainConfig& cfg, Rng& rng);

/// Multi-step reconstruction sequence decoder(K^l encoder(normalize(x0)))
/// for l = 0..steps, denormalized; element 0 is the pure reconstruction.
std::vector<Eigen::VectorXd> rollout(const KaeModel& model, const Eigen::VectorXd& x0,
                                     int steps, double clamp_sigma = kPredictionClampSigma);

/// Multi-step loss over one window x(t..t+horizon-1), computed in
/// normalized space: sum_l ||x(t+l) - decoder(K^l encoder(x(t)))||^2.
double kae_loss(const KaeModel& model, const Eigen::MatrixXd& raw_window, int horizon);

/// Fit normalizer and model on the training split of the series
/// (rows are time steps). Deterministic per seed.
KaeModel train_kae(const Eigen::MatrixXd& series, const TrainConfig& cfg, std::uint64_t seed,
                   TrainLog* log = nullptr);

/// Predict the next P SINR vectors (linear ratio, strictly positive) from
/// the current observation. P = 0 yields an empty sequence.
std::vector<Eigen::VectorXd> predict_distributed(const KaeModel& model,
                                                 const Eigen::VectorXd& current, int steps);

namespace detail {

/// Batched loss + gradients of the multi-step objective for a set of window
/// starts. Exposed for the trainer and for finite-difference tests.
struct KaeWorkspace {
    nn::MlpGrads enc_grads;
    nn::MlpGrads dec_grads;
    Eigen::MatrixXd k_grad;

    void resize_like(const KaeModel& model);
    void set_zero();
};

double kae_loss_grad(const KaeModel& model, const Eigen::MatrixXd& normalized_series,
                     const std::vector<int>& starts, int horizon, KaeWorkspace& ws);

std::vector<nn::TensorRef> kae_tensor_refs(KaeModel& model, KaeWorkspace& ws);

}  // namespace detail

}  // namespace fanetkoop
