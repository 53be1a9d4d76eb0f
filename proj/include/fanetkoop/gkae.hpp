#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fanetkoop/graph.hpp"
#include "fanetkoop/koopman.hpp"

namespace fanetkoop {

/// One message-passing layer: H' = act(A H Theta^T + bias) where A is the
/// row-normalized affinity built from W(t) with self-loops.
struct GnnLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
    nn::Activation activation = nn::Activation::Identity;
};

struct GkaeMeta {
    int node_count = 0;     // L, fixed at creation
    int embedding_dim = 0;  // b
    int latent_dim = 0;     // M
    int horizon = 0;
    double affinity_scale = 100.0;  // d0 in a_ij = 1/(1 + d_ij/d0)
    bool binary_adjacency = false;  // unit edge affinities instead
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

/// Graph Koopman autoencoder: 2 GNN encoder layers with mean pooling, the
/// 11-layer KAE over graph embeddings, and a 2-layer dense graph decoder
/// back to the full feature matrix (15 layers in total). The graph decoder
/// maps the pooled graph-level embedding, so the model is tied to the node
/// count it was trained on.
struct GkaeModel {
    std::vector<GnnLayer> graph_encoder;  // (L-1) -> hidden -> b per node
    KaeModel kae;                         // input dim b, latent dim M
    nn::Mlp graph_decoder;                // b -> hidden -> L*(L-1)
    Normalizer normalizer;                // per feature-matrix entry
    GkaeMeta meta;

    int parameter_count() const;
    int layer_count() const;
};

GkaeModel make_gkae(int node_count, const TrainConfig& cfg, Rng& rng);

/// Row-normalized affinity matrix for the GNN: self-loops of weight 1 plus
/// 1/(1 + d_ij/d0) for each edge of the snapshot (or 1 when binary).
Eigen::MatrixXd gnn_adjacency(const GraphSnapshot& snapshot, double affinity_scale,
                              bool binary_adjacency);

/// Two message-passing layers over the snapshot followed by mean pooling:
/// g(t), the graph embedding.
Eigen::VectorXd encode_graph(const GkaeModel& model, const GraphSnapshot& snapshot);

/// Dense decode of an embedding back to a (denormalized, strictly positive)
/// L x (L-1) feature matrix.
Eigen::MatrixXd decode_graph(const GkaeModel& model, const Eigen::VectorXd& embedding);

/// Predicted feature matrices for steps t+1..t+p via the latent flow
/// G(t) -> g(t) -> h(t) -> K^l h(t) -> g(t+l) -> S(t+l).
std::vector<Eigen::MatrixXd> gkae_rollout(const GkaeModel& model, const GraphSnapshot& snapshot,
                                          int steps);

/// End-to-end training over a snapshot sequence. Deterministic per seed.
GkaeModel train_gkae(const std::vector<GraphSnapshot>& snapshots, const TrainConfig& cfg,
                     std::uint64_t seed, TrainLog* log = nullptr);

struct CentralizedPrediction {
    std::vector<SinrSnapshot> sinr;       // predicted feature matrices
    std::vector<IsolationFlags> isolation;
};

/// Rollout plus isolation flags via the edge reconstruction rule.
CentralizedPrediction predict_centralized(const GkaeModel& model, const GraphSnapshot& snapshot,
                                          int steps, double kappa);

namespace detail {

struct GkaeWorkspace {
    Eigen::MatrixXd g1_weight_grad, g2_weight_grad;
    Eigen::VectorXd g1_bias_grad, g2_bias_grad;
    KaeWorkspace kae_ws;
    nn::MlpGrads gdec_grads;

    void resize_like(const GkaeModel& model);
    void set_zero();
};

/// Normalized per-node features and per-step adjacencies, precomputed once.
struct GkaeInputs {
    std::vector<Eigen::MatrixXd> node_features;  // per t, L x (L-1), normalized
    std::vector<Eigen::MatrixXd> adjacency;      // per t, L x L
};

GkaeInputs gkae_inputs(const GkaeModel& model, const std::vector<GraphSnapshot>& snapshots);

double gkae_loss_grad(const GkaeModel& model, const GkaeInputs& inputs,
                      const std::vector<int>& starts, int horizon, GkaeWorkspace& ws);

std::vector<nn::TensorRef> gkae_tensor_refs(GkaeModel& model, GkaeWorkspace& ws);

}  // namespace detail

}  // namespace fanetkoop
