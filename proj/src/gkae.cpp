#include "fanetkoop/gkae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fanetkoop {

namespace {

Eigen::VectorXd flatten_features(const Eigen::MatrixXd& s) {
    // row-major: row i's senders stay contiguous (on-disk column order)
    Eigen::VectorXd flat(s.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index c = 0; c < s.cols(); ++c) flat(k++) = s(i, c);
    return flat;
}

Eigen::MatrixXd unflatten_features(const Eigen::VectorXd& flat, int node_count) {
    int cols = node_count - 1;
    if (flat.size() != static_cast<Eigen::Index>(node_count) * cols)
        throw ValidationError("unflatten_features: size mismatch");
    Eigen::MatrixXd s(node_count, cols);
    Eigen::Index k = 0;
    for (int i = 0; i < node_count; ++i)
        for (int c = 0; c < cols; ++c) s(i, c) = flat(k++);
    return s;
}

/// Per-node features normalized with the flattened per-entry stats.
Eigen::MatrixXd normalize_features(const Normalizer& n, const Eigen::MatrixXd& s) {
    Eigen::MatrixXd normed =
        n.normalize(Eigen::MatrixXd(flatten_features(s).transpose()));
    return unflatten_features(normed.row(0).transpose(), static_cast<int>(s.rows()));
}

struct GraphEncTape {
    Eigen::MatrixXd p1, y1, p2;  // stacked (B*L) x dim intermediates
};

/// Forward through both GNN layers and mean pooling for a batch of time
/// indices; returns the B x b embedding matrix.
Eigen::MatrixXd encode_batch(const GkaeModel& model, const detail::GkaeInputs& in,
                             const std::vector<int>& ts, GraphEncTape* tape) {
    const int L = model.meta.node_count;
    const auto& g1 = model.graph_encoder[0];
    const auto& g2 = model.graph_encoder[1];
    const Eigen::Index B = static_cast<Eigen::Index>(ts.size());

    Eigen::MatrixXd p1(B * L, g1.weight.cols());
    for (Eigen::Index k = 0; k < B; ++k)
        p1.middleRows(k * L, L).noalias() =
            in.adjacency[static_cast<std::size_t>(ts[static_cast<std::size_t>(k)])] *
            in.node_features[static_cast<std::size_t>(ts[static_cast<std::size_t>(k)])];
    Eigen::MatrixXd y1 = (p1 * g1.weight.transpose()).rowwise() + g1.bias.transpose();
    Eigen::MatrixXd h1 = y1.array().tanh().matrix();

    Eigen::MatrixXd p2(B * L, g2.weight.cols());
    for (Eigen::Index k = 0; k < B; ++k)
        p2.middleRows(k * L, L).noalias() =
            in.adjacency[static_cast<std::size_t>(ts[static_cast<std::size_t>(k)])] *
            h1.middleRows(k * L, L);
    Eigen::MatrixXd y2 = (p2 * g2.weight.transpose()).rowwise() + g2.bias.transpose();

    Eigen::MatrixXd pooled(B, g2.weight.rows());
    for (Eigen::Index k = 0; k < B; ++k)
        pooled.row(k) = y2.middleRows(k * L, L).colwise().mean();

    if (tape) {
        tape->p1 = std::move(p1);
        tape->y1 = std::move(y1);
        tape->p2 = std::move(p2);
    }
    return pooled;
}

void encode_backward(const GkaeModel& model, const detail::GkaeInputs& in,
                     const std::vector<int>& ts, const GraphEncTape& tape,
                     const Eigen::MatrixXd& d_pooled, detail::GkaeWorkspace& ws) {
    const int L = model.meta.node_count;
    const auto& g2 = model.graph_encoder[1];
    const Eigen::Index B = static_cast<Eigen::Index>(ts.size());

    // mean pooling spreads the embedding gradient evenly over node rows
    Eigen::MatrixXd dy2(B * L, d_pooled.cols());
    for (Eigen::Index k = 0; k < B; ++k)
        dy2.middleRows(k * L, L) = (d_pooled.row(k) / static_cast<double>(L)).replicate(L, 1);

    ws.g2_weight_grad.noalias() += dy2.transpose() * tape.p2;
    ws.g2_bias_grad += dy2.colwise().sum().transpose();
    Eigen::MatrixXd dp2 = dy2 * g2.weight;

    Eigen::MatrixXd dh1(B * L, dp2.cols());
    for (Eigen::Index k = 0; k < B; ++k)
        dh1.middleRows(k * L, L).noalias() =
            in.adjacency[static_cast<std::size_t>(ts[static_cast<std::size_t>(k)])].transpose() *
            dp2.middleRows(k * L, L);
    Eigen::MatrixXd dy1 =
        (dh1.array() * (1.0 - tape.y1.array().tanh().square())).matrix();

    ws.g1_weight_grad.noalias() += dy1.transpose() * tape.p1;
    ws.g1_bias_grad += dy1.colwise().sum().transpose();
}

Eigen::MatrixXd gather_targets(const detail::GkaeInputs& in, const std::vector<int>& starts,
                               int offset, int flat_dim) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(starts.size()), flat_dim);
    for (std::size_t k = 0; k < starts.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) =
            flatten_features(in.node_features[static_cast<std::size_t>(starts[k] + offset)])
                .transpose();
    return out;
}

}  // namespace

int GkaeModel::parameter_count() const {
    int count = kae.parameter_count() + graph_decoder.parameter_count();
    for (const auto& layer : graph_encoder)
        count += static_cast<int>(layer.weight.size() + layer.bias.size());
    return count;
}

int GkaeModel::layer_count() const {
    return static_cast<int>(graph_encoder.size()) + kae.layer_count() +
           static_cast<int>(graph_decoder.layers.size());
}

GkaeModel make_gkae(int node_count, const TrainConfig& cfg, Rng& rng) {
    if (node_count < 2) throw ValidationError("make_gkae: need at least 2 nodes");
    const int features = node_count - 1;
    const int h = cfg.hidden_width;
    const int b = cfg.embedding_dim;

    GkaeModel model;
    model.graph_encoder.resize(2);
    model.graph_encoder[0] = {nn::glorot_matrix(h, features, rng), Eigen::VectorXd::Zero(h),
                              nn::Activation::Tanh};
    model.graph_encoder[1] = {nn::glorot_matrix(b, h, rng), Eigen::VectorXd::Zero(b),
                              nn::Activation::Identity};
    model.kae = make_kae(b, cfg, rng);
    model.graph_decoder = nn::make_mlp({b, h, node_count * features}, rng);

    model.meta.node_count = node_count;
    model.meta.embedding_dim = b;
    model.meta.latent_dim = cfg.latent_dim;
    model.meta.horizon = cfg.horizon;
    model.meta.affinity_scale = cfg.affinity_scale;
    model.meta.binary_adjacency = cfg.binary_adjacency;
    return model;
}

Eigen::MatrixXd gnn_adjacency(const GraphSnapshot& snapshot, double affinity_scale,
                              bool binary_adjacency) {
    int n = snapshot.node_count;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);  // self-loops
    for (const auto& [i, j] : snapshot.edges)
        a(i, j) = binary_adjacency ? 1.0 : 1.0 / (1.0 + snapshot.weights(i, j) / affinity_scale);
    for (int i = 0; i < n; ++i) a.row(i) /= a.row(i).sum();
    return a;
}

namespace detail {

void GkaeWorkspace::resize_like(const GkaeModel& model) {
    g1_weight_grad.setZero(model.graph_encoder[0].weight.rows(),
                           model.graph_encoder[0].weight.cols());
    g1_bias_grad.setZero(model.graph_encoder[0].bias.size());
    g2_weight_grad.setZero(model.graph_encoder[1].weight.rows(),
                           model.graph_encoder[1].weight.cols());
    g2_bias_grad.setZero(model.graph_encoder[1].bias.size());
    kae_ws.resize_like(model.kae);
    gdec_grads.resize_like(model.graph_decoder);
}

void GkaeWorkspace::set_zero() {
    g1_weight_grad.setZero();
    g1_bias_grad.setZero();
    g2_weight_grad.setZero();
    g2_bias_grad.setZero();
    kae_ws.set_zero();
    gdec_grads.set_zero();
}

GkaeInputs gkae_inputs(const GkaeModel& model, const std::vector<GraphSnapshot>& snapshots) {
    GkaeInputs in;
    in.node_features.reserve(snapshots.size());
    in.adjacency.reserve(snapshots.size());
    for (const auto& snap : snapshots) {
        if (snap.node_count != model.meta.node_count)
            throw ValidationError("gkae: snapshot node count does not match the model");
        in.node_features.push_back(normalize_features(model.normalizer, snap.features));
        in.adjacency.push_back(
            gnn_adjacency(snap, model.meta.affinity_scale, model.meta.binary_adjacency));
    }
    return in;
}

double gkae_loss_grad(const GkaeModel& model, const GkaeInputs& inputs,
                      const std::vector<int>& starts, int horizon, GkaeWorkspace& ws) {
    if (starts.empty()) throw ValidationError("gkae_loss_grad: empty batch");
    const int rows = static_cast<int>(inputs.node_features.size());
    for (int s : starts)
        if (s < 0 || s + horizon > rows)
            throw ValidationError("gkae_loss_grad: window exceeds series");

    const int flat_dim = model.meta.node_count * (model.meta.node_count - 1);
    const double batch = static_cast<double>(starts.size());

    GraphEncTape gtape;
    Eigen::MatrixXd g0 = encode_batch(model, inputs, starts, &gtape);
    nn::ForwardTape enc_tape;
    Eigen::MatrixXd z = nn::forward(model.kae.encoder, g0, &enc_tape);

    std::vector<Eigen::MatrixXd> latents{z};
    std::vector<Eigen::MatrixXd> dz_dec;
    double loss = 0.0;
    for (int l = 0; l < horizon; ++l) {
        nn::ForwardTape dec_tape, gdec_tape;
        Eigen::MatrixXd g_l = nn::forward(model.kae.decoder, latents.back(), &dec_tape);
        Eigen::MatrixXd yhat = nn::forward(model.graph_decoder, g_l, &gdec_tape);
        Eigen::MatrixXd diff = yhat - gather_targets(inputs, starts, l, flat_dim);
        loss += diff.squaredNorm() / batch;
        Eigen::MatrixXd dy = (2.0 / batch) * diff;
        Eigen::MatrixXd dg = nn::backward(model.graph_decoder, gdec_tape, dy, ws.gdec_grads);
        dz_dec.push_back(nn::backward(model.kae.decoder, dec_tape, dg, ws.kae_ws.dec_grads));
        if (l + 1 < horizon) latents.push_back(latents.back() * model.kae.koopman.transpose());
    }

    Eigen::MatrixXd g = dz_dec.back();
    for (int l = horizon - 2; l >= 0; --l) {
        ws.kae_ws.k_grad.noalias() += g.transpose() * latents[static_cast<std::size_t>(l)];
        g = dz_dec[static_cast<std::size_t>(l)] + g * model.kae.koopman;
    }
    Eigen::MatrixXd dg0 = nn::backward(model.kae.encoder, enc_tape, g, ws.kae_ws.enc_grads);
    encode_backward(model, inputs, starts, gtape, dg0, ws);
    return loss;
}

std::vector<nn::TensorRef> gkae_tensor_refs(GkaeModel& model, GkaeWorkspace& ws) {
    std::vector<nn::TensorRef> refs;
    refs.push_back(nn::tensor_ref(model.graph_encoder[0].weight, ws.g1_weight_grad));
    refs.push_back(nn::tensor_ref(model.graph_encoder[0].bias, ws.g1_bias_grad));
    refs.push_back(nn::tensor_ref(model.graph_encoder[1].weight, ws.g2_weight_grad));
    refs.push_back(nn::tensor_ref(model.graph_encoder[1].bias, ws.g2_bias_grad));
    auto kae_refs = kae_tensor_refs(model.kae, ws.kae_ws);
    refs.insert(refs.end(), kae_refs.begin(), kae_refs.end());
    for (std::size_t i = 0; i < model.graph_decoder.layers.size(); ++i) {
        refs.push_back(
            nn::tensor_ref(model.graph_decoder.layers[i].weight, ws.gdec_grads.dweight[i]));
        refs.push_back(nn::tensor_ref(model.graph_decoder.layers[i].bias, ws.gdec_grads.dbias[i]));
    }
    return refs;
}

namespace {

double gkae_full_loss(const GkaeModel& model, const GkaeInputs& inputs,
                      const std::vector<int>& starts, int horizon) {
    constexpr std::size_t kChunk = 256;
    const int flat_dim = model.meta.node_count * (model.meta.node_count - 1);
    double total = 0.0;
    for (std::size_t begin = 0; begin < starts.size(); begin += kChunk) {
        std::size_t end = std::min(begin + kChunk, starts.size());
        std::vector<int> chunk(starts.begin() + static_cast<std::ptrdiff_t>(begin),
                               starts.begin() + static_cast<std::ptrdiff_t>(end));
        Eigen::MatrixXd z =
            nn::forward(model.kae.encoder, encode_batch(model, inputs, chunk, nullptr));
        for (int l = 0; l < horizon; ++l) {
            Eigen::MatrixXd yhat =
                nn::forward(model.graph_decoder, nn::forward(model.kae.decoder, z));
            total += (yhat - gather_targets(inputs, chunk, l, flat_dim)).squaredNorm();
            if (l + 1 < horizon) z = z * model.kae.koopman.transpose();
        }
    }
    return total / static_cast<double>(starts.size());
}

}  // namespace

}  // namespace detail

Eigen::VectorXd encode_graph(const GkaeModel& model, const GraphSnapshot& snapshot) {
    detail::GkaeInputs in = detail::gkae_inputs(model, {snapshot});
    return encode_batch(model, in, {0}, nullptr).row(0).transpose();
}

Eigen::MatrixXd decode_graph(const GkaeModel& model, const Eigen::VectorXd& embedding) {
    Eigen::VectorXd flat = nn::forward(model.graph_decoder, embedding);
    Eigen::VectorXd denormed = model.normalizer.denormalize(flat, kPredictionClampSigma);
    return unflatten_features(denormed, model.meta.node_count);
}

std::vector<Eigen::MatrixXd> gkae_rollout(const GkaeModel& model, const GraphSnapshot& snapshot,
                                          int steps) {
    if (steps < 0) throw ValidationError("gkae_rollout: steps must be >= 0");
    Eigen::VectorXd g0 = encode_graph(model, snapshot);
    Eigen::VectorXd h = nn::forward(model.kae.encoder, g0);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int l = 1; l <= steps; ++l) {
        h = model.kae.koopman * h;
        out.push_back(decode_graph(model, nn::forward(model.kae.decoder, h)));
    }
    return out;
}

GkaeModel train_gkae(const std::vector<GraphSnapshot>& snapshots, const TrainConfig& cfg,
                     std::uint64_t seed, TrainLog* log) {
    cfg.validate();
    if (snapshots.empty()) throw ValidationError("train_gkae: empty snapshot sequence");
    const int node_count = snapshots.front().node_count;
    for (const auto& s : snapshots)
        if (s.node_count != node_count)
            throw ValidationError("train_gkae: inconsistent node counts across snapshots");

    const int rows = static_cast<int>(snapshots.size());
    const int n_train = cfg.train_rows(rows);
    if (n_train < cfg.horizon)
        throw ValidationError("train_gkae: training split shorter than the horizon");

    Rng rng(seed);
    GkaeModel model = make_gkae(node_count, cfg, rng);

    const int flat_dim = node_count * (node_count - 1);
    Eigen::MatrixXd raw(rows, flat_dim);
    for (int t = 0; t < rows; ++t)
        raw.row(t) = flatten_features(snapshots[static_cast<std::size_t>(t)].features).transpose();
    model.normalizer = Normalizer::fit(raw, n_train, cfg.db_floor, cfg.std_floor);

    detail::GkaeInputs inputs = detail::gkae_inputs(model, snapshots);

    std::vector<int> starts(static_cast<std::size_t>(n_train - cfg.horizon + 1));
    std::iota(starts.begin(), starts.end(), 0);

    detail::GkaeWorkspace ws;
    ws.resize_like(model);
    model.meta.initial_loss = detail::gkae_full_loss(model, inputs, starts, cfg.horizon);
    if (log) log->push_back({0, model.meta.initial_loss});

    nn::AdamState adam;
    nn::AdamConfig adam_cfg;
    std::vector<int> order = starts;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        adam_cfg.learning_rate = cfg.epoch_lr(epoch);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t e = std::min(b + static_cast<std::size_t>(cfg.batch_size), order.size());
            std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                   order.begin() + static_cast<std::ptrdiff_t>(e));
            ws.set_zero();
            epoch_loss += detail::gkae_loss_grad(model, inputs, batch, cfg.horizon, ws);
            ++batches;
            auto refs = detail::gkae_tensor_refs(model, ws);
            nn::clip_gradients(refs, cfg.grad_clip);
            nn::adam_step(adam, adam_cfg, refs);
        }
        if (!std::isfinite(epoch_loss))
            throw DataError("train_gkae: training diverged (non-finite loss)");
        if (log) log->push_back({epoch + 1, epoch_loss / std::max(1, batches)});
    }

    model.meta.final_loss = detail::gkae_full_loss(model, inputs, starts, cfg.horizon);
    return model;
}

CentralizedPrediction predict_centralized(const GkaeModel& model, const GraphSnapshot& snapshot,
                                          int steps, double kappa) {
    CentralizedPrediction pred;
    std::vector<Eigen::MatrixXd> features = gkae_rollout(model, snapshot, steps);
    pred.sinr.reserve(features.size());
    pred.isolation.reserve(features.size());
    for (int l = 0; l < static_cast<int>(features.size()); ++l) {
        pred.sinr.push_back({features[static_cast<std::size_t>(l)], snapshot.t + l + 1});
        pred.isolation.push_back(
            isolation_from_features(features[static_cast<std::size_t>(l)], kappa));
    }
    return pred;
}

}  // namespace fanetkoop
