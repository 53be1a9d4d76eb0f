#include "fanetkoop/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fanetkoop {

KoopmanMatrix dmd_fit_pairs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ValidationError("dmd_fit_pairs: X and Y shapes differ");
    if (x.rows() < 1) throw ValidationError("dmd_fit_pairs: need at least one pair");
    // argmin_K ||X K^T - Y||_F via complete orthogonal decomposition;
    // minimum-norm solution when the data is rank-deficient.
    Eigen::MatrixXd kt = x.completeOrthogonalDecomposition().solve(y);
    return kt.transpose();
}

KoopmanMatrix dmd_fit(const std::vector<Eigen::VectorXd>& states) {
    if (states.size() < 2) throw ValidationError("dmd_fit: need at least two states");
    const Eigen::Index dim = states.front().size();
    for (const auto& s : states)
        if (s.size() != dim) throw ValidationError("dmd_fit: state dimensions differ");
    Eigen::MatrixXd x(states.size() - 1, dim), y(states.size() - 1, dim);
    for (std::size_t t = 0; t + 1 < states.size(); ++t) {
        x.row(static_cast<Eigen::Index>(t)) = states[t].transpose();
        y.row(static_cast<Eigen::Index>(t)) = states[t + 1].transpose();
    }
    return dmd_fit_pairs(x, y);
}

// ---------------------------------------------------------------------------
// Normalizer
// ---------------------------------------------------------------------------

Normalizer Normalizer::fit(const Eigen::MatrixXd& raw_rows, int train_rows, double db_floor,
                           double std_floor) {
    if (train_rows < 1 || train_rows > raw_rows.rows())
        throw ValidationError("Normalizer::fit: bad training row count");
    Normalizer n;
    n.db_floor = db_floor;
    const Eigen::Index cols = raw_rows.cols();
    n.mean.resize(cols);
    n.std.resize(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (int r = 0; r < train_rows; ++r) sum += to_db(raw_rows(r, c), db_floor);
        double mean = sum / train_rows;
        double var = 0.0;
        for (int r = 0; r < train_rows; ++r) {
            double d = to_db(raw_rows(r, c), db_floor) - mean;
            var += d * d;
        }
        double sd = std::sqrt(var / train_rows);
        if (sd < std_floor) {
            sd = std_floor;
            n.floored = true;
        }
        n.mean(c) = mean;
        n.std(c) = sd;
    }
    return n;
}

Eigen::MatrixXd Normalizer::normalize(const Eigen::MatrixXd& raw_rows) const {
    if (raw_rows.cols() != mean.size())
        throw ValidationError("Normalizer: feature count mismatch");
    Eigen::MatrixXd out(raw_rows.rows(), raw_rows.cols());
    for (Eigen::Index r = 0; r < raw_rows.rows(); ++r)
        for (Eigen::Index c = 0; c < raw_rows.cols(); ++c)
            out(r, c) = (to_db(raw_rows(r, c), db_floor) - mean(c)) / std(c);
    return out;
}

Eigen::VectorXd Normalizer::normalize(const Eigen::VectorXd& raw) const {
    Eigen::MatrixXd out = normalize(Eigen::MatrixXd(raw.transpose()));
    return out.row(0).transpose();
}

Eigen::MatrixXd Normalizer::denormalize(const Eigen::MatrixXd& normed, double clamp_sigma) const {
    if (normed.cols() != mean.size())
        throw ValidationError("Normalizer: feature count mismatch");
    Eigen::MatrixXd out(normed.rows(), normed.cols());
    for (Eigen::Index r = 0; r < normed.rows(); ++r)
        for (Eigen::Index c = 0; c < normed.cols(); ++c) {
            double z = normed(r, c);
            if (clamp_sigma > 0.0) z = std::clamp(z, -clamp_sigma, clamp_sigma);
            out(r, c) = from_db(z * std(c) + mean(c));
        }
    return out;
}

Eigen::VectorXd Normalizer::denormalize(const Eigen::VectorXd& normed, double clamp_sigma) const {
    Eigen::MatrixXd out = denormalize(Eigen::MatrixXd(normed.transpose()), clamp_sigma);
    return out.row(0).transpose();
}

// ---------------------------------------------------------------------------
// KAE model
// ---------------------------------------------------------------------------

int KaeModel::parameter_count() const {
    return encoder.parameter_count() + static_cast<int>(koopman.size()) +
           decoder.parameter_count();
}

int KaeModel::layer_count() const {
    return static_cast<int>(encoder.layers.size() + 1 + decoder.layers.size());
}

void TrainConfig::validate() const {
    if (latent_dim < 1 || embedding_dim < 1 || hidden_width < 1)
        throw ValidationError("training: dimensions must be positive");
    if (horizon < 1) throw ValidationError("training: horizon must be >= 1");
    if (learning_rate <= 0.0) throw ValidationError("training: learning rate must be positive");
    if (epochs < 0) throw ValidationError("training: epochs must be >= 0");
    if (batch_size < 1) throw ValidationError("training: batch size must be >= 1");
    if (split_fraction <= 0.0 || split_fraction > 1.0)
        throw ValidationError("training: split fraction must be in (0, 1]");
    if (lr_decay <= 0.0 || lr_decay > 1.0)
        throw ValidationError("training: lr decay factor must be in (0, 1]");
}

double TrainConfig::epoch_lr(int epoch) const {
    int interval = std::max(1, epochs / 3);
    return learning_rate * std::pow(lr_decay, epoch / interval);
}

int TrainConfig::train_rows(int total_rows) const {
    return static_cast<int>(static_cast<double>(total_rows) * split_fraction);
}

KaeModel make_kae(int input_dim, const TrainConfig& cfg, Rng& rng) {
    if (input_dim < 1) throw ValidationError("make_kae: input dim must be positive");
    const int h = cfg.hidden_width;
    const int m = cfg.latent_dim;
    KaeModel model;
    model.encoder = nn::make_mlp({input_dim, h, h, h, h, m}, rng);
    // identity start: stable multi-step rollouts from the first update on
    model.koopman = Eigen::MatrixXd::Identity(m, m);
    model.decoder = nn::make_mlp({m, h, h, h, h, input_dim}, rng);
    model.meta.input_dim = input_dim;
    model.meta.latent_dim = m;
    model.meta.horizon = cfg.horizon;
    return model;
}

std::vector<Eigen::VectorXd> rollout(const KaeModel& model, const Eigen::VectorXd& x0, int steps,
                                     double clamp_sigma) {
    if (steps < 0) throw ValidationError("rollout: steps must be >= 0");
    Eigen::VectorXd z = nn::forward(model.encoder, model.normalizer.normalize(x0));
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back(model.normalizer.denormalize(nn::forward(model.decoder, z), clamp_sigma));
    for (int l = 1; l <= steps; ++l) {
        z = model.koopman * z;
        out.push_back(model.normalizer.denormalize(nn::forward(model.decoder, z), clamp_sigma));
    }
    return out;
}

std::vector<Eigen::VectorXd> predict_distributed(const KaeModel& model,
                                                 const Eigen::VectorXd& current, int steps) {
    if (steps < 0) throw ValidationError("predict_distributed: steps must be >= 0");
    std::vector<Eigen::VectorXd> seq = rollout(model, current, steps);
    seq.erase(seq.begin());  // drop the l = 0 reconstruction
    return seq;
}

namespace detail {

void KaeWorkspace::resize_like(const KaeModel& model) {
    enc_grads.resize_like(model.encoder);
    dec_grads.resize_like(model.decoder);
    k_grad.setZero(model.koopman.rows(), model.koopman.cols());
}

void KaeWorkspace::set_zero() {
    enc_grads.set_zero();
    dec_grads.set_zero();
    k_grad.setZero();
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& series, const std::vector<int>& starts,
                            int offset) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(starts.size()), series.cols());
    for (std::size_t k = 0; k < starts.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = series.row(starts[k] + offset);
    return out;
}

}  // namespace

double kae_loss_grad(const KaeModel& model, const Eigen::MatrixXd& normalized_series,
                     const std::vector<int>& starts, int horizon, KaeWorkspace& ws) {
    if (starts.empty()) throw ValidationError("kae_loss_grad: empty batch");
    for (int s : starts)
        if (s < 0 || s + horizon > normalized_series.rows())
            throw ValidationError("kae_loss_grad: window exceeds series");

    const double batch = static_cast<double>(starts.size());
    nn::ForwardTape enc_tape;
    Eigen::MatrixXd z = nn::forward(model.encoder, gather_rows(normalized_series, starts, 0),
                                    &enc_tape);

    std::vector<Eigen::MatrixXd> latents;   // z_l, l = 0..horizon-1
    std::vector<Eigen::MatrixXd> dz_dec;    // decoder input-gradients per l
    std::vector<nn::ForwardTape> dec_tapes(static_cast<std::size_t>(horizon));
    latents.reserve(static_cast<std::size_t>(horizon));
    dz_dec.reserve(static_cast<std::size_t>(horizon));
    latents.push_back(z);

    double loss = 0.0;
    for (int l = 0; l < horizon; ++l) {
        Eigen::MatrixXd yhat =
            nn::forward(model.decoder, latents.back(), &dec_tapes[static_cast<std::size_t>(l)]);
        Eigen::MatrixXd diff = yhat - gather_rows(normalized_series, starts, l);
        loss += diff.squaredNorm() / batch;
        Eigen::MatrixXd dy = (2.0 / batch) * diff;
        dz_dec.push_back(nn::backward(model.decoder, dec_tapes[static_cast<std::size_t>(l)], dy,
                                      ws.dec_grads));
        if (l + 1 < horizon) latents.push_back(latents.back() * model.koopman.transpose());
    }

    // reverse pass through the latent chain z_{l+1} = z_l K^T
    Eigen::MatrixXd g = dz_dec.back();
    for (int l = horizon - 2; l >= 0; --l) {
        ws.k_grad.noalias() += g.transpose() * latents[static_cast<std::size_t>(l)];
        g = dz_dec[static_cast<std::size_t>(l)] + g * model.koopman;
    }
    nn::backward(model.encoder, enc_tape, g, ws.enc_grads);
    return loss;
}

std::vector<nn::TensorRef> kae_tensor_refs(KaeModel& model, KaeWorkspace& ws) {
    std::vector<nn::TensorRef> refs;
    for (std::size_t i = 0; i < model.encoder.layers.size(); ++i) {
        refs.push_back(nn::tensor_ref(model.encoder.layers[i].weight, ws.enc_grads.dweight[i]));
        refs.push_back(nn::tensor_ref(model.encoder.layers[i].bias, ws.enc_grads.dbias[i]));
    }
    refs.push_back(nn::tensor_ref(model.koopman, ws.k_grad));
    for (std::size_t i = 0; i < model.decoder.layers.size(); ++i) {
        refs.push_back(nn::tensor_ref(model.decoder.layers[i].weight, ws.dec_grads.dweight[i]));
        refs.push_back(nn::tensor_ref(model.decoder.layers[i].bias, ws.dec_grads.dbias[i]));
    }
    return refs;
}

namespace {

/// Loss without gradients, chunked to bound memory.
double kae_full_loss(const KaeModel& model, const Eigen::MatrixXd& series,
                     const std::vector<int>& starts, int horizon) {
    constexpr std::size_t kChunk = 256;
    double total = 0.0;
    for (std::size_t begin = 0; begin < starts.size(); begin += kChunk) {
        std::size_t end = std::min(begin + kChunk, starts.size());
        std::vector<int> chunk(starts.begin() + static_cast<std::ptrdiff_t>(begin),
                               starts.begin() + static_cast<std::ptrdiff_t>(end));
        Eigen::MatrixXd z = nn::forward(model.encoder, gather_rows(series, chunk, 0));
        for (int l = 0; l < horizon; ++l) {
            Eigen::MatrixXd diff = nn::forward(model.decoder, z) - gather_rows(series, chunk, l);
            total += diff.squaredNorm();
            if (l + 1 < horizon) z = z * model.koopman.transpose();
        }
    }
    return total / static_cast<double>(starts.size());
}

}  // namespace

}  // namespace detail

double kae_loss(const KaeModel& model, const Eigen::MatrixXd& raw_window, int horizon) {
    if (horizon < 1) throw ValidationError("kae_loss: horizon must be >= 1");
    if (raw_window.rows() < horizon) throw ValidationError("kae_loss: window too short");
    Eigen::MatrixXd normed = model.normalizer.normalize(raw_window);
    return detail::kae_full_loss(model, normed, {0}, horizon);
}

KaeModel train_kae(const Eigen::MatrixXd& series, const TrainConfig& cfg, std::uint64_t seed,
                   TrainLog* log) {
    cfg.validate();
    const int rows = static_cast<int>(series.rows());
    const int n_train = cfg.train_rows(rows);
    if (n_train < cfg.horizon)
        throw ValidationError("train_kae: training split shorter than the horizon");

    Rng rng(seed);
    KaeModel model = make_kae(static_cast<int>(series.cols()), cfg, rng);
    model.normalizer = Normalizer::fit(series, n_train, cfg.db_floor, cfg.std_floor);
    Eigen::MatrixXd normed = model.normalizer.normalize(series);

    std::vector<int> starts(static_cast<std::size_t>(n_train - cfg.horizon + 1));
    std::iota(starts.begin(), starts.end(), 0);

    detail::KaeWorkspace ws;
    ws.resize_like(model);
    model.meta.initial_loss = detail::kae_full_loss(model, normed, starts, cfg.horizon);
    if (log) log->push_back({0, model.meta.initial_loss});

    nn::AdamState adam;
    nn::AdamConfig adam_cfg;
    std::vector<int> order = starts;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        adam_cfg.learning_rate = cfg.epoch_lr(epoch);
        // Fisher-Yates on the shared stream keeps runs bit-reproducible
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
            epoch_loss += detail::kae_loss_grad(model, normed, batch, cfg.horizon, ws);
            ++batches;
            auto refs = detail::kae_tensor_refs(model, ws);
            nn::clip_gradients(refs, cfg.grad_clip);
            nn::adam_step(adam, adam_cfg, refs);
        }
        if (!std::isfinite(epoch_loss))
            throw DataError("train_kae: training diverged (non-finite loss)");
        if (log) log->push_back({epoch + 1, epoch_loss / std::max(1, batches)});
    }

    model.meta.final_loss = detail::kae_full_loss(model, normed, starts, cfg.horizon);
    model.meta.horizon = cfg.horizon;
    return model;
}

}  // namespace fanetkoop
