#include "fanetkoop/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "fanetkoop/csv.hpp"
#include "fanetkoop/parallel.hpp"

namespace fanetkoop {

int worker_count() {
    if (const char* env = std::getenv("FANET_KOOPMAN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

DistributedPredictor::DistributedPredictor(std::vector<KaeModel> models)
    : models_(std::move(models)) {
    if (models_.empty()) throw ValidationError("DistributedPredictor: no models");
}

std::vector<Eigen::MatrixXd> DistributedPredictor::predict(const Dataset& dataset, int t0,
                                                           int steps) const {
    const int n = dataset.uav_count();
    if (static_cast<int>(models_.size()) != n)
        throw ValidationError("DistributedPredictor: model count != UAV count");
    const SinrSnapshot& current = dataset.sinr.at(static_cast<std::size_t>(t0));
    std::vector<std::vector<Eigen::VectorXd>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = predict_distributed(
            models_[static_cast<std::size_t>(i)], current.values.row(i).transpose(), steps);
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(steps));
    for (int l = 0; l < steps; ++l) {
        Eigen::MatrixXd s(n, n - 1);
        for (int i = 0; i < n; ++i)
            s.row(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)].transpose();
        out[static_cast<std::size_t>(l)] = std::move(s);
    }
    return out;
}

CentralizedPredictor::CentralizedPredictor(GkaeModel model) : model_(std::move(model)) {}

std::vector<Eigen::MatrixXd> CentralizedPredictor::predict(const Dataset& dataset, int t0,
                                                           int steps) const {
    return gkae_rollout(model_, dataset.graph_at(t0), steps);
}

std::vector<Eigen::MatrixXd> OraclePredictor::predict(const Dataset& dataset, int t0,
                                                      int steps) const {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int l = 1; l <= steps; ++l)
        out.push_back(dataset.sinr.at(static_cast<std::size_t>(t0 + l)).values);
    return out;
}

// ---------------------------------------------------------------------------
// Training entry points
// ---------------------------------------------------------------------------

std::vector<KaeModel> train_distributed(const Dataset& dataset, const TrainConfig& cfg,
                                        std::uint64_t seed, std::vector<TrainLog>* logs) {
    const int n = dataset.uav_count();
    std::vector<KaeModel> models(static_cast<std::size_t>(n));
    std::vector<TrainLog> local_logs(static_cast<std::size_t>(n));
    parallel_for(n, [&](int i) {
        Rng fork = Rng::fork(seed, static_cast<std::uint64_t>(i));
        std::uint64_t uav_seed = fork.next_u64();
        models[static_cast<std::size_t>(i)] =
            train_kae(dataset.series_for(i), cfg, uav_seed, &local_logs[static_cast<std::size_t>(i)]);
    });
    if (logs) *logs = std::move(local_logs);
    return models;
}

GkaeModel train_centralized(const Dataset& dataset, const TrainConfig& cfg, std::uint64_t seed,
                            TrainLog* log) {
    std::vector<GraphSnapshot> snapshots;
    snapshots.reserve(static_cast<std::size_t>(dataset.snapshot_count()));
    for (int t = 0; t < dataset.snapshot_count(); ++t) snapshots.push_back(dataset.graph_at(t));
    Rng fork = Rng::fork(seed, 0xC0000000ULL);
    return train_gkae(snapshots, cfg, fork.next_u64(), log);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

std::vector<int> evaluation_starts(const Dataset& dataset, int steps, StartRegion region) {
    if (steps < 1) throw ValidationError("evaluation: prediction steps must be >= 1");
    const int total = dataset.snapshot_count();
    const int n_train = dataset.config.training.train_rows(total);
    int begin = 0, end = 0;  // starts t0 need t0 + steps <= total - 1
    switch (region) {
        case StartRegion::HeldOut:
            begin = n_train;
            end = total - steps;
            break;
        case StartRegion::Train:
            begin = 0;
            end = std::min(n_train, total - steps);
            break;
        case StartRegion::Full:
            begin = 0;
            end = total - steps;
            break;
    }
    if (begin >= end)
        throw ValidationError("evaluation: no valid prediction start indices in the " +
                              to_string(region) + " region (horizon too long or empty split)");
    std::vector<int> starts(static_cast<std::size_t>(end - begin));
    std::iota(starts.begin(), starts.end(), begin);
    return starts;
}

namespace {

struct StartScratch {
    double epsilon = 0.0;
    std::vector<double> curve;
    // per sweep point: network counts then per-UAV counts
    std::vector<ConfusionCounts> network;
    std::vector<std::vector<ConfusionCounts>> per_uav;
};

}  // namespace

std::vector<SweepEvaluation> evaluate_predictor(const Dataset& dataset, const Predictor& predictor,
                                                const EvaluationConfig& eval,
                                                const ExperimentConfig& config) {
    const int n = dataset.uav_count();
    const ChannelParams base_channel = config.channel();
    const std::vector<SweepPoint> points = eval.sweep_points(config);
    std::vector<double> kappas;
    kappas.reserve(points.size());
    for (const auto& p : points) kappas.push_back(p.kappa_linear(base_channel));

    std::vector<SweepEvaluation> result;
    for (int steps : eval.prediction_steps) {
        std::vector<int> starts = evaluation_starts(dataset, steps, eval.start_region);
        std::vector<StartScratch> scratch(starts.size());

        parallel_for(static_cast<int>(starts.size()), [&](int idx) {
            const int t0 = starts[static_cast<std::size_t>(idx)];
            StartScratch& s = scratch[static_cast<std::size_t>(idx)];
            std::vector<Eigen::MatrixXd> predicted = predictor.predict(dataset, t0, steps);

            std::vector<Eigen::MatrixXd> truth;
            truth.reserve(static_cast<std::size_t>(steps));
            for (int l = 1; l <= steps; ++l)
                truth.push_back(dataset.sinr.at(static_cast<std::size_t>(t0 + l)).values);

            s.curve = prediction_error_curve(truth, predicted, steps, eval.error_domain);
            s.epsilon = std::accumulate(s.curve.begin(), s.curve.end(), 0.0) /
                        static_cast<double>(steps);

            s.network.resize(points.size());
            s.per_uav.assign(points.size(),
                             std::vector<ConfusionCounts>(static_cast<std::size_t>(n)));
            for (std::size_t p = 0; p < points.size(); ++p) {
                for (int l = 0; l < steps; ++l) {
                    IsolationFlags actual =
                        isolation_from_features(truth[static_cast<std::size_t>(l)], kappas[p]);
                    IsolationFlags pred =
                        isolation_from_features(predicted[static_cast<std::size_t>(l)], kappas[p]);
                    auto tally = [](ConfusionCounts& c, bool a, bool q) {
                        if (a && q) ++c.tp;
                        else if (!a && q) ++c.fp;
                        else if (!a && !q) ++c.tn;
                        else ++c.fn;
                    };
                    tally(s.network[p], actual.network, pred.network);
                    for (int i = 0; i < n; ++i)
                        tally(s.per_uav[p][static_cast<std::size_t>(i)],
                              actual.per_uav[static_cast<std::size_t>(i)],
                              pred.per_uav[static_cast<std::size_t>(i)]);
                }
            }
        });

        for (std::size_t p = 0; p < points.size(); ++p) {
            SweepEvaluation ev;
            ev.point = points[p];
            ev.steps = steps;
            ev.mode = predictor.mode_name();
            ev.error_curve.assign(static_cast<std::size_t>(steps), 0.0);
            double eps_sum = 0.0;
            ConfusionCounts net_total;
            std::vector<ConfusionCounts> uav_total(static_cast<std::size_t>(n));
            for (std::size_t k = 0; k < starts.size(); ++k) {
                const StartScratch& s = scratch[k];
                StartResult row;
                row.start = starts[k];
                row.epsilon = s.epsilon;
                row.network = s.network[p];
                row.per_uav = s.per_uav[p];
                ev.starts.push_back(std::move(row));
                eps_sum += s.epsilon;
                net_total += s.network[p];
                for (int i = 0; i < n; ++i)
                    uav_total[static_cast<std::size_t>(i)] += s.per_uav[p][static_cast<std::size_t>(i)];
                for (int l = 0; l < steps; ++l)
                    ev.error_curve[static_cast<std::size_t>(l)] +=
                        s.curve[static_cast<std::size_t>(l)];
            }
            for (double& e : ev.error_curve) e /= static_cast<double>(starts.size());
            ev.aggregate.epsilon = eps_sum / static_cast<double>(starts.size());
            ev.aggregate.counts = net_total;
            ev.aggregate.f1 = f1_score(net_total);
            ev.aggregate.far = false_alarm_rate(net_total);
            ev.aggregate.degenerate_f1 = (2 * net_total.tp + net_total.fp + net_total.fn) == 0;
            ev.aggregate.degenerate_far = (net_total.fp + net_total.tn) == 0;
            ev.aggregate.horizon = steps;
            ev.aggregate.mode = predictor.mode_name();
            ev.aggregate.per_uav = std::move(uav_total);
            result.push_back(std::move(ev));
        }
    }
    return result;
}

std::vector<IsolationSweepRow> sweep_isolation(const Dataset& dataset,
                                               const std::vector<SweepPoint>& points) {
    if (points.empty()) throw ValidationError("sweep-isolation: empty sweep list");
    const ChannelParams base = dataset.config.channel();
    const int n = dataset.uav_count();
    std::vector<IsolationSweepRow> rows(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int p) {
        IsolationSweepRow& row = rows[static_cast<std::size_t>(p)];
        row.point = points[static_cast<std::size_t>(p)];
        double kappa = row.point.kappa_linear(base);
        row.per_uav_events.assign(static_cast<std::size_t>(n), 0);
        for (const auto& snap : dataset.sinr) {
            IsolationFlags flags = isolation_flags(snap, kappa);
            if (flags.network) ++row.network_events;
            for (int i = 0; i < n; ++i)
                if (flags.per_uav[static_cast<std::size_t>(i)])
                    ++row.per_uav_events[static_cast<std::size_t>(i)];
        }
    });
    return rows;
}

// ---------------------------------------------------------------------------
// CSV renderings
// ---------------------------------------------------------------------------

namespace {

std::string point_kappa_cell(const SweepPoint& p) {
    return p.kappa_db ? format_double(*p.kappa_db) : "";
}
std::string point_radius_cell(const SweepPoint& p) {
    return p.radius_m ? format_double(*p.radius_m) : "";
}

}  // namespace

std::string render_eval_csv(const std::vector<SweepEvaluation>& evals, int uav_count) {
    CsvWriter csv({"row_type", "mode", "P", "kappa_db", "radius_m", "start", "scope", "epsilon",
                   "tp", "fp", "tn", "fn", "f1", "far"});
    for (const auto& ev : evals) {
        for (const auto& row : ev.starts) {
            csv.add_row({"point", ev.mode, std::to_string(ev.steps), point_kappa_cell(ev.point),
                         point_radius_cell(ev.point), std::to_string(row.start), "network",
                         format_double(row.epsilon), std::to_string(row.network.tp),
                         std::to_string(row.network.fp), std::to_string(row.network.tn),
                         std::to_string(row.network.fn), format_double(f1_score(row.network)),
                         format_double(false_alarm_rate(row.network))});
        }
        csv.add_row({"aggregate", ev.mode, std::to_string(ev.steps), point_kappa_cell(ev.point),
                     point_radius_cell(ev.point), "", "network",
                     format_double(ev.aggregate.epsilon), std::to_string(ev.aggregate.counts.tp),
                     std::to_string(ev.aggregate.counts.fp), std::to_string(ev.aggregate.counts.tn),
                     std::to_string(ev.aggregate.counts.fn), format_double(ev.aggregate.f1),
                     format_double(ev.aggregate.far)});
        for (int i = 0; i < uav_count; ++i) {
            const ConfusionCounts& c = ev.aggregate.per_uav[static_cast<std::size_t>(i)];
            csv.add_row({"aggregate", ev.mode, std::to_string(ev.steps), point_kappa_cell(ev.point),
                         point_radius_cell(ev.point), "", "uav" + std::to_string(i), "",
                         std::to_string(c.tp), std::to_string(c.fp), std::to_string(c.tn),
                         std::to_string(c.fn), format_double(f1_score(c)),
                         format_double(false_alarm_rate(c))});
        }
    }
    return csv.str();
}

std::string render_error_curve_csv(const std::vector<SweepEvaluation>& evals) {
    CsvWriter csv({"mode", "P", "l", "error"});
    // the curve is kappa-independent; emit it once per (mode, P)
    std::vector<std::pair<std::string, int>> seen;
    for (const auto& ev : evals) {
        std::pair<std::string, int> key{ev.mode, ev.steps};
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        for (int l = 0; l < ev.steps; ++l)
            csv.add_row({ev.mode, std::to_string(ev.steps), std::to_string(l + 1),
                         format_double(ev.error_curve[static_cast<std::size_t>(l)])});
    }
    return csv.str();
}

std::string render_isolation_csv(const std::vector<IsolationSweepRow>& rows, int uav_count) {
    std::vector<std::string> header{"kappa_db", "radius_m", "network_events"};
    for (int i = 0; i < uav_count; ++i) header.push_back("uav" + std::to_string(i) + "_events");
    CsvWriter csv(header);
    for (const auto& row : rows) {
        std::vector<std::string> cells{point_kappa_cell(row.point), point_radius_cell(row.point),
                                       std::to_string(row.network_events)};
        for (long c : row.per_uav_events) cells.push_back(std::to_string(c));
        csv.add_row(std::move(cells));
    }
    return csv.str();
}

std::string render_train_log_csv(const std::vector<TrainLog>& logs,
                                 const std::vector<std::string>& names) {
    if (logs.size() != names.size())
        throw ValidationError("render_train_log_csv: log/name count mismatch");
    CsvWriter csv({"model", "epoch", "loss"});
    for (std::size_t i = 0; i < logs.size(); ++i)
        for (const auto& entry : logs[i])
            csv.add_row({names[i], std::to_string(entry.epoch), format_double(entry.loss)});
    return csv.str();
}

}  // namespace fanetkoop
