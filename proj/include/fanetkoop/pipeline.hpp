#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fanetkoop/dataset.hpp"
#include "fanetkoop/gkae.hpp"
#include "fanetkoop/metrics.hpp"

namespace fanetkoop {

/// Worker count for parallel sections: FANET_KOOPMAN_THREADS when set,
/// otherwise the hardware concurrency.
int worker_count();

/// Run fn(i) for i in [0, n) on a worker pool. Results must be written to
/// pre-sized per-index slots; the call blocks until all tasks finish and
/// rethrows the first task exception.
void parallel_for(int n, const std::function<void(int)>& fn);

/// A trained (or oracle) source of SINR forecasts used by the evaluator.
class Predictor {
  public:
    virtual ~Predictor() = default;
    /// Predicted feature matrices for steps t0+1..t0+P (linear ratio).
    virtual std::vector<Eigen::MatrixXd> predict(const Dataset& dataset, int t0,
                                                 int steps) const = 0;
    virtual std::string mode_name() const = 0;
};

/// One KAE per UAV, each forecasting its own SINR row.
class DistributedPredictor : public Predictor {
  public:
    explicit DistributedPredictor(std::vector<KaeModel> models);
    std::vector<Eigen::MatrixXd> predict(const Dataset& dataset, int t0,
                                         int steps) const override;
    std::string mode_name() const override { return "distributed"; }
    const std::vector<KaeModel>& models() const { return models_; }

  private:
    std::vector<KaeModel> models_;
};

/// Single GKAE forecasting the full feature matrix.
class CentralizedPredictor : public Predictor {
  public:
    explicit CentralizedPredictor(GkaeModel model);
    std::vector<Eigen::MatrixXd> predict(const Dataset& dataset, int t0,
                                         int steps) const override;
    std::string mode_name() const override { return "centralized"; }
    const GkaeModel& model() const { return model_; }

  private:
    GkaeModel model_;
};

/// Returns the ground truth: a perfect detector for harness checks.
class OraclePredictor : public Predictor {
  public:
    std::vector<Eigen::MatrixXd> predict(const Dataset& dataset, int t0,
                                         int steps) const override;
    std::string mode_name() const override { return "oracle"; }
};

/// L per-UAV models trained in parallel, seeds forked per UAV.
std::vector<KaeModel> train_distributed(const Dataset& dataset, const TrainConfig& cfg,
                                        std::uint64_t seed,
                                        std::vector<TrainLog>* logs = nullptr);

GkaeModel train_centralized(const Dataset& dataset, const TrainConfig& cfg, std::uint64_t seed,
                            TrainLog* log = nullptr);

/// Valid prediction start indices for horizon P in the configured region.
std::vector<int> evaluation_starts(const Dataset& dataset, int steps, StartRegion region);

struct StartResult {
    int start = 0;
    double epsilon = 0.0;
    ConfusionCounts network;            // over the P predicted steps
    std::vector<ConfusionCounts> per_uav;
};

struct SweepEvaluation {
    SweepPoint point;
    int steps = 0;                       // P
    std::string mode;
    std::vector<StartResult> starts;     // one row per start index
    EvalReport aggregate;                // counts summed, epsilon averaged
    std::vector<double> error_curve;     // e(l), l = 1..P, mean over starts
};

/// Run a predictor over every start index and sweep point.
std::vector<SweepEvaluation> evaluate_predictor(const Dataset& dataset, const Predictor& predictor,
                                                const EvaluationConfig& eval,
                                                const ExperimentConfig& config);

struct IsolationSweepRow {
    SweepPoint point;
    long network_events = 0;
    std::vector<long> per_uav_events;
};

/// Ground-truth isolation event counts over the full run per sweep point.
std::vector<IsolationSweepRow> sweep_isolation(const Dataset& dataset,
                                               const std::vector<SweepPoint>& points);

// ---------------------------------------------------------------------------
// CSV renderings used by both the CLI and tests.
// ---------------------------------------------------------------------------

std::string render_eval_csv(const std::vector<SweepEvaluation>& evals, int uav_count);
std::string render_error_curve_csv(const std::vector<SweepEvaluation>& evals);
std::string render_isolation_csv(const std::vector<IsolationSweepRow>& rows, int uav_count);
std::string render_train_log_csv(const std::vector<TrainLog>& logs,
                                 const std::vector<std::string>& names);

}  // namespace fanetkoop
