#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fanetkoop/common.hpp"

namespace fanetkoop {

enum class ErrorDomain { Db, Linear };

ErrorDomain parse_error_domain(const std::string& s);

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o);
};

struct EvalReport {
    double epsilon = 0.0;
    double f1 = 0.0;
    double far = 0.0;
    ConfusionCounts counts;
    int horizon = 0;                 // P
    std::string mode;                // centralized | distributed | oracle
    std::vector<ConfusionCounts> per_uav;
    bool degenerate_f1 = false;      // 2TP+FP+FN == 0, value forced to 0
    bool degenerate_far = false;     // FP+TN == 0, value forced to 0
};

/// Total predictive error over P steps:
/// eps(P) = (1/P) sum_{t=1..P} sum_l ||s_l(t) - shat_l(t)||^2.
/// Computed on dB-scale SINR by default; sequences hold L x (L-1) matrices
/// of linear-ratio SINR for steps 1..P.
double prediction_error(const std::vector<Eigen::MatrixXd>& truth,
                        const std::vector<Eigen::MatrixXd>& predicted, int steps,
                        ErrorDomain domain = ErrorDomain::Db);

/// Per-rollout-step error curve e(l), l = 1..P (same accumulation without
/// the 1/P average); eps(P) equals mean over the curve.
std::vector<double> prediction_error_curve(const std::vector<Eigen::MatrixXd>& truth,
                                           const std::vector<Eigen::MatrixXd>& predicted,
                                           int steps, ErrorDomain domain = ErrorDomain::Db);

/// Isolation-event confusion counts: (actual, predicted) = (1,1) TP,
/// (0,1) FP, (0,0) TN, (1,0) FN.
ConfusionCounts classify_events(const std::vector<bool>& actual,
                                const std::vector<bool>& predicted);

/// 2TP / (2TP + FP + FN); 0 when the denominator vanishes.
double f1_score(const ConfusionCounts& counts);

/// FP / (FP + TN); 0 when the denominator vanishes.
double false_alarm_rate(const ConfusionCounts& counts);

}  // namespace fanetkoop
