#include "fanetkoop/metrics.hpp"

#include <cmath>
#include <string>

namespace fanetkoop {

ErrorDomain parse_error_domain(const std::string& s) {
    if (s == "db") return ErrorDomain::Db;
    if (s == "linear") return ErrorDomain::Linear;
    throw ValidationError("error domain must be 'db' or 'linear', got '" + s + "'");
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

namespace {

double step_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& predicted,
                  ErrorDomain domain) {
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols())
        throw ValidationError("prediction_error: shape mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i)
        for (Eigen::Index c = 0; c < truth.cols(); ++c) {
            double d = (domain == ErrorDomain::Db)
                           ? to_db(truth(i, c)) - to_db(predicted(i, c))
                           : truth(i, c) - predicted(i, c);
            sum += d * d;
        }
    return sum;
}

}  // namespace

std::vector<double> prediction_error_curve(const std::vector<Eigen::MatrixXd>& truth,
                                           const std::vector<Eigen::MatrixXd>& predicted,
                                           int steps, ErrorDomain domain) {
    if (steps < 1) throw ValidationError("prediction_error: steps must be >= 1");
    if (static_cast<int>(truth.size()) < steps || static_cast<int>(predicted.size()) < steps)
        throw ValidationError("prediction_error: sequences shorter than the horizon");
    std::vector<double> curve(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t)
        curve[static_cast<std::size_t>(t)] = step_error(truth[static_cast<std::size_t>(t)],
                                                        predicted[static_cast<std::size_t>(t)],
                                                        domain);
    return curve;
}

double prediction_error(const std::vector<Eigen::MatrixXd>& truth,
                        const std::vector<Eigen::MatrixXd>& predicted, int steps,
                        ErrorDomain domain) {
    std::vector<double> curve = prediction_error_curve(truth, predicted, steps, domain);
    double sum = 0.0;
    for (double e : curve) sum += e;
    return sum / static_cast<double>(steps);
}

ConfusionCounts classify_events(const std::vector<bool>& actual,
                                const std::vector<bool>& predicted) {
    if (actual.size() != predicted.size())
        throw ValidationError("classify_events: sequence lengths differ");
    ConfusionCounts counts;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] && predicted[i]) ++counts.tp;
        else if (!actual[i] && predicted[i]) ++counts.fp;
        else if (!actual[i] && !predicted[i]) ++counts.tn;
        else ++counts.fn;
    }
    return counts;
}

double f1_score(const ConfusionCounts& counts) {
    double denom = 2.0 * static_cast<double>(counts.tp) + static_cast<double>(counts.fp) +
                   static_cast<double>(counts.fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(counts.tp) / denom;
}

double false_alarm_rate(const ConfusionCounts& counts) {
    double denom = static_cast<double>(counts.fp) + static_cast<double>(counts.tn);
    if (denom == 0.0) return 0.0;
    return static_cast<double>(counts.fp) / denom;
}

}  // namespace fanetkoop
