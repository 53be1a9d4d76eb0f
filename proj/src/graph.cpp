#include "fanetkoop/graph.hpp"

#include <cmath>

namespace fanetkoop {

GraphSnapshot build_snapshot(const std::vector<Position>& positions, const ChannelParams& params,
                             int t) {
    SinrSnapshot snap = sinr_snapshot(positions, params, t);
    int n = snap.uav_count();

    GraphSnapshot g;
    g.node_count = n;
    g.t = t;
    g.features = snap.values;
    g.weights = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (snap.values(i, sender_column(i, j)) >= params.kappa) {
                g.edges.emplace_back(i, j);
                g.weights(i, j) =
                    std::hypot(positions[i].x - positions[j].x, positions[i].y - positions[j].y);
            }
        }
    }
    return g;
}

EdgeSet edges_from_features(const Eigen::MatrixXd& features, double kappa) {
    int n = static_cast<int>(features.rows());
    if (features.cols() != n - 1)
        throw ValidationError("edges_from_features: expected L x (L-1) feature matrix");
    EdgeSet edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && features(i, sender_column(i, j)) >= kappa) edges.emplace_back(i, j);
    return edges;
}

IsolationFlags isolation_from_features(const Eigen::MatrixXd& features, double kappa) {
    int n = static_cast<int>(features.rows());
    IsolationFlags flags;
    flags.per_uav.resize(n);
    for (int i = 0; i < n; ++i) {
        bool isolated = (features.row(i).array() < kappa).all();
        flags.per_uav[i] = isolated;
        flags.network = flags.network || isolated;
    }
    return flags;
}

}  // namespace fanetkoop
