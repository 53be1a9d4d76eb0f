#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "fanetkoop/channel.hpp"

namespace fanetkoop {

/// Directed edge list, lexicographically sorted (receiver, sender) pairs.
using EdgeSet = std::vector<std::pair<int, int>>;

/// Time-varying graph quadruple G(t): nodes are implicit 0..L-1, E(t) holds
/// directed edges (i, j) with gamma_{i<-j} >= kappa, S(t) is the L x (L-1)
/// SINR feature matrix and W(t) the L x L distance-weighted adjacency
/// (W_ij = d_ij when (i, j) is an edge, 0 otherwise; zero diagonal).
struct GraphSnapshot {
    int node_count = 0;
    EdgeSet edges;
    Eigen::MatrixXd features;  // S(t), linear-ratio SINR
    Eigen::MatrixXd weights;   // W(t), meters
    int t = 0;
};

GraphSnapshot build_snapshot(const std::vector<Position>& positions,
                             const ChannelParams& params, int t);

/// Edge reconstruction rule applied to (predicted) features: an edge (i, j)
/// exists when the feature for sender j in row i reaches kappa. Weights are
/// not recoverable from SINR, so reconstructed snapshots carry only edges.
EdgeSet edges_from_features(const Eigen::MatrixXd& features, double kappa);

/// Isolation flags derived from a feature matrix via the edge rule.
IsolationFlags isolation_from_features(const Eigen::MatrixXd& features, double kappa);

}  // namespace fanetkoop
