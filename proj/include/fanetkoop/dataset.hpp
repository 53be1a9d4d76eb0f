#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fanetkoop/config.hpp"
#include "fanetkoop/graph.hpp"

namespace fanetkoop {

/// Simulated scenario plus derived channel observations. Snapshots are
/// always recomputable from trajectories + channel parameters; the loader
/// verifies that consistency and the config hash.
struct Dataset {
    ExperimentConfig config;
    FleetScenario fleet;
    std::vector<Trajectory> trajectories;     // one per UAV, length steps+1
    std::vector<SinrSnapshot> sinr;           // length steps+1

    int uav_count() const { return static_cast<int>(trajectories.size()); }
    int snapshot_count() const { return static_cast<int>(sinr.size()); }

    std::vector<Position> positions_at(int t) const;
    /// Graph snapshot at t under the dataset's channel threshold.
    GraphSnapshot graph_at(int t) const;
    GraphSnapshot graph_at(int t, double kappa) const;
    /// Per-UAV SINR series: rows are time steps, columns the L-1 senders.
    Eigen::MatrixXd series_for(int uav) const;
};

/// Simulate trajectories and SINR snapshots for the configured scenario.
Dataset generate_dataset(const ExperimentConfig& config);

/// Write trajectories.csv, sinr.csv and manifest.cfg under dir.
void save_dataset(const Dataset& dataset, const std::string& dir);

/// Load and verify (config hash, count contracts, snapshot consistency).
Dataset load_dataset(const std::string& dir);

}  // namespace fanetkoop
