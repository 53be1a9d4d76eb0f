#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fanetkoop/common.hpp"

namespace fanetkoop {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct ChannelParams {
    double tx_power = 0.1;             // watts, uniform across UAVs
    double noise_density_dbm = -174.0; // N0 in dBm/Hz
    double bandwidth = 1e6;            // Hz
    double path_loss_exponent = 2.0;   // eta
    double kappa = 1.0;                // SINR threshold, linear ratio
    bool self_interference = false;    // include k == i in the interference sum

    /// Thermal noise power N0*B in watts.
    double noise_power() const;

    void validate() const;
};

/// Row i holds the SINRs received at UAV i from every other UAV, senders in
/// ascending index order with i skipped: matrix is L x (L-1), linear ratio.
struct SinrSnapshot {
    Eigen::MatrixXd values;
    int t = 0;

    int uav_count() const { return static_cast<int>(values.rows()); }
};

struct IsolationFlags {
    std::vector<bool> per_uav;
    bool network = false;
};

/// Column index of sender j within row i (senders ascending, i skipped).
inline int sender_column(int i, int j) { return j < i ? j : j - 1; }

/// Sender index for column c of row i.
inline int column_sender(int i, int c) { return c < i ? c : c + 1; }

/// SINR received at UAV i from UAV j: signal P_j * d_ij^-eta over thermal
/// noise plus co-channel interference from every other simultaneous
/// transmitter. The receiver's own transmission is excluded from the
/// interference sum unless self_interference is set.
double sinr(int receiver, int sender, const std::vector<Position>& positions,
            const ChannelParams& params);

SinrSnapshot sinr_snapshot(const std::vector<Position>& positions,
                           const ChannelParams& params, int t);

/// N_i = { j : gamma_{i<-j} >= kappa }.
std::vector<int> neighbor_set(const SinrSnapshot& snapshot, int i, double kappa);

/// Per-UAV isolation (empty neighbor set) and the network-level disjunction.
IsolationFlags isolation_flags(const SinrSnapshot& snapshot, double kappa);

/// SINR threshold equivalent to a nominal communication radius: the
/// noise-only SINR at distance R, kappa = P * R^-eta / (N0 * B).
double kappa_from_radius(double radius, const ChannelParams& params);

}  // namespace fanetkoop
