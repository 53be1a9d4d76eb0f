#include "fanetkoop/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fanetkoop {

double ChannelParams::noise_power() const {
    // dBm/Hz -> W/Hz, times bandwidth
    return std::pow(10.0, noise_density_dbm / 10.0) * 1e-3 * bandwidth;
}

void ChannelParams::validate() const {
    if (tx_power <= 0.0) throw ValidationError("channel: transmit power must be positive");
    if (bandwidth <= 0.0) throw ValidationError("channel: bandwidth must be positive");
    if (path_loss_exponent <= 0.0)
        throw ValidationError("channel: path-loss exponent must be positive");
    if (kappa <= 0.0) throw ValidationError("channel: SINR threshold kappa must be positive");
}

namespace {

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double received_power(double tx_power, double d, double eta) {
    return tx_power * std::pow(d, -eta);
}

void check_distinct(const std::vector<Position>& positions) {
    int n = static_cast<int>(positions.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (distance(positions[i], positions[j]) == 0.0)
                throw GeometryError("coincident UAV positions (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
}

}  // namespace

double sinr(int receiver, int sender, const std::vector<Position>& positions,
            const ChannelParams& params) {
    int n = static_cast<int>(positions.size());
    if (receiver == sender) throw ValidationError("sinr: receiver == sender");
    if (receiver < 0 || receiver >= n || sender < 0 || sender >= n)
        throw ValidationError("sinr: node index out of range");
    check_distinct(positions);

    double eta = params.path_loss_exponent;
    double signal = received_power(params.tx_power, distance(positions[receiver], positions[sender]), eta);
    double interference = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == sender) continue;
        if (k == receiver && !params.self_interference) continue;
        double d = distance(positions[receiver], positions[k]);
        interference += (d == 0.0) ? std::numeric_limits<double>::infinity()
                                   : received_power(params.tx_power, d, eta);
    }
    return signal / (params.noise_power() + interference);
}

SinrSnapshot sinr_snapshot(const std::vector<Position>& positions, const ChannelParams& params,
                           int t) {
    int n = static_cast<int>(positions.size());
    if (n < 2) throw ValidationError("sinr_snapshot: need at least 2 UAVs");
    check_distinct(positions);

    double eta = params.path_loss_exponent;
    double noise = params.noise_power();

    // received power matrix and row totals; one pass instead of per-pair sums
    Eigen::MatrixXd pw = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) pw(i, j) = received_power(params.tx_power, distance(positions[i], positions[j]), eta);

    SinrSnapshot snap;
    snap.t = t;
    snap.values.resize(n, n - 1);
    for (int i = 0; i < n; ++i) {
        double total = pw.row(i).sum();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double interference = total - pw(i, j);
            if (params.self_interference)
                interference = std::numeric_limits<double>::infinity();
            snap.values(i, sender_column(i, j)) = pw(i, j) / (noise + interference);
        }
    }
    return snap;
}

std::vector<int> neighbor_set(const SinrSnapshot& snapshot, int i, double kappa) {
    int n = snapshot.uav_count();
    if (i < 0 || i >= n) throw ValidationError("neighbor_set: node index out of range");
    std::vector<int> neighbors;
    for (int c = 0; c < n - 1; ++c)
        if (snapshot.values(i, c) >= kappa) neighbors.push_back(column_sender(i, c));
    return neighbors;
}

IsolationFlags isolation_flags(const SinrSnapshot& snapshot, double kappa) {
    int n = snapshot.uav_count();
    IsolationFlags flags;
    flags.per_uav.resize(n);
    for (int i = 0; i < n; ++i) {
        bool isolated = (snapshot.values.row(i).array() < kappa).all();
        flags.per_uav[i] = isolated;
        flags.network = flags.network || isolated;
    }
    return flags;
}

double kappa_from_radius(double radius, const ChannelParams& params) {
    if (radius <= 0.0) throw ValidationError("kappa_from_radius: radius must be positive");
    return params.tx_power * std::pow(radius, -params.path_loss_exponent) / params.noise_power();
}

}  // namespace fanetkoop
