#pragma once

#include <cstdint>
#include <vector>

#include "fanetkoop/common.hpp"

namespace fanetkoop {

/// Fixed-wing kinematic parameters. Units are per simulation step
/// (step length is one second, so m/s values add directly to meters).
struct UavParams {
    double forward_velocity = 0.0;  // u, meters/step
    double turning_rate = 0.0;      // r, radians/step
    double initial_heading = 0.0;   // psi0 in [0, 2*pi)
    double initial_x = 0.0;
    double initial_y = 0.0;

    /// Turn circle radius u/r (infinite for straight flight).
    double orbit_radius() const;
};

struct WindParams {
    double velocity = 0.0;  // meters/step
    double angle = 0.0;     // radians
};

struct UavState {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;  // heading, kept in [0, 2*pi)
};

/// Time-ordered states with implicit unit step; length steps+1.
using Trajectory = std::vector<UavState>;

/// Ranges and counts used by sample_fleet.
struct ScenarioSpec {
    int uav_count = 4;
    double area_width = 1000.0;
    double area_height = 1000.0;
    double velocity_min = 10.0;
    double velocity_max = 15.0;
    double turn_rate_min = 0.01;
    double turn_rate_max = 0.05;
    WindParams wind{1e-8, 1e-8};

    void validate() const;
};

struct FleetScenario {
    std::vector<UavParams> uavs;
    WindParams wind;
    double area_width = 0.0;
    double area_height = 0.0;
    std::uint64_t rng_seed = 0;
};

/// One step of the discrete-time kinematics. The position update uses the
/// pre-update heading; the heading then advances by the turning rate.
UavState step_uav(const UavState& state, const UavParams& params, const WindParams& wind);

/// Iterate step_uav; element 0 of the result is `initial`.
Trajectory simulate_trajectory(const UavState& initial, const UavParams& params,
                               const WindParams& wind, int steps);

Trajectory simulate_trajectory(const UavParams& params, const WindParams& wind, int steps);

/// Sample a fleet whose circling orbits all fit inside the area and whose
/// orbit annuli (radius u/r with a 2u margin on each side) are pairwise
/// disjoint; annuli may nest. Rejection sampling restarts the whole fleet
/// when a UAV cannot be placed; throws PlacementError once the attempt
/// budget is exhausted. Deterministic for a fixed seed.
FleetScenario sample_fleet(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace fanetkoop
