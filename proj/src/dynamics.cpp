#include "fanetkoop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fanetkoop {

namespace {

bool all_finite(const UavState& s) {
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.psi);
}

}  // namespace

double UavParams::orbit_radius() const {
    if (turning_rate == 0.0) return std::numeric_limits<double>::infinity();
    return forward_velocity / std::abs(turning_rate);
}

void ScenarioSpec::validate() const {
    if (uav_count < 2) throw ValidationError("scenario: at least 2 UAVs required");
    if (area_width <= 0.0 || area_height <= 0.0)
        throw ValidationError("scenario: area dimensions must be positive");
    if (velocity_min > velocity_max || turn_rate_min > turn_rate_max)
        throw ValidationError("scenario: sampling range has min > max");
    if (velocity_min < 0.0) throw ValidationError("scenario: velocity must be non-negative");
    if (turn_rate_min <= 0.0)
        throw ValidationError("scenario: turning rate must be positive (circling orbits)");
    if (wind.velocity < 0.0) throw ValidationError("scenario: wind velocity must be non-negative");
}

UavState step_uav(const UavState& state, const UavParams& params, const WindParams& wind) {
    UavState next;
    next.x = state.x + params.forward_velocity * std::cos(state.psi) +
             wind.velocity * std::cos(wind.angle);
    next.y = state.y + params.forward_velocity * std::sin(state.psi) +
             wind.velocity * std::sin(wind.angle);
    next.psi = wrap_angle(state.psi + params.turning_rate);
    return next;
}

Trajectory simulate_trajectory(const UavState& initial, const UavParams& params,
                               const WindParams& wind, int steps) {
    if (steps < 0) throw ValidationError("simulate_trajectory: steps must be >= 0");
    if (!all_finite(initial)) throw ValidationError("simulate_trajectory: non-finite state");
    Trajectory traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(initial);
    for (int t = 0; t < steps; ++t) traj.push_back(step_uav(traj.back(), params, wind));
    return traj;
}

Trajectory simulate_trajectory(const UavParams& params, const WindParams& wind, int steps) {
    UavState init{params.initial_x, params.initial_y, wrap_angle(params.initial_heading)};
    return simulate_trajectory(init, params, wind, steps);
}

namespace {

struct Orbit {
    double cx, cy;      // orbit center
    double radius;      // u / r
    double margin;      // 2u annulus half-thickness
};

// Annuli [radius - margin, radius + margin] around each center are disjoint
// when separated or when one ring lies entirely inside the other's hole.
bool annuli_disjoint(const Orbit& a, const Orbit& b) {
    double d = std::hypot(a.cx - b.cx, a.cy - b.cy);
    double ao = a.radius + a.margin, bo = b.radius + b.margin;
    double ai = a.radius - a.margin, bi = b.radius - b.margin;
    if (d > ao + bo) return true;
    if (d + ao < bi) return true;
    if (d + bo < ai) return true;
    return false;
}

}  // namespace

FleetScenario sample_fleet(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    constexpr int kFleetRestarts = 20000;
    constexpr int kPerUavAttempts = 200;

    Rng rng(seed);
    const double half_min = std::min(spec.area_width, spec.area_height) / 2.0;

    for (int restart = 0; restart < kFleetRestarts; ++restart) {
        std::vector<Orbit> orbits;
        std::vector<UavParams> uavs;
        bool fleet_ok = true;
        for (int l = 0; l < spec.uav_count && fleet_ok; ++l) {
            bool placed = false;
            for (int k = 0; k < kPerUavAttempts; ++k) {
                double u = rng.uniform(spec.velocity_min, spec.velocity_max);
                double r = rng.uniform(spec.turn_rate_min, spec.turn_rate_max);
                Orbit orb{0.0, 0.0, u / r, 2.0 * u};
                double reach = orb.radius + orb.margin;
                if (reach > half_min) continue;
                orb.cx = rng.uniform(reach, spec.area_width - reach);
                orb.cy = rng.uniform(reach, spec.area_height - reach);
                bool clear = std::all_of(orbits.begin(), orbits.end(), [&](const Orbit& o) {
                    return annuli_disjoint(orb, o);
                });
                if (!clear) continue;
                double psi0 = rng.uniform(0.0, kTwoPi);
                UavParams p;
                p.forward_velocity = u;
                p.turning_rate = r;
                p.initial_heading = psi0;
                // start on the circle so the orbit center is cx, cy
                p.initial_x = orb.cx + orb.radius * std::sin(psi0);
                p.initial_y = orb.cy - orb.radius * std::cos(psi0);
                orbits.push_back(orb);
                uavs.push_back(p);
                placed = true;
                break;
            }
            if (!placed) fleet_ok = false;
        }
        if (fleet_ok) {
            FleetScenario fleet;
            fleet.uavs = std::move(uavs);
            fleet.wind = spec.wind;
            fleet.area_width = spec.area_width;
            fleet.area_height = spec.area_height;
            fleet.rng_seed = seed;
            return fleet;
        }
    }
    throw PlacementError("sample_fleet: could not place " + std::to_string(spec.uav_count) +
                         " non-overlapping orbits in " + std::to_string(spec.area_width) + " x " +
                         std::to_string(spec.area_height) + " m area");
}

}  // namespace fanetkoop
