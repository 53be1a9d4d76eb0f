#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "fanetkoop/dynamics.hpp"

using namespace fanetkoop;

TEST_SUITE("dynamics") {

TEST_CASE("step: zero velocity is a fixed point") {
    UavState s{0, 0, 0};
    UavState next = step_uav(s, UavParams{0, 0, 0, 0, 0}, WindParams{0, 0});
    CHECK(next.x == 0.0);
    CHECK(next.y == 0.0);
    CHECK(next.psi == 0.0);
}

TEST_CASE("step: unit velocity along heading zero") {
    UavState next = step_uav({0, 0, 0}, UavParams{1.0, 0.1, 0, 0, 0}, {0, 0});
    CHECK(next.x == doctest::Approx(1.0));
    CHECK(next.y == doctest::Approx(0.0));
    CHECK(next.psi == doctest::Approx(0.1));
}

TEST_CASE("step: substitution with wind") {
    // psi = pi/2, u = 10, r = 0.05, wind 2 m/step along angle 0
    UavState next = step_uav({0, 0, kPi / 2}, UavParams{10, 0.05, 0, 0, 0}, {2.0, 0.0});
    double ex = 0 + 10 * std::cos(kPi / 2) + 2 * std::cos(0.0);
    double ey = 0 + 10 * std::sin(kPi / 2) + 2 * std::sin(0.0);
    CHECK(next.x == doctest::Approx(ex).epsilon(1e-15));
    CHECK(next.y == doctest::Approx(ey).epsilon(1e-15));
    CHECK(next.x == doctest::Approx(2.0));
    CHECK(next.y == doctest::Approx(10.0));
    CHECK(next.psi == doctest::Approx(kPi / 2 + 0.05));
}

TEST_CASE("trajectory: zero velocity keeps position") {
    Trajectory traj = simulate_trajectory({3, 4, 1}, UavParams{0, 0.2, 0, 0, 0}, {0, 0}, 50);
    REQUIRE(traj.size() == 51);
    for (const auto& s : traj) {
        CHECK(s.x == 3.0);
        CHECK(s.y == 4.0);
    }
}

TEST_CASE("trajectory: heading is linear in t") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        double psi0 = rng.uniform(0, kTwoPi);
        double r = rng.uniform(-0.3, 0.3);
        Trajectory traj =
            simulate_trajectory({0, 0, psi0}, UavParams{5, r, psi0, 0, 0}, {0, 0}, 100);
        for (int t = 0; t <= 100; ++t) {
            double expected = wrap_angle(psi0 + r * t);
            // both sides wrap; compare on the circle
            double diff = std::remainder(traj[static_cast<std::size_t>(t)].psi - expected, kTwoPi);
            CHECK(std::abs(diff) < 1e-9);
        }
    }
}

TEST_CASE("trajectory: polygonal closure for r = 2*pi/N") {
    for (int n : {8, 36, 360}) {
        for (double u : {10.0, 12.5, 15.0}) {
            double r = kTwoPi / n;
            Trajectory traj = simulate_trajectory({0, 0, 0.37}, UavParams{u, r, 0, 0, 0},
                                                  {0, 0}, n);
            double dist = std::hypot(traj.back().x - traj.front().x,
                                     traj.back().y - traj.front().y);
            CHECK(dist < 1e-6);
        }
    }
}

TEST_CASE("trajectory: wind superposition") {
    UavParams p{12.0, 0.03, 1.0, 0, 0};
    WindParams wind{1.5, 0.8};
    Trajectory with = simulate_trajectory({0, 0, 1.0}, p, wind, 200);
    Trajectory without = simulate_trajectory({0, 0, 1.0}, p, {0, 0}, 200);
    double wx = wind.velocity * std::cos(wind.angle);
    double wy = wind.velocity * std::sin(wind.angle);
    for (int t = 0; t <= 200; ++t) {
        double ex = without[static_cast<std::size_t>(t)].x + t * wx;
        double ey = without[static_cast<std::size_t>(t)].y + t * wy;
        CHECK(with[static_cast<std::size_t>(t)].x ==
              doctest::Approx(ex).epsilon(1e-9));
        CHECK(with[static_cast<std::size_t>(t)].y ==
              doctest::Approx(ey).epsilon(1e-9));
    }
}

TEST_CASE("sample_fleet: deterministic per seed") {
    ScenarioSpec spec;
    FleetScenario a = sample_fleet(spec, 42);
    FleetScenario b = sample_fleet(spec, 42);
    REQUIRE(a.uavs.size() == b.uavs.size());
    for (std::size_t i = 0; i < a.uavs.size(); ++i) {
        CHECK(a.uavs[i].forward_velocity == b.uavs[i].forward_velocity);
        CHECK(a.uavs[i].turning_rate == b.uavs[i].turning_rate);
        CHECK(a.uavs[i].initial_heading == b.uavs[i].initial_heading);
        CHECK(a.uavs[i].initial_x == b.uavs[i].initial_x);
        CHECK(a.uavs[i].initial_y == b.uavs[i].initial_y);
    }
    FleetScenario c = sample_fleet(spec, 43);
    CHECK(a.uavs[0].initial_x != c.uavs[0].initial_x);
}

TEST_CASE("sample_fleet: table1 ranges and disjoint annuli") {
    ScenarioSpec spec;  // defaults are the Table I scenario
    for (std::uint64_t seed : {1, 2, 3}) {
        FleetScenario fleet = sample_fleet(spec, seed);
        REQUIRE(fleet.uavs.size() == 4);
        for (const auto& u : fleet.uavs) {
            CHECK(u.forward_velocity >= 10.0);
            CHECK(u.forward_velocity <= 15.0);
            CHECK(u.turning_rate >= 0.01);
            CHECK(u.turning_rate <= 0.05);
        }
        // orbit centers and annuli: in-area and pairwise disjoint
        std::vector<std::array<double, 4>> annuli;  // cx, cy, rho, margin
        for (const auto& u : fleet.uavs) {
            double rho = u.orbit_radius();
            double cx = u.initial_x - rho * std::sin(u.initial_heading);
            double cy = u.initial_y + rho * std::cos(u.initial_heading);
            double m = 2 * u.forward_velocity;
            CHECK(cx - rho - m >= 0.0);
            CHECK(cx + rho + m <= spec.area_width);
            CHECK(cy - rho - m >= 0.0);
            CHECK(cy + rho + m <= spec.area_height);
            annuli.push_back({cx, cy, rho, m});
        }
        for (std::size_t i = 0; i < annuli.size(); ++i)
            for (std::size_t j = i + 1; j < annuli.size(); ++j) {
                double d = std::hypot(annuli[i][0] - annuli[j][0], annuli[i][1] - annuli[j][1]);
                double oi = annuli[i][2] + annuli[i][3], oj = annuli[j][2] + annuli[j][3];
                double ii = annuli[i][2] - annuli[i][3], ij = annuli[j][2] - annuli[j][3];
                bool separated = d > oi + oj;
                bool nested = (d + oi < ij) || (d + oj < ii);
                CHECK((separated || nested));
            }
    }
}

TEST_CASE("sample_fleet: impossible area fails") {
    ScenarioSpec spec;
    spec.area_width = 10.0;
    spec.area_height = 10.0;
    CHECK_THROWS_AS(sample_fleet(spec, 1), PlacementError);
}

TEST_CASE("scenario validation") {
    ScenarioSpec spec;
    spec.uav_count = 1;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
    spec = ScenarioSpec{};
    spec.velocity_min = 20.0;  // min > max
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("simulated fleet trajectories satisfy the step equations") {
    ScenarioSpec spec;
    FleetScenario fleet = sample_fleet(spec, 9);
    for (const auto& params : fleet.uavs) {
        Trajectory traj = simulate_trajectory(params, fleet.wind, 64);
        for (std::size_t t = 0; t + 1 < traj.size(); ++t) {
            UavState expect = step_uav(traj[t], params, fleet.wind);
            CHECK(traj[t + 1].x == expect.x);
            CHECK(traj[t + 1].y == expect.y);
            CHECK(traj[t + 1].psi == expect.psi);
        }
    }
}

}  // TEST_SUITE
