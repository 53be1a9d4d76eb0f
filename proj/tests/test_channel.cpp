#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fanetkoop/channel.hpp"
#include "fanetkoop/dynamics.hpp"

using namespace fanetkoop;

namespace {

// Independent nested-loop evaluation of the SINR definition, kept free of
// any library code paths.
double oracle_sinr(int i, int j, const std::vector<Position>& pos, const ChannelParams& p) {
    auto dist = [&](int a, int b) {
        double dx = pos[static_cast<std::size_t>(a)].x - pos[static_cast<std::size_t>(b)].x;
        double dy = pos[static_cast<std::size_t>(a)].y - pos[static_cast<std::size_t>(b)].y;
        return std::sqrt(dx * dx + dy * dy);
    };
    double noise = std::pow(10.0, p.noise_density_dbm / 10.0) / 1000.0 * p.bandwidth;
    double signal = p.tx_power * std::pow(dist(i, j), -p.path_loss_exponent);
    double interference = 0.0;
    for (int k = 0; k < static_cast<int>(pos.size()); ++k) {
        if (k == j || k == i) continue;
        interference += p.tx_power * std::pow(dist(i, k), -p.path_loss_exponent);
    }
    return signal / (noise + interference);
}

std::vector<Position> random_positions(Rng& rng, int n, double extent) {
    std::vector<Position> pos;
    for (int i = 0; i < n; ++i) pos.push_back({rng.uniform(0, extent), rng.uniform(0, extent)});
    return pos;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("hand-evaluated two-node SINR at 100 m") {
    ChannelParams p;  // Table I defaults: 0.1 W, eta 2, -174 dBm/Hz, 1 MHz
    std::vector<Position> pos{{0, 0}, {100, 0}};
    double gamma = sinr(0, 1, pos, p);
    // signal 1e-5 W over noise 10^-14.4 W; within 0.1 dB of 2.512e9
    CHECK(std::abs(10.0 * std::log10(gamma / 2.512e9)) < 0.1);
    CHECK(gamma == doctest::Approx(oracle_sinr(0, 1, pos, p)).epsilon(1e-14));
}

TEST_CASE("no interference: doubling distance divides SINR by 4 at eta=2") {
    ChannelParams p;
    std::vector<Position> near{{0, 0}, {100, 0}};
    std::vector<Position> far{{0, 0}, {200, 0}};
    CHECK(sinr(0, 1, far, p) == doctest::Approx(sinr(0, 1, near, p) / 4.0).epsilon(1e-12));
}

TEST_CASE("interference-limited symmetric pair tends to 0 dB") {
    ChannelParams p;
    p.noise_density_dbm = -350.0;  // drive noise to ~0
    std::vector<Position> pos{{0, 0}, {100, 0}, {0, 100}};  // sender and interferer equidistant
    CHECK(sinr(0, 1, pos, p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coincident positions raise a degenerate-geometry error") {
    ChannelParams p;
    std::vector<Position> pos{{5, 5}, {5, 5}};
    CHECK_THROWS_AS(sinr(0, 1, pos, p), GeometryError);
    CHECK_THROWS_AS(sinr_snapshot(pos, p, 0), GeometryError);
}

TEST_CASE("snapshot: two nodes give a 2x1 matrix matching pairwise sinr") {
    ChannelParams p;
    std::vector<Position> pos{{0, 0}, {321, 50}};
    SinrSnapshot snap = sinr_snapshot(pos, p, 7);
    REQUIRE(snap.values.rows() == 2);
    REQUIRE(snap.values.cols() == 1);
    CHECK(snap.t == 7);
    CHECK(snap.values(0, 0) == doctest::Approx(sinr(0, 1, pos, p)).epsilon(1e-14));
    CHECK(snap.values(1, 0) == doctest::Approx(sinr(1, 0, pos, p)).epsilon(1e-14));
}

TEST_CASE("snapshot: row ordering skips the receiver") {
    ChannelParams p;
    Rng rng(5);
    std::vector<Position> pos = random_positions(rng, 5, 800.0);
    SinrSnapshot snap = sinr_snapshot(pos, p, 0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i == j) continue;
            CHECK(snap.values(i, sender_column(i, j)) ==
                  doctest::Approx(sinr(i, j, pos, p)).epsilon(1e-14));
            CHECK(column_sender(i, sender_column(i, j)) == j);
        }
}

TEST_CASE("snapshot equals the nested-loop oracle on 100 random configurations") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 5.0);  // L in 2..6
        ChannelParams p;
        p.tx_power = rng.uniform(0.01, 1.0);
        p.path_loss_exponent = rng.uniform(2.0, 4.0);
        p.bandwidth = rng.uniform(1e5, 1e7);
        std::vector<Position> pos = random_positions(rng, n, 1000.0);
        SinrSnapshot snap = sinr_snapshot(pos, p, trial);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double expect = oracle_sinr(i, j, pos, p);
                double got = snap.values(i, sender_column(i, j));
                CHECK(std::abs(got - expect) / expect < 1e-12);
            }
    }
}

TEST_CASE("self-interference switch kills the link (literal sum over k != j)") {
    ChannelParams p;
    p.self_interference = true;
    std::vector<Position> pos{{0, 0}, {100, 0}};
    CHECK(sinr(0, 1, pos, p) == 0.0);
    SinrSnapshot snap = sinr_snapshot(pos, p, 0);
    CHECK(snap.values(0, 0) == 0.0);
}

TEST_CASE("monotonicity: SINR strictly decreases with link distance") {
    ChannelParams p;
    std::vector<Position> pos{{0, 0}, {100, 0}, {0, 400}};  // interferer fixed
    double previous = sinr(0, 1, pos, p);
    for (double d = 120; d <= 300; d += 20) {
        pos[1] = {d, 0};
        double g = sinr(0, 1, pos, p);
        CHECK(g < previous);
        previous = g;
    }
}

TEST_CASE("neighbor sets: threshold logic and nesting") {
    ChannelParams p;
    Rng rng(77);
    std::vector<Position> pos = random_positions(rng, 4, 600.0);
    SinrSnapshot snap = sinr_snapshot(pos, p, 0);

    SUBCASE("single comparison") {
        Eigen::MatrixXd v(2, 1);
        v << 5.0, 1.0;
        SinrSnapshot two{v, 0};
        std::vector<int> n0 = neighbor_set(two, 0, 2.0);
        REQUIRE(n0.size() == 1);
        CHECK(n0[0] == 1);
        CHECK(neighbor_set(two, 1, 2.0).empty());
    }

    SUBCASE("matches brute-force filter") {
        double kappa = 0.5;
        for (int i = 0; i < 4; ++i) {
            std::vector<int> expect;
            for (int j = 0; j < 4; ++j)
                if (j != i && snap.values(i, sender_column(i, j)) >= kappa) expect.push_back(j);
            CHECK(neighbor_set(snap, i, kappa) == expect);
        }
    }

    SUBCASE("kappa1 <= kappa2 nests neighbor sets") {
        for (double k1 : {0.1, 0.5}) {
            double k2 = k1 * 4.0;
            for (int i = 0; i < 4; ++i) {
                std::vector<int> loose = neighbor_set(snap, i, k1);
                std::vector<int> tight = neighbor_set(snap, i, k2);
                CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));
            }
        }
    }
}

TEST_CASE("isolation flags: disjunction and subset relation over a run") {
    ChannelParams p;

    SUBCASE("no UAV isolated means no network event") {
        Eigen::MatrixXd v(2, 1);
        v << 5.0, 5.0;
        IsolationFlags flags = isolation_flags({v, 0}, 1.0);
        CHECK_FALSE(flags.per_uav[0]);
        CHECK_FALSE(flags.per_uav[1]);
        CHECK_FALSE(flags.network);
    }

    SUBCASE("one isolated UAV raises the network event") {
        Eigen::MatrixXd v(2, 1);
        v << 0.5, 5.0;
        IsolationFlags flags = isolation_flags({v, 0}, 1.0);
        CHECK(flags.per_uav[0]);
        CHECK_FALSE(flags.per_uav[1]);
        CHECK(flags.network);
    }

    SUBCASE("network event count dominates every per-UAV count over 2000 steps") {
        ScenarioSpec spec;
        FleetScenario fleet = sample_fleet(spec, 3);
        std::vector<Trajectory> trajs;
        for (const auto& u : fleet.uavs)
            trajs.push_back(simulate_trajectory(u, fleet.wind, 2000));
        double kappa = 1.0;  // 0 dB, the regime where events flip
        long network = 0;
        std::vector<long> per_uav(fleet.uavs.size(), 0);
        long brute_network = 0;
        for (int t = 0; t <= 2000; ++t) {
            std::vector<Position> pos;
            for (const auto& traj : trajs)
                pos.push_back({traj[static_cast<std::size_t>(t)].x,
                               traj[static_cast<std::size_t>(t)].y});
            SinrSnapshot snap = sinr_snapshot(pos, p, t);
            IsolationFlags flags = isolation_flags(snap, kappa);
            if (flags.network) ++network;
            bool any = false;
            for (std::size_t i = 0; i < per_uav.size(); ++i) {
                bool isolated = neighbor_set(snap, static_cast<int>(i), kappa).empty();
                CHECK(isolated == flags.per_uav[i]);
                if (isolated) {
                    ++per_uav[i];
                    any = true;
                }
            }
            if (any) ++brute_network;
        }
        CHECK(network == brute_network);
        for (long count : per_uav) CHECK(network >= count);
    }
}

TEST_CASE("kappa_from_radius") {
    ChannelParams p;

    SUBCASE("100 m map matches the hand SINR value") {
        double kappa = kappa_from_radius(100.0, p);
        CHECK(std::abs(10.0 * std::log10(kappa / 2.512e9)) < 0.1);
    }

    SUBCASE("doubling the radius divides kappa by 4 at eta=2") {
        CHECK(kappa_from_radius(400.0, p) ==
              doctest::Approx(kappa_from_radius(200.0, p) / 4.0).epsilon(1e-12));
    }

    SUBCASE("Table I radius 500 m") {
        double expect = 0.1 * std::pow(500.0, -2.0) / (std::pow(10.0, -17.4) * 1e6);
        CHECK(kappa_from_radius(500.0, p) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(kappa_from_radius(500.0, p) == doctest::Approx(1.005e8).epsilon(1e-3));
    }

    SUBCASE("non-positive radius rejected") {
        CHECK_THROWS_AS(kappa_from_radius(0.0, p), ValidationError);
    }
}

}  // TEST_SUITE
