#include "fanetkoop/dataset.hpp"

#include <filesystem>
#include <sstream>

#include "fanetkoop/csv.hpp"
#include "fanetkoop/parallel.hpp"

namespace fanetkoop {

std::vector<Position> Dataset::positions_at(int t) const {
    std::vector<Position> pos;
    pos.reserve(trajectories.size());
    for (const auto& traj : trajectories) {
        const UavState& s = traj.at(static_cast<std::size_t>(t));
        pos.push_back({s.x, s.y});
    }
    return pos;
}

GraphSnapshot Dataset::graph_at(int t) const { return graph_at(t, config.kappa_linear()); }

GraphSnapshot Dataset::graph_at(int t, double kappa) const {
    ChannelParams params = config.channel();
    params.kappa = kappa;
    return build_snapshot(positions_at(t), params, t);
}

Eigen::MatrixXd Dataset::series_for(int uav) const {
    if (uav < 0 || uav >= uav_count()) throw ValidationError("series_for: UAV index out of range");
    Eigen::MatrixXd series(snapshot_count(), uav_count() - 1);
    for (int t = 0; t < snapshot_count(); ++t)
        series.row(t) = sinr[static_cast<std::size_t>(t)].values.row(uav);
    return series;
}

Dataset generate_dataset(const ExperimentConfig& config) {
    config.validate();
    Dataset ds;
    ds.config = config;
    ds.fleet = sample_fleet(config.scenario, config.seed);

    ds.trajectories.resize(ds.fleet.uavs.size());
    for (std::size_t l = 0; l < ds.fleet.uavs.size(); ++l)
        ds.trajectories[l] = simulate_trajectory(ds.fleet.uavs[l], ds.fleet.wind, config.steps);

    ChannelParams params = config.channel();
    ds.sinr.resize(static_cast<std::size_t>(config.steps) + 1);
    parallel_for(config.steps + 1, [&](int t) {
        ds.sinr[static_cast<std::size_t>(t)] = sinr_snapshot(ds.positions_at(t), params, t);
    });
    return ds;
}

namespace {

constexpr const char* kManifestName = "manifest.cfg";
constexpr const char* kTrajectoriesName = "trajectories.csv";
constexpr const char* kSinrName = "sinr.csv";

std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);

    std::ostringstream manifest;
    manifest << "# fanetkoop dataset manifest\n";
    manifest << dataset.config.serialize();
    manifest << "dataset.hash = " << hash_hex(dataset.config.dataset_hash()) << "\n";
    write_text_file((base / kManifestName).string(), manifest.str());

    CsvWriter traj({"t", "uav", "x", "y", "psi"});
    for (int t = 0; t < dataset.snapshot_count(); ++t)
        for (int l = 0; l < dataset.uav_count(); ++l) {
            const UavState& s = dataset.trajectories[static_cast<std::size_t>(l)]
                                    [static_cast<std::size_t>(t)];
            traj.add_row({std::to_string(t), std::to_string(l), format_double(s.x),
                          format_double(s.y), format_double(s.psi)});
        }
    traj.write_file((base / kTrajectoriesName).string());

    CsvWriter sinr({"t", "i", "j", "gamma"});
    const int n = dataset.uav_count();
    for (int t = 0; t < dataset.snapshot_count(); ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double g = dataset.sinr[static_cast<std::size_t>(t)].values(i, sender_column(i, j));
                sinr.add_row({std::to_string(t), std::to_string(i), std::to_string(j),
                              format_double(g)});
            }
    sinr.write_file((base / kSinrName).string());
}

Dataset load_dataset(const std::string& dir) {
    const std::filesystem::path base(dir);

    // manifest: config lines plus the recorded dataset hash
    std::string manifest = read_text_file((base / kManifestName).string());
    std::string config_text;
    std::string stored_hash;
    std::istringstream stream(manifest);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.rfind("dataset.hash", 0) == 0) {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw DataError("manifest: malformed dataset.hash line");
            stored_hash = line.substr(eq + 1);
            while (!stored_hash.empty() && stored_hash.front() == ' ') stored_hash.erase(0, 1);
        } else {
            config_text += line;
            config_text += '\n';
        }
    }
    if (stored_hash.empty()) throw DataError("manifest: missing dataset.hash");

    ExperimentConfig config = ExperimentConfig::parse(config_text);
    if (hash_hex(config.dataset_hash()) != stored_hash)
        throw DataError("dataset hash mismatch: manifest was edited or config drifted");

    // regenerate and verify the stored data bit-for-bit
    Dataset ds = generate_dataset(config);

    CsvTable traj = read_csv((base / kTrajectoriesName).string());
    if (static_cast<int>(traj.rows.size()) != ds.snapshot_count() * ds.uav_count())
        throw DataError("trajectories.csv: unexpected row count");
    int ct = traj.column("t"), cu = traj.column("uav"), cx = traj.column("x"),
        cy = traj.column("y"), cp = traj.column("psi");
    for (const auto& row : traj.rows) {
        int t = static_cast<int>(parse_long(row[static_cast<std::size_t>(ct)], "t"));
        int l = static_cast<int>(parse_long(row[static_cast<std::size_t>(cu)], "uav"));
        if (t < 0 || t >= ds.snapshot_count() || l < 0 || l >= ds.uav_count())
            throw DataError("trajectories.csv: index out of range");
        const UavState& s = ds.trajectories[static_cast<std::size_t>(l)]
                                [static_cast<std::size_t>(t)];
        if (parse_double(row[static_cast<std::size_t>(cx)], "x") != s.x ||
            parse_double(row[static_cast<std::size_t>(cy)], "y") != s.y ||
            parse_double(row[static_cast<std::size_t>(cp)], "psi") != s.psi)
            throw DataError("trajectories.csv: stored states do not match the dynamics");
    }

    CsvTable sinr = read_csv((base / kSinrName).string());
    const int n = ds.uav_count();
    if (static_cast<int>(sinr.rows.size()) != ds.snapshot_count() * n * (n - 1))
        throw DataError("sinr.csv: unexpected row count");
    int st = sinr.column("t"), si = sinr.column("i"), sj = sinr.column("j"),
        sg = sinr.column("gamma");
    for (const auto& row : sinr.rows) {
        int t = static_cast<int>(parse_long(row[static_cast<std::size_t>(st)], "t"));
        int i = static_cast<int>(parse_long(row[static_cast<std::size_t>(si)], "i"));
        int j = static_cast<int>(parse_long(row[static_cast<std::size_t>(sj)], "j"));
        if (t < 0 || t >= ds.snapshot_count() || i < 0 || i >= n || j < 0 || j >= n || i == j)
            throw DataError("sinr.csv: index out of range");
        double g = parse_double(row[static_cast<std::size_t>(sg)], "gamma");
        if (g != ds.sinr[static_cast<std::size_t>(t)].values(i, sender_column(i, j)))
            throw DataError("sinr.csv: stored SINR does not match the channel model");
    }
    return ds;
}

}  // namespace fanetkoop
