#include "fanetkoop/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fanetkoop/csv.hpp"

namespace fanetkoop {

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError(context + ": not a number: '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& context) {
    long v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError(context + ": not an integer: '" + s + "'");
    return v;
}

TrainMode parse_train_mode(const std::string& s) {
    if (s == "distributed") return TrainMode::Distributed;
    if (s == "centralized") return TrainMode::Centralized;
    throw ValidationError("mode must be 'distributed' or 'centralized', got '" + s + "'");
}

std::string to_string(TrainMode mode) {
    return mode == TrainMode::Distributed ? "distributed" : "centralized";
}

StartRegion parse_start_region(const std::string& s) {
    if (s == "held_out") return StartRegion::HeldOut;
    if (s == "train") return StartRegion::Train;
    if (s == "full") return StartRegion::Full;
    throw ValidationError("start region must be 'held_out', 'train' or 'full', got '" + s + "'");
}

std::string to_string(StartRegion region) {
    switch (region) {
        case StartRegion::HeldOut: return "held_out";
        case StartRegion::Train: return "train";
        case StartRegion::Full: return "full";
    }
    return "held_out";
}

double SweepPoint::kappa_linear(const ChannelParams& params) const {
    if (kappa_db.has_value() == radius_m.has_value())
        throw ValidationError("sweep point must carry exactly one of kappa_db / radius_m");
    if (kappa_db) return from_db(*kappa_db);
    return kappa_from_radius(*radius_m, params);
}

std::string SweepPoint::label() const {
    if (kappa_db) return "kappa_db=" + format_double(*kappa_db);
    if (radius_m) return "radius_m=" + format_double(*radius_m);
    return "unset";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

bool parse_bool(const std::string& s, const std::string& context) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw ValidationError(context + ": expected on/off, got '" + s + "'");
}

}  // namespace

std::vector<SweepPoint> EvaluationConfig::sweep_points(const ExperimentConfig& cfg) const {
    std::vector<SweepPoint> points;
    SweepPoint base;
    base.kappa_db = cfg.kappa_db;
    base.radius_m = cfg.radius_m;
    points.push_back(base);
    for (double k : kappa_sweep_db) points.push_back({k, std::nullopt});
    for (double r : radius_sweep_m) points.push_back({std::nullopt, r});
    return points;
}

ChannelParams ExperimentConfig::channel() const {
    ChannelParams p = channel_base;
    p.kappa = kappa_linear();
    return p;
}

double ExperimentConfig::kappa_linear() const {
    if (kappa_db.has_value() == radius_m.has_value())
        throw ValidationError("channel: exactly one of kappa_db / radius_m must be set");
    if (kappa_db) return from_db(*kappa_db);
    return kappa_from_radius(*radius_m, channel_base);
}

std::uint64_t ExperimentConfig::effective_training_seed() const {
    return training_seed != 0 ? training_seed : seed;
}

void ExperimentConfig::validate() const {
    scenario.validate();
    if (steps < 1) throw ValidationError("scenario: steps must be >= 1");
    ChannelParams p = channel();
    p.validate();
    training.validate();
    if (evaluation.prediction_steps.empty())
        throw ValidationError("evaluation: prediction step list must not be empty");
    for (int p_steps : evaluation.prediction_steps)
        if (p_steps < 1) throw ValidationError("evaluation: prediction steps must be >= 1");
    if (evaluation.seeds.empty())
        throw ValidationError("evaluation: seed list must not be empty");
}

namespace {

// Canonical key order; serialization and hashing depend on it.
void emit_scenario_channel(std::ostringstream& out, const ExperimentConfig& c) {
    out << "scenario.uavs = " << c.scenario.uav_count << "\n";
    out << "scenario.area_width_m = " << format_double(c.scenario.area_width) << "\n";
    out << "scenario.area_height_m = " << format_double(c.scenario.area_height) << "\n";
    out << "scenario.velocity_min = " << format_double(c.scenario.velocity_min) << "\n";
    out << "scenario.velocity_max = " << format_double(c.scenario.velocity_max) << "\n";
    out << "scenario.turn_rate_min = " << format_double(c.scenario.turn_rate_min) << "\n";
    out << "scenario.turn_rate_max = " << format_double(c.scenario.turn_rate_max) << "\n";
    out << "scenario.wind_velocity = " << format_double(c.scenario.wind.velocity) << "\n";
    out << "scenario.wind_angle = " << format_double(c.scenario.wind.angle) << "\n";
    out << "scenario.seed = " << c.seed << "\n";
    out << "scenario.steps = " << c.steps << "\n";
    out << "channel.tx_power_w = " << format_double(c.channel_base.tx_power) << "\n";
    out << "channel.noise_dbm_hz = " << format_double(c.channel_base.noise_density_dbm) << "\n";
    out << "channel.bandwidth_hz = " << format_double(c.channel_base.bandwidth) << "\n";
    out << "channel.path_loss_exponent = " << format_double(c.channel_base.path_loss_exponent)
        << "\n";
    if (c.kappa_db) out << "channel.kappa_db = " << format_double(*c.kappa_db) << "\n";
    if (c.radius_m) out << "channel.radius_m = " << format_double(*c.radius_m) << "\n";
    out << "channel.self_interference = " << (c.channel_base.self_interference ? "on" : "off")
        << "\n";
}

void emit_training(std::ostringstream& out, const ExperimentConfig& c) {
    out << "training.mode = " << to_string(c.mode) << "\n";
    out << "training.latent_dim = " << c.training.latent_dim << "\n";
    out << "training.embedding_dim = " << c.training.embedding_dim << "\n";
    out << "training.hidden_width = " << c.training.hidden_width << "\n";
    out << "training.horizon = " << c.training.horizon << "\n";
    out << "training.learning_rate = " << format_double(c.training.learning_rate) << "\n";
    out << "training.epochs = " << c.training.epochs << "\n";
    out << "training.batch_size = " << c.training.batch_size << "\n";
    out << "training.split_fraction = " << format_double(c.training.split_fraction) << "\n";
    out << "training.grad_clip = " << format_double(c.training.grad_clip) << "\n";
    out << "training.lr_decay = " << format_double(c.training.lr_decay) << "\n";
    out << "training.affinity_scale = " << format_double(c.training.affinity_scale) << "\n";
    out << "training.binary_adjacency = " << (c.training.binary_adjacency ? "on" : "off") << "\n";
    out << "training.seed = " << c.training_seed << "\n";
}

template <typename T, typename F>
std::string join_list(const std::vector<T>& values, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += fmt(values[i]);
    }
    return out;
}

void emit_evaluation(std::ostringstream& out, const ExperimentConfig& c) {
    out << "evaluation.prediction_steps = "
        << join_list(c.evaluation.prediction_steps, [](int v) { return std::to_string(v); })
        << "\n";
    out << "evaluation.kappa_sweep_db = "
        << join_list(c.evaluation.kappa_sweep_db, [](double v) { return format_double(v); })
        << "\n";
    out << "evaluation.radius_sweep_m = "
        << join_list(c.evaluation.radius_sweep_m, [](double v) { return format_double(v); })
        << "\n";
    out << "evaluation.seeds = "
        << join_list(c.evaluation.seeds,
                     [](std::uint64_t v) { return std::to_string(v); })
        << "\n";
    out << "evaluation.error_domain = "
        << (c.evaluation.error_domain == ErrorDomain::Db ? "db" : "linear") << "\n";
    out << "evaluation.start_region = " << to_string(c.evaluation.start_region) << "\n";
}

}  // namespace

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    emit_scenario_channel(out, *this);
    emit_training(out, *this);
    emit_evaluation(out, *this);
    return out.str();
}

std::uint64_t ExperimentConfig::dataset_hash() const {
    std::ostringstream out;
    emit_scenario_channel(out, *this);
    return fnv1a_hash(out.str());
}

std::uint64_t ExperimentConfig::model_hash() const {
    std::ostringstream out;
    emit_scenario_channel(out, *this);
    emit_training(out, *this);
    return fnv1a_hash(out.str());
}

ExperimentConfig ExperimentConfig::table1_preset() {
    // defaults mirror Table I; spelled out once here
    return ExperimentConfig{};
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg = table1_preset();
    bool kappa_set = false, radius_set = false;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) + ": empty key");

        if (key == "scenario.uavs") cfg.scenario.uav_count = static_cast<int>(parse_long(value, key));
        else if (key == "scenario.area_width_m") cfg.scenario.area_width = parse_double(value, key);
        else if (key == "scenario.area_height_m") cfg.scenario.area_height = parse_double(value, key);
        else if (key == "scenario.velocity_min") cfg.scenario.velocity_min = parse_double(value, key);
        else if (key == "scenario.velocity_max") cfg.scenario.velocity_max = parse_double(value, key);
        else if (key == "scenario.turn_rate_min") cfg.scenario.turn_rate_min = parse_double(value, key);
        else if (key == "scenario.turn_rate_max") cfg.scenario.turn_rate_max = parse_double(value, key);
        else if (key == "scenario.wind_velocity") cfg.scenario.wind.velocity = parse_double(value, key);
        else if (key == "scenario.wind_angle") cfg.scenario.wind.angle = parse_double(value, key);
        else if (key == "scenario.seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
        else if (key == "scenario.steps") cfg.steps = static_cast<int>(parse_long(value, key));
        else if (key == "channel.tx_power_w") cfg.channel_base.tx_power = parse_double(value, key);
        else if (key == "channel.noise_dbm_hz") cfg.channel_base.noise_density_dbm = parse_double(value, key);
        else if (key == "channel.bandwidth_hz") cfg.channel_base.bandwidth = parse_double(value, key);
        else if (key == "channel.path_loss_exponent") cfg.channel_base.path_loss_exponent = parse_double(value, key);
        else if (key == "channel.kappa_db") { cfg.kappa_db = parse_double(value, key); kappa_set = true; }
        else if (key == "channel.radius_m") { cfg.radius_m = parse_double(value, key); radius_set = true; }
        else if (key == "channel.self_interference") cfg.channel_base.self_interference = parse_bool(value, key);
        else if (key == "training.mode") cfg.mode = parse_train_mode(value);
        else if (key == "training.latent_dim") cfg.training.latent_dim = static_cast<int>(parse_long(value, key));
        else if (key == "training.embedding_dim") cfg.training.embedding_dim = static_cast<int>(parse_long(value, key));
        else if (key == "training.hidden_width") cfg.training.hidden_width = static_cast<int>(parse_long(value, key));
        else if (key == "training.horizon") cfg.training.horizon = static_cast<int>(parse_long(value, key));
        else if (key == "training.learning_rate") cfg.training.learning_rate = parse_double(value, key);
        else if (key == "training.epochs") cfg.training.epochs = static_cast<int>(parse_long(value, key));
        else if (key == "training.batch_size") cfg.training.batch_size = static_cast<int>(parse_long(value, key));
        else if (key == "training.split_fraction") cfg.training.split_fraction = parse_double(value, key);
        else if (key == "training.grad_clip") cfg.training.grad_clip = parse_double(value, key);
        else if (key == "training.lr_decay") cfg.training.lr_decay = parse_double(value, key);
        else if (key == "training.affinity_scale") cfg.training.affinity_scale = parse_double(value, key);
        else if (key == "training.binary_adjacency") cfg.training.binary_adjacency = parse_bool(value, key);
        else if (key == "training.seed") cfg.training_seed = static_cast<std::uint64_t>(parse_long(value, key));
        else if (key == "evaluation.prediction_steps") {
            cfg.evaluation.prediction_steps.clear();
            for (const auto& item : split_list(value))
                cfg.evaluation.prediction_steps.push_back(static_cast<int>(parse_long(item, key)));
        } else if (key == "evaluation.kappa_sweep_db") {
            cfg.evaluation.kappa_sweep_db.clear();
            for (const auto& item : split_list(value))
                cfg.evaluation.kappa_sweep_db.push_back(parse_double(item, key));
        } else if (key == "evaluation.radius_sweep_m") {
            cfg.evaluation.radius_sweep_m.clear();
            for (const auto& item : split_list(value))
                cfg.evaluation.radius_sweep_m.push_back(parse_double(item, key));
        } else if (key == "evaluation.seeds") {
            cfg.evaluation.seeds.clear();
            for (const auto& item : split_list(value))
                cfg.evaluation.seeds.push_back(static_cast<std::uint64_t>(parse_long(item, key)));
        } else if (key == "evaluation.error_domain") {
            cfg.evaluation.error_domain = parse_error_domain(value);
        } else if (key == "evaluation.start_region") {
            cfg.evaluation.start_region = parse_start_region(value);
        } else {
            throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
        }
    }

    if (kappa_set && radius_set)
        throw ValidationError("channel: kappa_db and radius_m are mutually exclusive");
    if (kappa_set) cfg.radius_m.reset();
    if (radius_set) cfg.kappa_db.reset();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return parse(read_text_file(path));
}

}  // namespace fanetkoop
