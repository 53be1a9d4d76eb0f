#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fanetkoop/channel.hpp"
#include "fanetkoop/dynamics.hpp"
#include "fanetkoop/koopman.hpp"
#include "fanetkoop/metrics.hpp"

namespace fanetkoop {

enum class TrainMode { Distributed, Centralized };

TrainMode parse_train_mode(const std::string& s);
std::string to_string(TrainMode mode);

/// Where evaluation start indices come from: the held-out tail of the
/// series (default), the training region, or every valid start.
enum class StartRegion { HeldOut, Train, Full };

StartRegion parse_start_region(const std::string& s);
std::string to_string(StartRegion region);

/// One sweep point carries exactly one of a direct SINR threshold (dB) or
/// a nominal communication radius (meters, mapped via kappa_from_radius).
struct SweepPoint {
    std::optional<double> kappa_db;
    std::optional<double> radius_m;

    double kappa_linear(const ChannelParams& params) const;
    std::string label() const;
};

struct EvaluationConfig {
    std::vector<int> prediction_steps{50};    // P list
    std::vector<double> kappa_sweep_db;       // optional extra sweep points
    std::vector<double> radius_sweep_m;
    std::vector<std::uint64_t> seeds{1};      // multi-seed experiment list
    ErrorDomain error_domain = ErrorDomain::Db;
    StartRegion start_region = StartRegion::HeldOut;

    /// Sweep points: the base channel threshold plus any configured sweeps.
    std::vector<SweepPoint> sweep_points(const struct ExperimentConfig& cfg) const;
};

/// Full experiment description; the on-disk format is flat
/// `section.key = value` lines.
struct ExperimentConfig {
    // scenario
    ScenarioSpec scenario;
    std::uint64_t seed = 1;
    int steps = 2000;

    // channel; exactly one of kappa_db / radius_m is set
    ChannelParams channel_base;  // kappa filled in by kappa_linear()
    std::optional<double> kappa_db;
    std::optional<double> radius_m = 500.0;

    // training
    TrainMode mode = TrainMode::Distributed;
    TrainConfig training;
    std::uint64_t training_seed = 0;  // 0 = derive from scenario seed

    // evaluation
    EvaluationConfig evaluation;

    void validate() const;

    /// Channel parameters with the threshold resolved.
    ChannelParams channel() const;
    double kappa_linear() const;
    std::uint64_t effective_training_seed() const;

    /// Canonical flat-text rendering (fixed key order, exact doubles).
    std::string serialize() const;
    /// Hash over the scenario+channel sections: identifies the dataset.
    std::uint64_t dataset_hash() const;
    /// Hash over scenario+channel+training: identifies a trained model.
    std::uint64_t model_hash() const;

    static ExperimentConfig table1_preset();
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a_hash(const std::string& bytes);

/// Render a double with shortest round-trip decimal digits.
std::string format_double(double v);
/// Parse a double, throwing ValidationError on trailing garbage.
double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

}  // namespace fanetkoop
