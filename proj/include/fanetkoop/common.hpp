#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fanetkoop {

// Error taxonomy. ValidationError maps to CLI exit code 1,
// DataError (and everything else) to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, arguments, or violated preconditions.
struct ValidationError : Error {
    using Error::Error;
};

/// Broken data at runtime: I/O failures, hash mismatches, corrupt files.
struct DataError : Error {
    using Error::Error;
};

/// Coincident UAV positions make the path-loss model degenerate.
struct GeometryError : DataError {
    using DataError::DataError;
};

/// Orbit placement could not satisfy the area/overlap constraints.
struct PlacementError : ValidationError {
    using ValidationError::ValidationError;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Linear power ratio -> dB, with a floor to keep log10 finite.
inline double to_db(double linear, double floor = 1e-12) {
    return 10.0 * std::log10(std::max(linear, floor));
}

/// dB -> linear power ratio.
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Normalize an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

/// Deterministic seeded RNG. Uniform doubles are drawn from the top 53 bits
/// of mt19937_64 output, so streams are reproducible independent of the
/// standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Derive an independent child stream (e.g. one per UAV model).
    static Rng fork(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed) ^ mix(0x6a09e667f3bcc909ULL + stream));
    }

  private:
    // splitmix64 finalizer; decorrelates small consecutive seeds.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace fanetkoop
