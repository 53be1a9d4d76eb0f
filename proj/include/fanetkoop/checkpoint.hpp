#pragma once

#include <cstdint>
#include <string>

#include "fanetkoop/gkae.hpp"
#include "fanetkoop/koopman.hpp"

namespace fanetkoop {

/// Versioned structured-text checkpoints. Tensors are written with explicit
/// shape headers and shortest round-trip decimal floats, so
/// save -> load -> save reproduces identical bytes.
inline constexpr int kCheckpointVersion = 1;

std::string serialize_kae(const KaeModel& model, std::uint64_t dataset_hash,
                          std::uint64_t model_hash);
std::string serialize_gkae(const GkaeModel& model, std::uint64_t dataset_hash,
                           std::uint64_t model_hash);

struct CheckpointInfo {
    std::string kind;  // "kae" | "gkae"
    std::uint64_t dataset_hash = 0;
    std::uint64_t model_hash = 0;
};

CheckpointInfo peek_checkpoint(const std::string& path);

KaeModel load_kae(const std::string& path, CheckpointInfo* info = nullptr);
GkaeModel load_gkae(const std::string& path, CheckpointInfo* info = nullptr);

void save_kae(const KaeModel& model, const std::string& path, std::uint64_t dataset_hash,
              std::uint64_t model_hash);
void save_gkae(const GkaeModel& model, const std::string& path, std::uint64_t dataset_hash,
               std::uint64_t model_hash);

}  // namespace fanetkoop
