#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aomd/nn/params.hpp"

namespace aomd::nn {

// Versioned little-endian checkpoint:
//   "AOMC" | u32 version | u64 seed | u64 step | u32 len + metadata bytes
//   | u32 count | count x (u32 len + name | u32 rank | rank x u64 extent
//                         | value, adam_m, adam_v as f64)
// Gradients are not stored; a loaded store has zero gradients. Parameters are
// written in name order, so equal stores serialize to equal bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ParameterStore store;
  std::string metadata;  // free-form, the model writes its config as JSON
};

std::vector<unsigned char> serialize_checkpoint(const ParameterStore& store,
                                                const std::string& metadata);
Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store,
                     const std::string& metadata);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace aomd::nn
