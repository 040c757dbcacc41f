#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "aomd/types.hpp"

namespace aomd {

// Binary feature file, little-endian:
//   "AOMF" | u32 version | u32 d_g | u32 K | u32 d
//   | d_g x f32 global feature
//   | K x (d x f32 object feature, 8 x f32 box vertices)
// Values are stored as 32-bit floats, so only float-representable doubles
// survive a round trip unchanged.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

struct FeatureFile {
  std::vector<double> global_feature;
  std::vector<VisualObject> objects;
  std::size_t object_dim = 0;

  bool operator==(const FeatureFile&) const = default;
};

void write_feature_file(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile read_feature_file(const std::filesystem::path& path);

}  // namespace aomd
