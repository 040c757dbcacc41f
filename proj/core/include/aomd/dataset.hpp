#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aomd/types.hpp"

namespace aomd {

enum class Split { Train, Val, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

inline constexpr int kManifestVersion = 1;
inline constexpr std::size_t kDefaultMaxObjects = 36;

// First line of a manifest. Relative paths are resolved against the
// directory holding the manifest.
struct DatasetHeader {
  std::size_t feature_dim = 0;  // d: width of every object feature
  std::size_t global_dim = 0;   // d_g: width of the global image feature
  std::string feature_dir = "features";
  std::string embedding_path = "embeddings.txt";
  std::uint64_t split_seed = 0;
  std::array<double, 3> split_fractions{0.7, 0.1, 0.2};

  bool operator==(const DatasetHeader&) const = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<MemePost> posts;
  std::vector<Split> splits;  // parallel to posts
  std::filesystem::path root;  // directory of the manifest

  std::vector<std::size_t> indices(Split split) const;
  std::filesystem::path embedding_file() const;
  std::filesystem::path feature_file(std::size_t i) const;
};

struct LoadOptions {
  // Objects beyond the cap are dropped; files list objects in descending
  // detector confidence, so the first max_objects are kept.
  std::size_t max_objects = kDefaultMaxObjects;
};

// Reads a JSON-lines manifest (header line, then one post per line) and the
// feature file of every post. A zero-length manifest is an empty dataset.
// Throws LoadError naming the offending record.
Dataset load_dataset(const std::filesystem::path& manifest, const LoadOptions& options = {});

// Writes `dir/manifest.jsonl` plus one feature file per post under
// `dir/<feature_dir>`. Output bytes depend only on the dataset contents.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                  const std::string& manifest_name = "manifest.jsonl");

// File name used for a post's feature file.
std::string feature_file_name(const MemePost& post, std::size_t index);

// Label-stratified split: within each label stratum records are ranked by a
// hash of (id, seed) and cut at the configured fractions. Reloading the same
// records with the same seed yields the same assignment.
std::vector<Split> assign_splits(const std::vector<MemePost>& posts, std::uint64_t seed,
                                 const std::array<double, 3>& fractions);

// Resolves a data path: absolute or existing paths are returned unchanged,
// otherwise the path is looked up under $AOMD_DATA_DIR when that is set.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

}  // namespace aomd
