#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aomd/dataset.hpp"
#include "aomd/embedding.hpp"

namespace aomd {

// Parameters of the planted-analogy generator.
//
// An analogy post shows a pair of objects tied to two distinct analog words a
// and b: one carries the offensive-or-benign prototype of a (matching the
// label), the other the opposite prototype of b. Only word a appears in the
// caption, placed on top of its object. Averaging the pair gives the same
// vector for either label, so from the image and caption the label is
// recoverable only by aligning the word with the object it annotates. Other
// posts carry a class keyword in their description. A quarter of all posts
// also get a comment that repeats a keyword of their class.
struct SyntheticSpec {
  std::size_t n_posts = 400;
  std::uint64_t seed = 7;
  std::size_t d = 100;             // object feature width
  std::size_t d_g = 64;            // global feature width
  std::size_t vocab_size = 200;
  std::size_t embedding_dim = 32;
  double analogy_rate = 0.8;
  // Probability that a post's label is flipped after generation.
  double noise_rate = 0.05;
  // Probability that the detector reports neither object of an analogy
  // pair; the planted object then shows only in the global feature.
  double miss_rate = 0.2;
  double positive_rate = 0.35;
  // Throws ConfigError on an invalid field.
  void validate() const;
};

inline constexpr std::size_t kSyntheticAnalogWords = 4;
inline constexpr std::size_t kSyntheticKeywords = 4;  // per class
inline constexpr double kSyntheticImageWidth = 640.0;
inline constexpr double kSyntheticImageHeight = 480.0;

// Generation record of one post, kept for tests and inspection.
struct PlantedInfo {
  bool analogy = false;
  bool missed = false;
  int planted_class = -1;  // prototype class of the planted object, -1 if none
  std::string analog_word;
  int clean_label = 0;     // label before noise
};

struct SyntheticData {
  Dataset dataset;
  EmbeddingTable embeddings;
  std::vector<PlantedInfo> planted;  // parallel to dataset.posts
  std::vector<std::string> analog_words;
  std::vector<std::string> offensive_keywords;
  std::vector<std::string> benign_keywords;
  // prototypes[c][a]: class-c prototype of analog word a, as stored (f32-exact).
  std::vector<std::vector<double>> prototypes[2];
};

// Deterministic: equal SyntheticSpec values give identical data.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes manifest.jsonl, features/ and embeddings.txt under `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

// generate_synthetic + write_synthetic.
SyntheticData gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace aomd
