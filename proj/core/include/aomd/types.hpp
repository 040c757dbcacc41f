#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aomd/geometry.hpp"

namespace aomd {

// Detected image region: latent feature plus its box.
struct VisualObject {
  std::vector<double> feature;
  BoundingBox box;

  bool operator==(const VisualObject&) const = default;
};

// One OCR word with its box.
struct WordToken {
  std::string word;
  BoundingBox box;

  WordToken() = default;
  // Throws LoadError if the word is empty after trimming whitespace.
  WordToken(std::string word, BoundingBox box);

  bool operator==(const WordToken&) const = default;
};

// Spatially grouped phrase. `box` is the envelope of the member boxes and
// `members` index into the post's token list.
struct TokenCluster {
  std::vector<std::string> words;
  BoundingBox box;
  std::vector<std::size_t> members;

  std::string phrase() const;

  bool operator==(const TokenCluster&) const = default;
};

struct ImageSize {
  double width = 0.0;
  double height = 0.0;

  bool operator==(const ImageSize&) const = default;
};

// A social-media meme post: image-derived features, caption tokens, text
// description, comment thread and optional ground-truth label (1 = offensive).
struct MemePost {
  std::string id;
  std::vector<double> global_feature;
  std::vector<VisualObject> visual_objects;
  std::vector<WordToken> word_tokens;
  std::string description;
  std::vector<std::string> comments;
  ImageSize image_size;
  std::optional<int> label;

  bool operator==(const MemePost&) const = default;
};

// Checks the cross-field invariants of a post: feature widths, object cap,
// label domain and image size. Throws LoadError naming the post id.
void validate_post(const MemePost& post, std::size_t feature_dim, std::size_t global_dim,
                   std::size_t max_objects);

struct AnnotationRecord {
  std::string post_id;
  std::vector<int> ratings;
};

// Modal rating of an odd-sized record. Throws AmbiguousLabelError on ties and
// LoadError on invalid ratings.
int majority_label(const AnnotationRecord& record);

// Whitespace-separated words of a text.
std::vector<std::string> split_words(const std::string& text);

}  // namespace aomd
