#include "aomd/types.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "aomd/error.hpp"

namespace aomd {

namespace {

bool is_blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

}  // namespace

WordToken::WordToken(std::string w, BoundingBox b) : word(std::move(w)), box(b) {
  if (is_blank(word)) throw LoadError("word token is empty");
}

std::string TokenCluster::phrase() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void validate_post(const MemePost& post, std::size_t feature_dim, std::size_t global_dim,
                   std::size_t max_objects) {
  auto fail = [&](const std::string& what) {
    throw LoadError("post '" + post.id + "': " + what);
  };
  if (post.global_feature.size() != global_dim) {
    fail("global feature has " + std::to_string(post.global_feature.size()) +
         " entries, expected " + std::to_string(global_dim));
  }
  for (double v : post.global_feature) {
    if (!std::isfinite(v)) fail("global feature is not finite");
  }
  if (post.visual_objects.size() > max_objects) {
    fail(std::to_string(post.visual_objects.size()) + " visual objects exceed the cap of " +
         std::to_string(max_objects));
  }
  for (const auto& obj : post.visual_objects) {
    if (obj.feature.size() != feature_dim) {
      fail("object feature has " + std::to_string(obj.feature.size()) + " entries, expected " +
           std::to_string(feature_dim));
    }
    for (double v : obj.feature) {
      if (!std::isfinite(v)) fail("object feature is not finite");
    }
  }
  for (const auto& tok : post.word_tokens) {
    if (is_blank(tok.word)) fail("empty word token");
  }
  if (!(post.image_size.width > 0.0) || !(post.image_size.height > 0.0)) {
    fail("image size must be positive");
  }
  if (post.label && *post.label != 0 && *post.label != 1) {
    fail("label must be 0 or 1");
  }
}

int majority_label(const AnnotationRecord& record) {
  std::size_t ones = 0;
  for (int r : record.ratings) {
    if (r != 0 && r != 1) {
      throw LoadError("record '" + record.post_id + "': rating must be 0 or 1");
    }
    ones += static_cast<std::size_t>(r);
  }
  const std::size_t zeros = record.ratings.size() - ones;
  if (record.ratings.empty() || ones == zeros) {
    throw AmbiguousLabelError("record '" + record.post_id + "': majority undefined for " +
                              std::to_string(ones) + " positive and " + std::to_string(zeros) +
                              " negative ratings");
  }
  return ones > zeros ? 1 : 0;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace aomd
