#include "aomd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

#include "aomd/error.hpp"
#include "aomd/feature_io.hpp"
#include "aomd/rng.hpp"

namespace aomd {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  throw LoadError("unknown split '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(i);
  }
  return out;
}

std::filesystem::path Dataset::embedding_file() const {
  std::filesystem::path p(header.embedding_path);
  return p.is_absolute() ? p : root / p;
}

std::filesystem::path Dataset::feature_file(std::size_t i) const {
  std::filesystem::path dir(header.feature_dir);
  if (!dir.is_absolute()) dir = root / dir;
  return dir / feature_file_name(posts[i], i);
}

std::string feature_file_name(const MemePost& post, std::size_t index) {
  const bool safe = !post.id.empty() && post.id.size() < 200 &&
                    std::all_of(post.id.begin(), post.id.end(), [](char c) {
                      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                             c == '-' || c == '.';
                    }) &&
                    post.id.front() != '.';
  return (safe ? post.id : "post_" + std::to_string(index)) + ".aomf";
}

namespace {

json box_to_json(const BoundingBox& box) {
  return json(std::vector<double>(box.vertices().begin(), box.vertices().end()));
}

BoundingBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != BoundingBox::kScalars) {
    throw LoadError("box must be an array of 8 numbers");
  }
  std::array<double, BoundingBox::kScalars> v{};
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return BoundingBox(v);
}

json header_to_json(const DatasetHeader& h) {
  return json{{"format", "aomd-manifest"},
              {"version", kManifestVersion},
              {"feature_dim", h.feature_dim},
              {"global_dim", h.global_dim},
              {"feature_dir", h.feature_dir},
              {"embedding_path", h.embedding_path},
              {"split_seed", h.split_seed},
              {"split_fractions", h.split_fractions}};
}

DatasetHeader header_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "aomd-manifest") {
    throw LoadError("manifest header is missing format \"aomd-manifest\"");
  }
  if (j.value("version", -1) != kManifestVersion) {
    throw LoadError("manifest schema version " + j.value("version", json(-1)).dump() +
                    " does not match " + std::to_string(kManifestVersion));
  }
  DatasetHeader h;
  h.feature_dim = j.at("feature_dim").get<std::size_t>();
  h.global_dim = j.at("global_dim").get<std::size_t>();
  h.feature_dir = j.value("feature_dir", h.feature_dir);
  h.embedding_path = j.value("embedding_path", h.embedding_path);
  h.split_seed = j.value("split_seed", std::uint64_t{0});
  if (j.contains("split_fractions")) {
    h.split_fractions = j.at("split_fractions").get<std::array<double, 3>>();
  }
  double total = 0.0;
  for (double f : h.split_fractions) {
    if (!(f >= 0.0)) throw LoadError("split fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw LoadError("split fractions must sum to 1");
  return h;
}

json post_to_json(const MemePost& post, const std::string& feature_file,
                  std::optional<Split> split) {
  json tokens = json::array();
  for (const auto& t : post.word_tokens) {
    tokens.push_back(json{{"word", t.word}, {"box", box_to_json(t.box)}});
  }
  json j{{"id", post.id},
         {"image_w", post.image_size.width},
         {"image_h", post.image_size.height},
         {"tokens", tokens},
         {"description", post.description},
         {"comments", post.comments},
         {"label", post.label ? json(*post.label) : json(nullptr)},
         {"feature_file", feature_file}};
  if (split) j["split"] = std::string(to_string(*split));
  return j;
}

}  // namespace

std::vector<Split> assign_splits(const std::vector<MemePost>& posts, std::uint64_t seed,
                                 const std::array<double, 3>& fractions) {
  std::map<int, std::vector<std::size_t>> strata;  // -1 = unlabeled
  for (std::size_t i = 0; i < posts.size(); ++i) {
    strata[posts[i].label.value_or(-1)].push_back(i);
  }
  std::vector<Split> out(posts.size(), Split::Train);
  for (auto& [label, members] : strata) {
    std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
    ranked.reserve(members.size());
    for (std::size_t i : members) ranked.emplace_back(hash_string(posts[i].id, seed), i);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return posts[a.second].id < posts[b.second].id;
    });
    const double n = static_cast<double>(ranked.size());
    const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * n));
    const auto n_val = std::min(ranked.size() - std::min(ranked.size(), n_train),
                                static_cast<std::size_t>(std::llround(fractions[1] * n)));
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      out[ranked[r].second] =
          r < n_train ? Split::Train : (r < n_train + n_val ? Split::Val : Split::Test);
    }
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& manifest, const LoadOptions& options) {
  std::ifstream in(manifest);
  if (!in) throw LoadError("cannot open manifest " + manifest.string());
  Dataset ds;
  ds.root = manifest.parent_path();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::optional<Split>> explicit_splits;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LoadError(manifest.string() + ":" + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    if (!have_header) {
      ds.header = header_from_json(j);
      have_header = true;
      continue;
    }
    const std::string id = j.is_object() ? j.value("id", std::string{}) : std::string{};
    const std::string where =
        "record '" + (id.empty() ? "line " + std::to_string(line_no) : id) + "'";
    try {
      if (!j.is_object()) throw LoadError("record is not a JSON object");
      MemePost post;
      post.id = j.at("id").get<std::string>();
      post.image_size = {j.at("image_w").get<double>(), j.at("image_h").get<double>()};
      for (const auto& t : j.at("tokens")) {
        post.word_tokens.emplace_back(t.at("word").get<std::string>(), box_from_json(t.at("box")));
      }
      post.description = j.value("description", std::string{});
      post.comments = j.value("comments", std::vector<std::string>{});
      if (j.contains("label") && !j.at("label").is_null()) post.label = j.at("label").get<int>();

      const std::filesystem::path feature_path =
          [&] {
            std::filesystem::path dir(ds.header.feature_dir);
            if (!dir.is_absolute()) dir = ds.root / dir;
            return dir / j.at("feature_file").get<std::string>();
          }();
      FeatureFile file = read_feature_file(feature_path);
      if (file.global_feature.size() != ds.header.global_dim) {
        throw LoadError("dimension mismatch: feature file declares d_g=" +
                        std::to_string(file.global_feature.size()) + " but manifest configures " +
                        std::to_string(ds.header.global_dim));
      }
      if (file.object_dim != ds.header.feature_dim) {
        throw LoadError("dimension mismatch: feature file declares d=" +
                        std::to_string(file.object_dim) + " but manifest configures " +
                        std::to_string(ds.header.feature_dim));
      }
      if (file.objects.size() > options.max_objects) file.objects.resize(options.max_objects);
      post.global_feature = std::move(file.global_feature);
      post.visual_objects = std::move(file.objects);
      validate_post(post, ds.header.feature_dim, ds.header.global_dim, options.max_objects);

      explicit_splits.push_back(j.contains("split")
                                    ? std::optional<Split>(parse_split(j.at("split").get<std::string>()))
                                    : std::nullopt);
      ds.posts.push_back(std::move(post));
    } catch (const json::exception& e) {
      throw LoadError(manifest.string() + ": " + where + ": " + e.what());
    } catch (const Error& e) {
      throw LoadError(manifest.string() + ": " + where + ": " + e.what());
    }
  }

  ds.splits = assign_splits(ds.posts, ds.header.split_seed, ds.header.split_fractions);
  for (std::size_t i = 0; i < ds.posts.size(); ++i) {
    if (explicit_splits[i]) ds.splits[i] = *explicit_splits[i];
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                  const std::string& manifest_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  Dataset placed = dataset;
  placed.root = dir;
  std::filesystem::path feature_dir(dataset.header.feature_dir);
  if (!feature_dir.is_absolute()) feature_dir = dir / feature_dir;
  std::filesystem::create_directories(feature_dir, ec);
  if (ec) throw LoadError("cannot create " + feature_dir.string() + ": " + ec.message());

  std::ofstream out(dir / manifest_name, std::ios::binary);
  if (!out) throw LoadError("cannot write manifest in " + dir.string());
  out << header_to_json(dataset.header).dump() << '\n';
  for (std::size_t i = 0; i < dataset.posts.size(); ++i) {
    const MemePost& post = dataset.posts[i];
    const std::string name = feature_file_name(post, i);
    FeatureFile file{post.global_feature, post.visual_objects, dataset.header.feature_dim};
    write_feature_file(feature_dir / name, file);
    std::optional<Split> split;
    if (i < dataset.splits.size()) split = dataset.splits[i];
    out << post_to_json(post, name, split).dump() << '\n';
  }
  if (!out) throw LoadError("failed writing manifest in " + dir.string());
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
  if (path.is_absolute() || std::filesystem::exists(path)) return path;
  if (const char* root = std::getenv("AOMD_DATA_DIR"); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / path;
  }
  return path;
}

}  // namespace aomd
