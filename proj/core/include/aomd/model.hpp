#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aomd/attention.hpp"
#include "aomd/clustering.hpp"
#include "aomd/embedding.hpp"
#include "aomd/nn/params.hpp"
#include "aomd/nn/tape.hpp"
#include "aomd/types.hpp"

namespace aomd {

enum class Ablation { Full, NoVisual, NoOcr, NoContext, NoAttention };

inline constexpr std::array<Ablation, 5> kAllAblations{
    Ablation::Full, Ablation::NoVisual, Ablation::NoOcr, Ablation::NoContext,
    Ablation::NoAttention};

std::string_view to_string(Ablation ablation);
// Throws ConfigError on an unknown name.
Ablation parse_ablation(std::string_view name);

struct ModelConfig {
  std::size_t dim = 100;          // d: width of every fused branch
  std::size_t hidden = 100;       // h: encoder state width, must equal d
  std::size_t embedding_dim = 0;  // d_e
  std::size_t global_dim = 0;     // d_g
  std::size_t object_dim = 0;     // width of the stored object features
  std::size_t mlp_hidden = 128;
  std::size_t max_context_tokens = 256;
  std::string separator = "<sep>";
  Ablation ablation = Ablation::Full;
  ClusterConfig cluster;

  std::size_t augmented_dim() const { return dim + attention::kBoxWidth; }
  bool uses_visual() const { return ablation != Ablation::NoVisual; }
  bool uses_ocr() const { return ablation != Ablation::NoOcr; }
  bool uses_context() const { return ablation != Ablation::NoContext; }
  bool uses_attention() const {
    return ablation != Ablation::NoAttention && ablation != Ablation::NoOcr;
  }
  bool projects_objects() const { return object_dim != dim; }
  std::size_t fused_dim() const;
  // Throws ConfigError on a zero width or h != d.
  void validate() const;
};

// Everything the network reads from a post, resolved once: clusters,
// embedded word sequences and normalized boxes. Training reuses these across
// epochs.
struct PreparedPost {
  std::string id;
  nn::Tensor global;                      // [d_g]
  nn::Tensor objects;                     // [object_dim, K]
  nn::Tensor object_boxes;                // [8, K]
  std::vector<TokenCluster> clusters;
  std::vector<nn::Tensor> cluster_words;  // S x [T_s, d_e]
  nn::Tensor cluster_boxes;               // [8, S]
  nn::Tensor description;                 // [T, d_e]
  nn::Tensor comments;                    // [T, d_e]
  std::optional<int> label;

  std::size_t object_count() const { return object_boxes.rank() == 2 ? object_boxes.cols() : 0; }
  std::size_t cluster_count() const { return cluster_words.size(); }
};

struct ForwardTrace {
  std::vector<double> global;       // F_g
  std::vector<double> description;  // F_d
  std::vector<double> comments;     // F_u
  std::vector<double> visual;       // F_v
  std::vector<double> text;         // F_c
  std::vector<double> fused;
  std::array<double, 2> logits{};
  double y_hat = 0.0;
  attention::AttentionOutput attention;
};

// Variables of one forward pass on a tape.
struct ForwardVars {
  nn::Var y_hat;
  nn::Var logits;
  nn::Var fused;
  nn::Var global, description, comments, visual, text;
  attention::CoAttention attention;
};

// Words of the comment thread joined oldest-first with the separator; empty
// comments contribute nothing. Capped at max_tokens.
std::vector<std::string> context_words(const std::vector<std::string>& comments,
                                       const std::string& separator, std::size_t max_tokens);

class AomdModel {
 public:
  // Throws ConfigError if the config is invalid.
  explicit AomdModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  // Registers and initializes every parameter the configured variant reads.
  void init_parameters(nn::ParameterStore& store, std::uint64_t seed) const;
  nn::ParameterStore make_parameters(std::uint64_t seed) const;

  // Throws ShapeError when the post does not match the configured widths.
  PreparedPost prepare(const MemePost& post, const EmbeddingTable& table) const;

  // Records the network on `tape`. detach_attention stops gradients at the
  // pooling weights (diagnostic only).
  ForwardVars build(nn::Tape& tape, const PreparedPost& post, bool detach_attention = false) const;

  ForwardTrace forward(const PreparedPost& post, const nn::ParameterStore& store) const;
  ForwardTrace forward(const MemePost& post, const EmbeddingTable& table,
                       const nn::ParameterStore& store) const;
  double predict(const PreparedPost& post, const nn::ParameterStore& store) const;

  // 1 iff y_hat >= threshold.
  int classify(const PreparedPost& post, const nn::ParameterStore& store,
               double threshold = 0.5) const;

 private:
  ModelConfig config_;
};

// The same network with a different ablation setting.
ForwardTrace forward_ablated(const ModelConfig& config, Ablation ablation, const PreparedPost& post,
                             const nn::ParameterStore& store);

}  // namespace aomd
