#include "aomd/model.hpp"

#include <algorithm>

#include "aomd/error.hpp"
#include "aomd/nn/lstm.hpp"
#include "aomd/nn/ops.hpp"
#include "aomd/rng.hpp"

namespace aomd {

using nn::Tensor;
using nn::Var;

namespace {

constexpr const char* kAblationNames[] = {"full", "no_visual", "no_ocr", "no_context",
                                          "no_attention"};

// Independent stream per component, so variants share the initial values of
// the components they have in common.
Rng component_rng(std::uint64_t seed, const std::string& component) {
  return Rng(hash_string(component, mix64(seed)));
}

Tensor glorot(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t(std::move(shape));
  nn::init_glorot_uniform(t, rng);
  return t;
}

void add_linear(nn::ParameterStore& store, const std::string& prefix, std::size_t out,
                std::size_t in, std::uint64_t seed) {
  Rng rng = component_rng(seed, prefix);
  store.add(prefix + ".W", glorot({out, in}, rng));
  store.add(prefix + ".b", Tensor({out}));
}

Var linear_layer(nn::Tape& tape, const std::string& prefix, Var x) {
  return nn::linear(tape.parameter(prefix + ".W"), x, tape.parameter(prefix + ".b"));
}

std::vector<double> values_of(Var v) { return v.valid() ? v.value().values() : std::vector<double>{}; }

void check_width(const char* what, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ShapeError(std::string(what) + " has width " + std::to_string(got) + ", model expects " +
                     std::to_string(want));
  }
}

}  // namespace

std::string_view to_string(Ablation ablation) {
  return kAblationNames[static_cast<std::size_t>(ablation)];
}

Ablation parse_ablation(std::string_view name) {
  for (Ablation a : kAllAblations) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown ablation '" + std::string(name) +
                    "' (expected full, no_visual, no_ocr, no_context or no_attention)");
}

std::size_t ModelConfig::fused_dim() const {
  std::size_t branches = 1;  // F_v
  if (uses_ocr()) branches += 1;
  if (uses_visual()) branches += 1;
  if (uses_context()) branches += 2;
  return branches * dim;
}

void ModelConfig::validate() const {
  const std::pair<const char*, std::size_t> widths[] = {
      {"model.dim", dim},
      {"model.hidden", hidden},
      {"model.embedding_dim", embedding_dim},
      {"model.global_dim", global_dim},
      {"model.object_dim", object_dim},
      {"model.mlp_hidden", mlp_hidden},
  };
  for (const auto& [name, value] : widths) {
    if (value == 0) throw ConfigError(std::string(name) + " must be positive");
  }
  // Encoded clusters are pooled alongside projected objects in one space.
  if (hidden != dim) {
    throw ConfigError("model.hidden (" + std::to_string(hidden) + ") must equal model.dim (" +
                      std::to_string(dim) + ")");
  }
  if (separator.empty()) throw ConfigError("model.separator must be non-empty");
  cluster.validate();
}

std::vector<std::string> context_words(const std::vector<std::string>& comments,
                                       const std::string& separator, std::size_t max_tokens) {
  std::vector<std::string> out;
  for (const std::string& comment : comments) {
    auto words = split_words(comment);
    if (words.empty()) continue;
    if (!out.empty()) out.push_back(separator);
    out.insert(out.end(), std::make_move_iterator(words.begin()),
               std::make_move_iterator(words.end()));
    if (out.size() >= max_tokens) break;
  }
  if (out.size() > max_tokens) out.resize(max_tokens);
  return out;
}

AomdModel::AomdModel(ModelConfig config) : config_(std::move(config)) { config_.validate(); }

void AomdModel::init_parameters(nn::ParameterStore& store, std::uint64_t seed) const {
  const ModelConfig& c = config_;
  store.set_seed(seed);
  if (c.uses_visual()) add_linear(store, "global", c.dim, c.global_dim, seed);
  if (c.projects_objects()) add_linear(store, "object", c.dim, c.object_dim, seed);
  {
    Rng rng = component_rng(seed, "encoder");
    nn::add_seq_encoder(store, "encoder", c.embedding_dim, c.hidden, rng);
  }
  if (c.uses_attention()) {
    Rng rng = component_rng(seed, "attention");
    attention::add_params(store, "attention", c.augmented_dim(), rng);
  }
  add_linear(store, "mlp.1", c.mlp_hidden, c.fused_dim(), seed);
  add_linear(store, "mlp.2", 2, c.mlp_hidden, seed);
}

nn::ParameterStore AomdModel::make_parameters(std::uint64_t seed) const {
  nn::ParameterStore store;
  init_parameters(store, seed);
  return store;
}

PreparedPost AomdModel::prepare(const MemePost& post, const EmbeddingTable& table) const {
  const ModelConfig& c = config_;
  check_width("embedding table", table.dim(), c.embedding_dim);
  check_width("global feature", post.global_feature.size(), c.global_dim);
  PreparedPost p;
  p.id = post.id;
  p.label = post.label;
  p.global = Tensor::vector(post.global_feature);

  const std::size_t k = post.visual_objects.size();
  p.objects = Tensor({c.object_dim, k});
  std::vector<BoundingBox> boxes;
  boxes.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const VisualObject& obj = post.visual_objects[j];
    check_width("visual object feature", obj.feature.size(), c.object_dim);
    for (std::size_t r = 0; r < c.object_dim; ++r) p.objects.at(r, j) = obj.feature[r];
    boxes.push_back(obj.box);
  }
  p.object_boxes = attention::box_matrix(boxes, post.image_size);

  p.clusters = cluster_tokens(post.word_tokens, c.cluster);
  boxes.clear();
  for (const TokenCluster& cluster : p.clusters) {
    std::vector<std::string> words = cluster.words;
    if (words.size() > c.max_context_tokens) words.resize(c.max_context_tokens);
    p.cluster_words.push_back(nn::embed_words(words, table));
    boxes.push_back(cluster.box);
  }
  p.cluster_boxes = attention::box_matrix(boxes, post.image_size);

  auto description = split_words(post.description);
  if (description.size() > c.max_context_tokens) description.resize(c.max_context_tokens);
  p.description = nn::embed_words(description, table);
  p.comments =
      nn::embed_words(context_words(post.comments, c.separator, c.max_context_tokens), table);
  return p;
}

ForwardVars AomdModel::build(nn::Tape& tape, const PreparedPost& post, bool detach_attention) const {
  const ModelConfig& c = config_;
  const std::size_t k = post.object_count();
  const std::size_t s = post.cluster_count();
  if (k > 0) check_width("object features", post.objects.rows(), c.object_dim);
  ForwardVars out;

  Var objects;
  if (k > 0) {
    objects = tape.constant(post.objects);
    if (c.projects_objects()) {
      objects = nn::add_columns(nn::matmul(tape.parameter("object.W"), objects),
                                tape.parameter("object.b"));
    }
  }
  const nn::SeqEncoderParams encoder = nn::seq_encoder(tape, "encoder", c.embedding_dim, c.hidden);

  Var clusters;
  if (c.uses_ocr() && s > 0) {
    std::vector<Var> columns;
    columns.reserve(s);
    for (const Tensor& words : post.cluster_words) {
      columns.push_back(nn::lstm_encode(encoder, tape.constant(words)));
    }
    clusters = nn::stack_columns(columns);
  }

  const Tensor zero({c.dim});
  if (c.uses_attention()) {
    const attention::Params params = attention::params(tape, "attention");
    const attention::Side visual = attention::make_side(tape, objects, post.object_boxes);
    const attention::Side text = attention::make_side(tape, clusters, post.cluster_boxes);
    out.attention = attention::co_attend(tape, params, visual, text, c.dim, detach_attention);
    out.visual = out.attention.pooled_visual;
    out.text = out.attention.pooled_text;
  } else {
    out.visual = k > 0 ? nn::mean_columns(objects) : tape.constant(zero);
    if (c.uses_ocr()) out.text = s > 0 ? nn::mean_columns(clusters) : tape.constant(zero);
  }

  std::vector<Var> parts{out.visual};
  if (c.uses_ocr()) parts.push_back(out.text);
  if (c.uses_visual()) {
    check_width("global feature", post.global.size(), c.global_dim);
    out.global = linear_layer(tape, "global", tape.constant(post.global));
    parts.push_back(out.global);
  }
  if (c.uses_context()) {
    out.description = nn::lstm_encode(encoder, tape.constant(post.description));
    out.comments = nn::lstm_encode(encoder, tape.constant(post.comments));
    parts.push_back(out.description);
    parts.push_back(out.comments);
  }
  out.fused = nn::concat(parts);
  Var hidden = nn::tanh(linear_layer(tape, "mlp.1", out.fused));
  out.logits = linear_layer(tape, "mlp.2", hidden);
  out.y_hat = nn::element(nn::softmax(out.logits), 1);
  return out;
}

ForwardTrace AomdModel::forward(const PreparedPost& post, const nn::ParameterStore& store) const {
  nn::Tape tape(store);
  const ForwardVars v = build(tape, post);
  ForwardTrace t;
  t.global = values_of(v.global);
  t.description = values_of(v.description);
  t.comments = values_of(v.comments);
  t.visual = values_of(v.visual);
  t.text = values_of(v.text);
  t.fused = values_of(v.fused);
  t.logits = {v.logits.value()[0], v.logits.value()[1]};
  t.y_hat = v.y_hat.value()[0];
  if (v.attention.pooled_visual.valid()) t.attention = attention::snapshot(v.attention);
  return t;
}

ForwardTrace AomdModel::forward(const MemePost& post, const EmbeddingTable& table,
                                const nn::ParameterStore& store) const {
  return forward(prepare(post, table), store);
}

double AomdModel::predict(const PreparedPost& post, const nn::ParameterStore& store) const {
  nn::Tape tape(store);
  return build(tape, post).y_hat.value()[0];
}

int AomdModel::classify(const PreparedPost& post, const nn::ParameterStore& store,
                        double threshold) const {
  return predict(post, store) >= threshold ? 1 : 0;
}

ForwardTrace forward_ablated(const ModelConfig& config, Ablation ablation, const PreparedPost& post,
                             const nn::ParameterStore& store) {
  ModelConfig c = config;
  c.ablation = ablation;
  return AomdModel(std::move(c)).forward(post, store);
}

}  // namespace aomd
