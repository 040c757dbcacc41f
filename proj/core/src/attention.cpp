#include "aomd/attention.hpp"

#include "aomd/error.hpp"
#include "aomd/nn/ops.hpp"
#include "aomd/rng.hpp"

namespace aomd::attention {

using nn::Tensor;
using nn::Var;

void add_params(nn::ParameterStore& store, const std::string& prefix, std::size_t augmented_dim,
                Rng& rng) {
  for (const char* name : {".W", ".Wv", ".Wc"}) {
    Tensor t({augmented_dim, augmented_dim});
    nn::init_glorot_uniform(t, rng);
    store.add(prefix + name, std::move(t));
  }
  for (const char* name : {".wv", ".wc"}) {
    Tensor t({augmented_dim});
    nn::init_glorot_uniform(t, rng);
    store.add(prefix + name, std::move(t));
  }
}

Params params(nn::Tape& tape, const std::string& prefix) {
  return {tape.parameter(prefix + ".W"), tape.parameter(prefix + ".Wv"),
          tape.parameter(prefix + ".Wc"), tape.parameter(prefix + ".wv"),
          tape.parameter(prefix + ".wc")};
}

Tensor box_matrix(const std::vector<BoundingBox>& boxes, ImageSize image) {
  Tensor out({kBoxWidth, boxes.size()});
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const auto unit = boxes[k].normalized(image.width, image.height);
    for (std::size_t r = 0; r < kBoxWidth; ++r) out.at(r, k) = unit[r];
  }
  return out;
}

Var augment_with_position(Var features, const Tensor& boxes) {
  if (boxes.rank() != 2 || boxes.rows() != kBoxWidth) {
    throw ShapeError("augment_with_position: box matrix must be [8, n], got " + boxes.shape_string());
  }
  return nn::concat_rows(features, features.tape()->constant(boxes));
}

Side make_side(nn::Tape&, Var features, const Tensor& boxes) {
  Side side;
  side.count = boxes.rank() == 2 ? boxes.cols() : 0;
  if (side.count == 0) return side;
  if (features.value().rank() != 2 || features.value().cols() != side.count) {
    throw ShapeError("attention side: features " + features.value().shape_string() +
                     " do not match " + std::to_string(side.count) + " boxes");
  }
  side.raw = features;
  side.augmented = augment_with_position(features, boxes);
  return side;
}

Var affinity(Var text_aug, Var visual_aug, Var weights) {
  return nn::tanh(nn::matmul(nn::transpose(text_aug), nn::matmul(weights, visual_aug)));
}

CoAttention co_attend(nn::Tape& tape, const Params& p, const Side& visual, const Side& text,
                      std::size_t dim, bool detach_weights) {
  const std::size_t aug = p.affinity.value().rows();
  for (const Side* s : {&visual, &text}) {
    if (s->count > 0 && s->augmented.value().rows() != aug) {
      throw ShapeError("co_attend: augmented features " + s->augmented.value().shape_string() +
                       " do not match affinity weights " + p.affinity.value().shape_string());
    }
  }
  CoAttention out;
  Var projected_visual, projected_text;
  if (visual.count > 0) projected_visual = nn::matmul(p.map_visual, visual.augmented);
  if (text.count > 0) projected_text = nn::matmul(p.map_text, text.augmented);
  if (visual.count > 0 && text.count > 0) {
    out.affinity = affinity(text.augmented, visual.augmented, p.affinity);
  }

  if (visual.count > 0) {
    Var pre = projected_visual;
    if (text.count > 0) pre = nn::add(pre, nn::matmul(projected_text, out.affinity));
    Var map = nn::tanh(pre);
    out.alpha_visual = nn::softmax(nn::matvec(nn::transpose(map), p.score_visual));
    out.pooled_visual = nn::matvec(
        visual.raw, detach_weights ? nn::detach(out.alpha_visual) : out.alpha_visual);
  } else {
    out.pooled_visual = tape.constant(Tensor({dim}));
  }

  if (text.count > 0) {
    Var pre = projected_text;
    if (visual.count > 0) {
      pre = nn::add(pre, nn::matmul(projected_visual, nn::transpose(out.affinity)));
    }
    Var map = nn::tanh(pre);
    out.alpha_text = nn::softmax(nn::matvec(nn::transpose(map), p.score_text));
    out.pooled_text =
        nn::matvec(text.raw, detach_weights ? nn::detach(out.alpha_text) : out.alpha_text);
  } else {
    out.pooled_text = tape.constant(Tensor({dim}));
  }
  return out;
}

AttentionOutput snapshot(const CoAttention& attn) {
  AttentionOutput out;
  out.pooled_visual = attn.pooled_visual.value().values();
  out.pooled_text = attn.pooled_text.value().values();
  if (attn.alpha_visual.valid()) out.alpha_visual = attn.alpha_visual.value().values();
  if (attn.alpha_text.valid()) out.alpha_text = attn.alpha_text.value().values();
  if (attn.affinity.valid()) out.affinity = attn.affinity.value();
  return out;
}

}  // namespace aomd::attention
