#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aomd/geometry.hpp"
#include "aomd/nn/tape.hpp"
#include "aomd/types.hpp"

namespace aomd {
class Rng;
}

// Co-attention between visual objects and caption token clusters.
//
// Both sides are first augmented with their normalized box vertices
// (feature then 8 box scalars, so the augmented width is d + 8). With
// C (d~ x S) and V (d~ x K) the augmented matrices:
//
//   E   = tanh(C^T W V)                       S x K affinity
//   M_v = tanh(W_v V + (W_c C) E)             d~ x K
//   M_c = tanh(W_c C + (W_v V) E^T)           d~ x S
//   a_v = softmax(w_v^T M_v),  a_c = softmax(w_c^T M_c)
//   F_v = sum_k a_v[k] v_k,    F_c = sum_s a_c[s] c_s
//
// Pooling uses the un-augmented d-wide features. When one side is empty its
// pooled feature is the zero vector and the coupling term on the other side is
// an empty sum, so the other side attends on its own projection alone.
namespace aomd::attention {

inline constexpr std::size_t kBoxWidth = BoundingBox::kScalars;

struct Params {
  nn::Var affinity;      // W    [d~, d~]
  nn::Var map_visual;    // W_v  [d~, d~]
  nn::Var map_text;      // W_c  [d~, d~]
  nn::Var score_visual;  // w_v  [d~]
  nn::Var score_text;    // w_c  [d~]
};

void add_params(nn::ParameterStore& store, const std::string& prefix, std::size_t augmented_dim,
                Rng& rng);
Params params(nn::Tape& tape, const std::string& prefix);

// One modality: raw features [d, n] and the same columns augmented with box
// coordinates [d+8, n]. n == 0 is represented by invalid Vars.
struct Side {
  nn::Var raw;
  nn::Var augmented;
  std::size_t count = 0;
};

// Normalized boxes as the columns of an [8, n] matrix.
nn::Tensor box_matrix(const std::vector<BoundingBox>& boxes, ImageSize image);

// Column k = [feature_k, normalized box_k].
nn::Var augment_with_position(nn::Var features, const nn::Tensor& boxes);
Side make_side(nn::Tape& tape, nn::Var features, const nn::Tensor& boxes);

// E = tanh(C^T W V), [S, K].
nn::Var affinity(nn::Var text_aug, nn::Var visual_aug, nn::Var weights);

struct CoAttention {
  nn::Var pooled_visual;  // F_v [d]
  nn::Var pooled_text;    // F_c [d]
  nn::Var alpha_visual;   // [K], invalid when K == 0
  nn::Var alpha_text;     // [S], invalid when S == 0
  nn::Var affinity;       // [S, K], invalid unless both sides are non-empty
};

// With detach_weights the pooling weights are treated as constants in the
// backward pass; only used to probe the gradient carried by attention.
CoAttention co_attend(nn::Tape& tape, const Params& params, const Side& visual, const Side& text,
                      std::size_t dim, bool detach_weights = false);

// Plain values of a co-attention pass, kept for inspection and dumps.
struct AttentionOutput {
  std::vector<double> pooled_visual;
  std::vector<double> pooled_text;
  std::vector<double> alpha_visual;
  std::vector<double> alpha_text;
  nn::Tensor affinity;  // [S, K] or empty
};

AttentionOutput snapshot(const CoAttention& attn);

}  // namespace aomd::attention
