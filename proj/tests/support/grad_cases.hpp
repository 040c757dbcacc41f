#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aomd/model.hpp"
#include "support.hpp"

namespace aomd::testing {

// One differentiable op under a finite-difference check: a generator of
// random inputs and a scalar loss over them.
struct GradCase {
  std::string name;
  std::function<std::vector<nn::Tensor>(Rng&)> inputs;
  std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)> loss;
};

// Every neural op plus the sequence encoder and co-attention block.
std::vector<GradCase> op_grad_cases();

// A tiny random network and post: d = h = 6, K <= 3 objects, S <= 2 caption
// clusters, with description and comments.
struct TinyModel {
  AomdModel model;
  nn::ParameterStore store;
  PreparedPost post;
};
TinyModel tiny_model(Rng& rng, Ablation ablation);

// Cross-entropy of the tiny network on its post, checked against central
// differences for every parameter entry.
GradCheck tiny_model_gradients(Rng& rng, Ablation ablation);

}  // namespace aomd::testing
