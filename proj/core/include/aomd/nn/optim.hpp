#pragma once

#include <cstddef>

#include "aomd/nn/params.hpp"

namespace aomd::nn {

struct OptimConfig {
  double learning_rate = 0.001;
  double eps = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.01;
  std::size_t batch_size = 32;
  // Global gradient norm cap applied before each step; <= 0 disables it.
  double clip_norm = 5.0;

  void validate() const;
};

// Adam with bias correction and decoupled weight decay:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (wd * theta + m_hat / (sqrt(v_hat) + eps))
// Increments the store's step counter and zeroes every gradient.
void adamw_step(ParameterStore& store, const OptimConfig& config);

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(ParameterStore& store, double max_norm);

}  // namespace aomd::nn
