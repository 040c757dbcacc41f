#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "aomd/nn/tensor.hpp"

namespace aomd {
class Rng;
}

namespace aomd::nn {

struct Parameter {
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;

  bool operator==(const Parameter&) const = default;
};

// Named trainable tensors with their gradients and AdamW moments. Names are
// kept sorted, so iteration order (and therefore every update and every
// serialized byte) is deterministic.
class ParameterStore {
 public:
  // Registers a parameter; throws ConfigError if the name is taken.
  Parameter& add(const std::string& name, Tensor init);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  double grad_norm() const;
  void scale_grad(double factor);

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  bool operator==(const ParameterStore&) const = default;

 private:
  std::map<std::string, Parameter> params_;
  std::uint64_t step_ = 0;
  std::uint64_t seed_ = 0;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)) with fan_in = cols and
// fan_out = rows of a matrix (a vector counts as a 1 x n matrix).
void init_glorot_uniform(Tensor& t, Rng& rng);

}  // namespace aomd::nn
