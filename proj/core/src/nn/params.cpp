#include "aomd/nn/params.hpp"

#include <cmath>

#include "aomd/error.hpp"
#include "aomd/rng.hpp"

namespace aomd::nn {

Parameter& ParameterStore::add(const std::string& name, Tensor init) {
  if (params_.count(name)) throw ConfigError("parameter '" + name + "' already exists");
  Parameter p;
  p.grad = Tensor::zeros_like(init);
  p.adam_m = Tensor::zeros_like(init);
  p.adam_v = Tensor::zeros_like(init);
  p.value = std::move(init);
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& [name, p] : params_) p.grad.fill(0.0);
}

double ParameterStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& [name, p] : params_) {
    for (double g : p.grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

void ParameterStore::scale_grad(double factor) {
  for (auto& [name, p] : params_) {
    for (double& g : p.grad.values()) g *= factor;
  }
}

void init_glorot_uniform(Tensor& t, Rng& rng) {
  const double fan_out = t.rank() >= 2 ? static_cast<double>(t.rows()) : 1.0;
  const double fan_in = t.rank() >= 2 ? static_cast<double>(t.cols()) : static_cast<double>(t.size());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

}  // namespace aomd::nn
