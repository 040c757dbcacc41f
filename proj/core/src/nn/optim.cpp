#include "aomd/nn/optim.hpp"

#include <cmath>

#include "aomd/error.hpp"

namespace aomd::nn {

void OptimConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optim.learning_rate must be > 0");
  if (!(eps > 0.0)) throw ConfigError("optim.eps must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optim.beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optim.beta2 must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("optim.weight_decay must be >= 0");
  if (batch_size == 0) throw ConfigError("optim.batch_size must be positive");
}

void adamw_step(ParameterStore& store, const OptimConfig& config) {
  store.set_step(store.step() + 1);
  const double t = static_cast<double>(store.step());
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);
  const double lr = config.learning_rate;
  for (auto& [name, p] : store) {
    auto& theta = p.value.values();
    auto& g = p.grad.values();
    auto& m = p.adam_m.values();
    auto& v = p.adam_v.values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      theta[i] -= lr * (config.weight_decay * theta[i] + m_hat / (std::sqrt(v_hat) + config.eps));
      g[i] = 0.0;
    }
  }
}

double clip_grad_norm(ParameterStore& store, double max_norm) {
  const double norm = store.grad_norm();
  if (!std::isfinite(norm)) throw NumericError("gradient norm is not finite");
  if (max_norm > 0.0 && norm > max_norm) store.scale_grad(max_norm / norm);
  return norm;
}

}  // namespace aomd::nn
