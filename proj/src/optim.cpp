#include "follownet/optim.hpp"

#include <algorithm>

#include "follownet/errors.hpp"

namespace follownet {

void sgd_update(ParameterSet& params, double lr) {
  for (auto& [name, t] : params) {
    if (t->grad.size() != t->values.size()) {
      throw InternalError("sgd_update: parameter '" + name + "' has no gradient buffer");
    }
    for (std::size_t i = 0; i < t->values.size(); ++i) {
      t->values[i] -= lr * t->grad[i];
    }
    std::fill(t->grad.begin(), t->grad.end(), 0.0);
  }
}

SgdOptimizer::SgdOptimizer(double lr, double momentum) : lr_(lr), momentum_(momentum) {
  if (lr <= 0.0) throw ConfigError("SgdOptimizer: learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("SgdOptimizer: momentum must be in [0, 1)");
  }
}

void SgdOptimizer::step(ParameterSet& params) {
  if (momentum_ == 0.0) {
    sgd_update(params, lr_);
    return;
  }
  for (auto& [name, t] : params) {
    if (t->grad.size() != t->values.size()) {
      throw InternalError("SgdOptimizer: parameter '" + name + "' has no gradient buffer");
    }
    auto& v = velocity_[name];
    if (v.size() != t->values.size()) v.assign(t->values.size(), 0.0);
    for (std::size_t i = 0; i < t->values.size(); ++i) {
      v[i] = momentum_ * v[i] + t->grad[i];
      t->values[i] -= lr_ * v[i];
    }
    std::fill(t->grad.begin(), t->grad.end(), 0.0);
  }
}

}  // namespace follownet
