#pragma once

#include <map>
#include <string>
#include <vector>

#include "follownet/param_set.hpp"

namespace follownet {

// One vanilla SGD step: theta <- theta - lr * grad, then zero the grads.
// Throws InternalError naming the parameter if any gradient is missing/unsized.
void sgd_update(ParameterSet& params, double lr);

// SGD with optional classic momentum (velocity buffers keyed by parameter name).
// momentum = 0 reduces exactly to sgd_update.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double momentum = 0.0);

  void step(ParameterSet& params);

  double lr() const { return lr_; }
  double momentum() const { return momentum_; }

 private:
  double lr_;
  double momentum_;
  std::map<std::string, std::vector<double>> velocity_;
};

}  // namespace follownet
