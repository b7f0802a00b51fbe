#include "follownet/grad_check.hpp"

#include <cmath>
#include <map>

#include "follownet/errors.hpp"

namespace follownet {

double grad_check(const std::function<TensorPtr(ParameterSet&)>& forward,
                  ParameterSet& params, double epsilon) {
  if (epsilon < 1e-7 || epsilon > 1e-3) {
    throw ConfigError("grad_check: epsilon must lie in [1e-7, 1e-3]");
  }

  params.zero_grads();
  auto loss = forward(params);
  if (loss->size() != 1) throw InternalError("grad_check: forward must return a scalar");
  if (!std::isfinite(loss->values[0])) {
    throw InternalError("grad_check: forward value is not finite");
  }
  backward(loss);
  std::map<std::string, std::vector<double>> g_ad;
  for (auto& [name, t] : params) g_ad[name] = t->grad;

  double worst = 0.0;
  NoGradGuard ng;
  for (auto& [name, t] : params) {
    for (std::size_t i = 0; i < t->values.size(); ++i) {
      const double saved = t->values[i];
      t->values[i] = saved + epsilon;
      const double up = forward(params)->values[0];
      t->values[i] = saved - epsilon;
      const double down = forward(params)->values[0];
      t->values[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw InternalError("grad_check: perturbed forward value is not finite at '" + name + "'");
      }
      const double g_fd = (up - down) / (2.0 * epsilon);
      const double ad = g_ad[name][i];
      const double denom = std::max(1e-8, std::fabs(ad) + std::fabs(g_fd));
      worst = std::max(worst, std::fabs(ad - g_fd) / denom);
    }
  }
  params.zero_grads();
  return worst;
}

}  // namespace follownet
