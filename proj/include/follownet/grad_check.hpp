#pragma once

#include <functional>

#include "follownet/param_set.hpp"
#include "follownet/tensor.hpp"

namespace follownet {

// Compares reverse-mode gradients of a scalar loss against central finite
// differences, coordinate by coordinate over every parameter in the set.
// `forward` must rebuild its graph from the current parameter values on every
// call and must be deterministic. Returns the worst relative error
//   |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|)
// over all coordinates. epsilon must lie in [1e-7, 1e-3].
// Throws InternalError if any forward value is not finite.
double grad_check(const std::function<TensorPtr(ParameterSet&)>& forward,
                  ParameterSet& params, double epsilon = 1e-5);

}  // namespace follownet
