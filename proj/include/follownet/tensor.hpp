#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace follownet {

using Shape = std::vector<int>;

long long shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// A node in the reverse-mode graph. Values are 64-bit floats in row-major
// order. Leaf tensors (inputs, parameters) have no parents; op results
// carry a closure that routes the output gradient to their parents.
class Tensor {
 public:
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // sized like values iff requires_grad
  bool requires_grad = false;
  std::vector<TensorPtr> parents;
  std::function<void()> backward_fn;

  static TensorPtr zeros(Shape shape, bool requires_grad = false);
  static TensorPtr from_values(Shape shape, std::vector<double> values,
                               bool requires_grad = false);
  static TensorPtr scalar(double v, bool requires_grad = false);

  long long size() const { return static_cast<long long>(values.size()); }
  void set_requires_grad(bool rg);
  void zero_grad();
  bool all_finite() const;
  // Detached value copy; drops graph edges and gradients.
  TensorPtr detached() const;
};

// Reverse-mode accumulation from a scalar root. Gradients are added into
// every reachable tensor that requires them.
void backward(const TensorPtr& root);

// Thread-local switch: with grads disabled, ops compute values only and
// build no graph.
struct GradMode {
  static bool enabled();
  static void set(bool on);
};

struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

}  // namespace follownet
