#include "follownet/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "follownet/errors.hpp"

namespace follownet {

long long shape_size(const Shape& shape) {
  long long n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

TensorPtr Tensor::zeros(Shape shape, bool requires_grad) {
  for (int d : shape) {
    if (d <= 0) throw ConfigError("tensor extents must be positive, got " + shape_str(shape));
  }
  auto t = std::make_shared<Tensor>();
  const auto n = static_cast<std::size_t>(shape_size(shape));
  t->shape = std::move(shape);
  t->values.assign(n, 0.0);
  t->set_requires_grad(requires_grad);
  return t;
}

TensorPtr Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_size(shape) != static_cast<long long>(values.size())) {
    throw ConfigError("tensor shape " + shape_str(shape) + " does not match " +
                      std::to_string(values.size()) + " values");
  }
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->values = std::move(values);
  t->set_requires_grad(requires_grad);
  return t;
}

TensorPtr Tensor::scalar(double v, bool requires_grad) {
  return from_values({1}, {v}, requires_grad);
}

void Tensor::set_requires_grad(bool rg) {
  requires_grad = rg;
  if (rg) {
    grad.assign(values.size(), 0.0);
  } else {
    grad.clear();
  }
}

void Tensor::zero_grad() {
  if (requires_grad) grad.assign(values.size(), 0.0);
}

bool Tensor::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

TensorPtr Tensor::detached() const {
  auto t = std::make_shared<Tensor>();
  t->shape = shape;
  t->values = values;
  return t;
}

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool GradMode::enabled() { return g_grad_enabled; }
void GradMode::set(bool on) { g_grad_enabled = on; }

NoGradGuard::NoGradGuard() : prev_(GradMode::enabled()) { GradMode::set(false); }
NoGradGuard::~NoGradGuard() { GradMode::set(prev_); }

void backward(const TensorPtr& root) {
  if (!root) throw InternalError("backward: null root");
  if (root->size() != 1) {
    throw InternalError("backward: root must be scalar, got " + shape_str(root->shape));
  }
  if (!root->requires_grad) return;

  // Iterative post-order DFS; only nodes that require grad are on the tape.
  std::vector<Tensor*> order;
  std::unordered_set<Tensor*> seen;
  struct Frame {
    Tensor* node;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  stack.push_back({root.get(), 0});
  seen.insert(root.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < f.node->parents.size()) {
      Tensor* child = f.node->parents[f.next_child++].get();
      if (child->requires_grad && !seen.count(child)) {
        seen.insert(child);
        stack.push_back({child, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn();
  }
}

}  // namespace follownet
