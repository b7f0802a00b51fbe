#include "follownet/param_set.hpp"

#include "follownet/errors.hpp"

namespace follownet {

TensorPtr ParameterSet::add(const std::string& name, TensorPtr t) {
  if (!t) throw InternalError("ParameterSet::add: null tensor for '" + name + "'");
  if (entries_.count(name)) {
    throw ConfigError("duplicate parameter name '" + name + "'");
  }
  t->set_requires_grad(true);
  entries_[name] = t;
  return t;
}

const TensorPtr& ParameterSet::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw ConfigError("unknown parameter '" + name + "'");
  }
  return it->second;
}

long long ParameterSet::total_parameters() const {
  long long n = 0;
  for (const auto& [name, t] : entries_) n += t->size();
  return n;
}

ParameterSet ParameterSet::clone() const {
  ParameterSet out;
  for (const auto& [name, t] : entries_) {
    out.add(name, Tensor::from_values(t->shape, t->values));
  }
  return out;
}

void ParameterSet::copy_values_from(const ParameterSet& other) {
  if (entries_.size() != other.entries_.size()) {
    throw ConfigError("parameter set mismatch: " + std::to_string(entries_.size()) +
                      " vs " + std::to_string(other.entries_.size()) + " entries");
  }
  auto it = entries_.begin();
  auto ot = other.entries_.begin();
  for (; it != entries_.end(); ++it, ++ot) {
    if (it->first != ot->first || it->second->shape != ot->second->shape) {
      throw ConfigError("parameter set mismatch at '" + it->first + "' vs '" + ot->first + "'");
    }
    it->second->values = ot->second->values;
  }
}

void ParameterSet::zero_grads() {
  for (const auto& [name, t] : entries_) t->zero_grad();
}

}  // namespace follownet
