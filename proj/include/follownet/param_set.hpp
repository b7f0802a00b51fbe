#pragma once

#include <map>
#include <string>

#include "follownet/tensor.hpp"

namespace follownet {

// Named model parameters. std::map keeps iteration lexicographic, which the
// optimizer and checkpoint format rely on for determinism.
class ParameterSet {
 public:
  using Map = std::map<std::string, TensorPtr>;

  // Registers a parameter; the tensor is switched to requires_grad.
  TensorPtr add(const std::string& name, TensorPtr t);

  const TensorPtr& get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) > 0; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  long long total_parameters() const;

  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  // Deep copy: fresh tensors with identical values, zeroed gradients.
  ParameterSet clone() const;
  // Bitwise value copy from a structurally identical set.
  void copy_values_from(const ParameterSet& other);
  void zero_grads();

 private:
  Map entries_;
};

}  // namespace follownet
