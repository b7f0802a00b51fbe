#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "follownet/render.hpp"
#include "follownet/rng.hpp"

namespace follownet {

// Byte-packed observation: one class id per pixel plus 32-bit depths. The
// replay buffer holds tens of thousands of observations, so the one-hot
// expansion is deferred until a batch is actually trained on.
struct CompactObservation {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> classes;  // height*width class ids
  std::vector<float> depth;           // height*width, in [0, 1]
  std::vector<int> tokens;
};

// Packs a rendered observation; the semantic image must be exactly one-hot.
CompactObservation compact(const Observation& obs);

// Reconstructs the full observation (exact inverse up to 32-bit depth).
Observation expand(const CompactObservation& obs);

// One environment step. Consecutive transitions share observation pointers,
// so each stored step costs one compact observation, not two.
struct Transition {
  std::shared_ptr<const CompactObservation> obs;
  int action = 0;
  double reward = 0.0;
  std::shared_ptr<const CompactObservation> next_obs;
  bool done = false;
};

// Fixed-capacity ring with strict FIFO eviction.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(Transition t);
  int size() const { return static_cast<int>(ring_.size()); }
  int capacity() const { return capacity_; }
  std::uint64_t inserted() const { return inserted_; }

  // Logical index 0 is the oldest transition still stored.
  const Transition& at(int logical) const;

  // Uniform sample with replacement; requires at least `batch` stored.
  std::vector<Transition> sample(int batch, Rng& rng) const;

 private:
  int capacity_;
  std::vector<Transition> ring_;  // grows to capacity, then wraps
  std::uint64_t inserted_ = 0;
};

}  // namespace follownet
