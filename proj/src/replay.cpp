#include "follownet/replay.hpp"

#include <utility>

#include "follownet/errors.hpp"
#include "follownet/tensor.hpp"

namespace follownet {

CompactObservation compact(const Observation& obs) {
  if (!obs.semantic || !obs.depth || obs.semantic->shape.size() != 3 ||
      obs.depth->shape.size() != 2) {
    throw ValidationError("compact: expected a [h,w,c] semantic and [h,w] depth image");
  }
  CompactObservation packed;
  packed.height = obs.semantic->shape[0];
  packed.width = obs.semantic->shape[1];
  packed.channels = obs.semantic->shape[2];
  if (obs.depth->shape[0] != packed.height || obs.depth->shape[1] != packed.width) {
    throw ValidationError("compact: semantic and depth image sizes disagree");
  }
  if (packed.channels > 255) {
    throw ValidationError("compact: more than 255 semantic classes cannot be byte-packed");
  }
  const std::size_t pixels = static_cast<std::size_t>(packed.height) * packed.width;
  packed.classes.resize(pixels);
  packed.depth.resize(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    int hot = -1;
    for (int c = 0; c < packed.channels; ++c) {
      const double v = obs.semantic->values[p * packed.channels + c];
      if (v == 1.0 && hot < 0) {
        hot = c;
      } else if (v != 0.0) {
        hot = -2;
        break;
      }
    }
    if (hot < 0) {
      throw ValidationError("compact: semantic image is not one-hot at pixel " +
                            std::to_string(p));
    }
    packed.classes[p] = static_cast<std::uint8_t>(hot);
    packed.depth[p] = static_cast<float>(obs.depth->values[p]);
  }
  packed.tokens = obs.tokens;
  return packed;
}

Observation expand(const CompactObservation& packed) {
  const std::size_t pixels = static_cast<std::size_t>(packed.height) * packed.width;
  if (packed.height < 1 || packed.width < 1 || packed.channels < 1 ||
      packed.classes.size() != pixels || packed.depth.size() != pixels) {
    throw ValidationError("expand: inconsistent compact observation");
  }
  Observation obs;
  obs.semantic = Tensor::zeros({packed.height, packed.width, packed.channels});
  obs.depth = Tensor::zeros({packed.height, packed.width});
  for (std::size_t p = 0; p < pixels; ++p) {
    const int cls = packed.classes[p];
    if (cls >= packed.channels) {
      throw ValidationError("expand: class id " + std::to_string(cls) +
                            " exceeds channel count");
    }
    obs.semantic->values[p * packed.channels + cls] = 1.0;
    obs.depth->values[p] = static_cast<double>(packed.depth[p]);
  }
  obs.tokens = packed.tokens;
  return obs;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[static_cast<std::size_t>(inserted_ % capacity_)] = std::move(t);
  }
  inserted_ += 1;
}

const Transition& ReplayBuffer::at(int logical) const {
  if (logical < 0 || logical >= size()) {
    throw UsageError("replay index " + std::to_string(logical) + " out of range (size " +
                     std::to_string(size()) + ")");
  }
  // Before wrapping, slot 0 is the oldest; afterwards the write cursor is.
  const std::uint64_t oldest = inserted_ <= static_cast<std::uint64_t>(capacity_)
                                   ? 0
                                   : inserted_ % capacity_;
  return ring_[static_cast<std::size_t>((oldest + static_cast<std::uint64_t>(logical)) %
                                        capacity_)];
}

std::vector<Transition> ReplayBuffer::sample(int batch, Rng& rng) const {
  if (batch < 1) throw ConfigError("sample batch size must be positive");
  if (size() < batch) {
    throw NotReadyError("replay buffer holds " + std::to_string(size()) +
                        " transitions, need " + std::to_string(batch));
  }
  std::vector<Transition> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    out.push_back(ring_[static_cast<std::size_t>(rng.uniform_int(size()))]);
  }
  return out;
}

}  // namespace follownet
