#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace follownet {

// splitmix64 finalizer; decorrelates derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Named substream derivation: one root seed fans out into independent
// streams (env, init, epsilon, sampler, ...) so ablations differ only
// where intended.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

// Deterministic RNG. Sampling helpers are built on the raw 64-bit stream
// instead of std distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased draw from [0, n); n >= 1.
  int uniform_int(int n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(static_cast<int>(i)))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline Rng substream(std::uint64_t root, std::string_view name) {
  return Rng(derive_seed(root, name));
}

}  // namespace follownet
