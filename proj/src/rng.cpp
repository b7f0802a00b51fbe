#include "follownet/rng.hpp"

#include "follownet/errors.hpp"

namespace follownet {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  // FNV-1a over the stream name, folded into the root seed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return mix_seed(root ^ h);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix_seed(root ^ mix_seed(index));
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw InternalError("Rng::uniform_int: n must be positive");
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return static_cast<int>(v % un);
}

}  // namespace follownet
