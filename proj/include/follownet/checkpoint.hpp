#pragma once

#include <cstdint>
#include <string>

#include "follownet/model.hpp"

namespace follownet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary model snapshot: magic bytes "FNET", a format version, the
// architecture config, then every parameter sorted by name (name, shape,
// 32-bit little-endian IEEE-754 values) and a trailing 64-bit FNV-1a
// checksum over all preceding bytes. Values round-trip bit-identically at
// 32-bit precision: save(load(f)) reproduces f byte for byte.
void save_checkpoint(const FollowNetModel& model, const std::string& path);

FollowNetModel load_checkpoint(const std::string& path);

}  // namespace follownet
