#pragma once

#include <cstdint>
#include <string>

#include "follownet/house_map.hpp"

namespace follownet {

// Controls for the procedural house generator.
struct WorldGenParams {
  int width = 23;
  int height = 18;
  int min_objects = 4;   // landmark objects, lower bound
  int max_objects = 8;   // landmark objects, upper bound
  int min_room_span = 3; // narrowest interior side a room may have
  std::string name;      // empty -> "gen<seed>"
};

// Procedurally generates a sealed multi-room house:
//   * the interior is partitioned into rooms by straight walls, each wall
//     pierced by exactly one door that opens onto floor on both sides;
//   * 4..8 landmark objects are scattered on floor cells without ever
//     disconnecting the walkable area;
//   * regions are emitted for every room ("room_<k>"), every door
//     ("door_<k>") and the floor cells around every object ("by_<name>").
//
// The result is fully connected (breadth-first audit over walkable cells)
// and round-trips through the canonical text form; the same (params, seed)
// pair always yields a byte-identical save_house() serialization.
// Unsatisfiable requests (too small to split into rooms, nowhere left to
// place an object, bad bounds) raise GenerationError.
HouseMap generate_house(const WorldGenParams& params, std::uint64_t seed);

}  // namespace follownet
