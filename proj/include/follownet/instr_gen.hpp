#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "follownet/house_map.hpp"
#include "follownet/instruction.hpp"

namespace follownet {

// Produces a natural-language route instruction for the path
// start_region -> waypoint_path... -> goal_region inside `house`.
//
// Every leg must be reachable on foot (4-connected over walkable cells) or a
// GenerationError is thrown.  The wording is sampled with `rng_seed`; the
// same seed always yields the same sentence.  The returned Instruction lists
// the intermediate waypoints followed by the goal region, carries an empty
// token vector (tokenization happens when a dataset is finalized), and is
// tagged as train split.
Instruction generate_instruction(const HouseMap& house, const std::string& start_region,
                                 const std::string& goal_region,
                                 const std::vector<std::string>& waypoint_path,
                                 std::uint64_t rng_seed);

// Human-readable region name: strips a "by_" prefix and trailing digits or
// underscores, and converts remaining underscores to spaces.
// "by_couch" -> "couch", "door_2" -> "door", "dining_room" -> "dining room".
std::string display_region_name(const std::string& region_name);

}  // namespace follownet
