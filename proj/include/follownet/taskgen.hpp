#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "follownet/dataset.hpp"
#include "follownet/house_map.hpp"

namespace follownet {

// Controls for sampling an instruction dataset from a set of houses.
struct DatasetGenParams {
  int tasks = 10;              // distinct (start, goal) pairs to sample
  int per_task = 3;            // phrasings generated per task
  int max_waypoints = 5;       // cap on waypoints per instruction (1..5)
  double holdout_fraction = 0.2;
  // "auto": run the start/goal-disjoint splitter at holdout_fraction.
  // "train"/"holdout": tag every record with that split instead.
  std::string split = "auto";
};

// Samples `tasks` distinct (start region, goal region) pairs across the
// houses — starts from room regions, goals from landmark ("by_*") regions,
// falling back to all regions when a house lacks the convention — then walks
// a shortest path per task, threads the doors it crosses in as intermediate
// waypoints (keeping the last max_waypoints-1 when over budget), and phrases
// each task `per_task` times. The result is finalized (tokenized, vocabulary
// built) and, in "auto" mode, split so no hold-out (start, goal) pair leaks
// into train. Deterministic per (houses, params, seed).
//
// Raises GenerationError when the houses cannot supply `tasks` reachable
// pairs, ConfigError on bad params, SplitError when no valid split exists.
InstructionDataset generate_dataset(const std::vector<HouseMap>& houses,
                                    const DatasetGenParams& params, std::uint64_t seed);

}  // namespace follownet
