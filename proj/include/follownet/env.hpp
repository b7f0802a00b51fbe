#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "follownet/house_map.hpp"
#include "follownet/instruction.hpp"
#include "follownet/render.hpp"

namespace follownet {

enum class Action { kTurnLeft = 0, kForward = 1, kTurnRight = 2 };
inline constexpr int kNumActions = 3;

struct SimParams {
  RenderParams render;
  int max_episode_steps = 100;
};

struct EpisodeState {
  Pose pose;
  std::set<std::string> visited_waypoints;
  int steps_taken = 0;
  bool done = false;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

// Samples a uniform start cell from the instruction's start region and a
// uniform heading, both driven only by `seed`, and renders the first view.
std::pair<EpisodeState, Observation> reset_episode(const HouseMap& house,
                                                   const Instruction& instruction,
                                                   std::uint64_t seed,
                                                   const SimParams& params = {});

// Deterministic dynamics: turns rotate in place, forward advances one cell
// when the target is walkable and otherwise does nothing. Waypoint credit is
// granted from the post-move pose; reaching the final waypoint or exhausting
// the step budget ends the episode.
StepResult step(const HouseMap& house, EpisodeState& state, const Instruction& instruction,
                Action action, const SimParams& params = {});

// Sparse once-per-waypoint credit: +1.0 on first entry into the final
// waypoint's region (and the episode is flagged done), +0.05 on first entry
// into each other waypoint region; co-located unvisited regions are all
// credited in the same step.
double reward_for(const HouseMap& house, EpisodeState& state, const Instruction& instruction);

inline Heading turn_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
inline Heading turn_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }

}  // namespace follownet
