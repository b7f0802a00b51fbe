#include "follownet/env.hpp"

#include <algorithm>

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"

namespace follownet {

namespace {

bool region_contains(const Region& r, int x, int y) {
  return std::find(r.cells.begin(), r.cells.end(), std::make_pair(x, y)) != r.cells.end();
}

}  // namespace

std::pair<EpisodeState, Observation> reset_episode(const HouseMap& house,
                                                   const Instruction& instruction,
                                                   std::uint64_t seed, const SimParams& params) {
  const Region* start = house.region(instruction.start_region);
  if (start == nullptr) {
    throw ConfigError("reset: start region '" + instruction.start_region + "' not in house '" +
                      house.name + "'");
  }
  std::vector<std::pair<int, int>> cells;
  for (const auto& [x, y] : start->cells) {
    if (house.walkable(x, y)) cells.push_back({x, y});
  }
  if (cells.empty()) {
    throw ConfigError("reset: start region '" + instruction.start_region +
                      "' has no walkable cells");
  }
  for (const std::string& wp : instruction.waypoints) {
    if (house.region(wp) == nullptr) {
      throw ConfigError("reset: waypoint region '" + wp + "' not in house '" + house.name + "'");
    }
  }
  if (instruction.waypoints.empty()) {
    throw ConfigError("reset: instruction carries no waypoints");
  }

  Rng rng(seed);
  const auto [x, y] = cells[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(cells.size())))];
  EpisodeState state;
  state.pose = Pose{x, y, static_cast<Heading>(rng.uniform_int(4))};
  Observation obs = render_observation(house, state.pose, instruction.tokens, params.render);
  return {std::move(state), std::move(obs)};
}

double reward_for(const HouseMap& house, EpisodeState& state, const Instruction& instruction) {
  double reward = 0.0;
  const std::string& final_name = instruction.waypoints.back();
  for (const std::string& wp : instruction.waypoints) {
    if (state.visited_waypoints.count(wp) > 0) continue;
    const Region* r = house.region(wp);
    if (r == nullptr || !region_contains(*r, state.pose.x, state.pose.y)) continue;
    state.visited_waypoints.insert(wp);
    if (wp == final_name) {
      reward += 1.0;
      state.done = true;
    } else {
      reward += 0.05;
    }
  }
  return reward;
}

StepResult step(const HouseMap& house, EpisodeState& state, const Instruction& instruction,
                Action action, const SimParams& params) {
  if (state.done) throw UsageError("step: episode is already done");

  switch (action) {
    case Action::kTurnLeft:
      state.pose.heading = turn_left(state.pose.heading);
      break;
    case Action::kTurnRight:
      state.pose.heading = turn_right(state.pose.heading);
      break;
    case Action::kForward: {
      const int nx = state.pose.x + heading_dx(state.pose.heading);
      const int ny = state.pose.y + heading_dy(state.pose.heading);
      if (house.walkable(nx, ny)) {
        state.pose.x = nx;
        state.pose.y = ny;
      }
      break;
    }
  }
  state.steps_taken += 1;

  StepResult result;
  result.reward = reward_for(house, state, instruction);
  if (state.steps_taken >= params.max_episode_steps) state.done = true;
  result.done = state.done;
  result.observation = render_observation(house, state.pose, instruction.tokens, params.render);
  return result;
}

}  // namespace follownet
