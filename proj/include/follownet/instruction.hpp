#pragma once

#include <string>
#include <vector>

namespace follownet {

enum class SplitTag { kTrain, kHoldout };

// One natural-language navigation task. The waypoint list is hidden from the
// agent (it only ever sees the token sequence); the last waypoint is the goal.
struct Instruction {
  std::string house_name;
  std::string text;
  std::vector<int> tokens;
  std::string start_region;
  std::vector<std::string> waypoints;
  SplitTag split_tag = SplitTag::kTrain;
};

}  // namespace follownet
