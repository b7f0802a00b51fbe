#include "follownet/instr_gen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"

namespace follownet {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 centroid(const Region& region) {
  Vec2 c;
  for (const auto& [x, y] : region.cells) {
    c.x += x;
    c.y += y;
  }
  const double n = static_cast<double>(region.cells.size());
  c.x /= n;
  c.y /= n;
  return c;
}

const Region& need_region(const HouseMap& house, const std::string& name) {
  const Region* r = house.region(name);
  if (r == nullptr) {
    throw GenerationError("instruction generator: unknown region '" + name + "' in house '" +
                          house.name + "'");
  }
  return *r;
}

std::vector<std::pair<int, int>> walkable_cells(const HouseMap& house, const Region& region) {
  std::vector<std::pair<int, int>> cells;
  for (const auto& cell : region.cells) {
    if (house.walkable(cell.first, cell.second)) cells.push_back(cell);
  }
  return cells;
}

bool covers_door(const HouseMap& house, const Region& region) {
  for (const auto& [x, y] : region.cells) {
    if (house.at(x, y).kind == CellKind::kDoor) return true;
  }
  return false;
}

enum class Turn { kStraight, kLeft, kRight, kAcross };

// Classifies the bend between the incoming and outgoing leg. Left follows the
// environment's rotation convention (+x turning toward +y is a left turn).
Turn turn_between(const Vec2& in, const Vec2& out) {
  const double len_in = std::hypot(in.x, in.y);
  const double len_out = std::hypot(out.x, out.y);
  if (len_in < 1e-9 || len_out < 1e-9) return Turn::kStraight;
  double cos_angle = (in.x * out.x + in.y * out.y) / (len_in * len_out);
  cos_angle = std::clamp(cos_angle, -1.0, 1.0);
  const double angle_deg = std::acos(cos_angle) * 180.0 / kPi;
  if (angle_deg <= 22.5) return Turn::kStraight;
  if (angle_deg >= 157.5) return Turn::kAcross;
  const double cross = in.x * out.y - in.y * out.x;
  return cross >= 0.0 ? Turn::kLeft : Turn::kRight;
}

std::string pick(Rng& rng, std::initializer_list<const char*> options) {
  const int i = rng.uniform_int(static_cast<int>(options.size()));
  return *(options.begin() + i);
}

}  // namespace

std::string display_region_name(const std::string& region_name) {
  std::string s = region_name;
  if (s.rfind("by_", 0) == 0) s = s.substr(3);
  while (!s.empty() &&
         (std::isdigit(static_cast<unsigned char>(s.back())) != 0 || s.back() == '_')) {
    s.pop_back();
  }
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  return s;
}

Instruction generate_instruction(const HouseMap& house, const std::string& start_region,
                                 const std::string& goal_region,
                                 const std::vector<std::string>& waypoint_path,
                                 std::uint64_t rng_seed) {
  std::vector<std::string> path = waypoint_path;
  path.push_back(goal_region);

  // Validate the route leg by leg: every hop must be walkable-reachable.
  const Region* prev = &need_region(house, start_region);
  std::vector<std::pair<int, int>> prev_cells = walkable_cells(house, *prev);
  if (prev_cells.empty()) {
    throw GenerationError("instruction generator: start region '" + start_region +
                          "' has no walkable cells");
  }
  std::vector<const Region*> stops;
  for (const std::string& name : path) {
    const Region& next = need_region(house, name);
    const std::vector<std::pair<int, int>> next_cells = walkable_cells(house, next);
    if (next_cells.empty()) {
      throw GenerationError("instruction generator: region '" + name +
                            "' has no walkable cells");
    }
    const std::vector<int> dist = bfs_distances(house, prev_cells);
    bool reachable = false;
    for (const auto& [x, y] : next_cells) {
      if (dist[static_cast<std::size_t>(y) * house.width + x] >= 0) {
        reachable = true;
        break;
      }
    }
    if (!reachable) {
      throw GenerationError("instruction generator: region '" + name +
                            "' is unreachable from '" + prev->name + "'");
    }
    stops.push_back(&next);
    prev = &next;
    prev_cells = next_cells;
  }

  // One clause per stop. Direction words come from the bend at the previous
  // stop: walk in from the stop before it, walk out toward the current one.
  Rng rng(rng_seed);
  std::vector<std::string> clauses;
  for (std::size_t j = 0; j < stops.size(); ++j) {
    const std::string landmark = display_region_name(stops[j]->name);
    std::string clause;
    if (covers_door(house, *stops[j])) {
      clause = pick(rng, {"go", "walk", "head"}) + " " + pick(rng, {"out", "through"}) +
               " the " + landmark;
    } else if (j == 0) {
      clause = pick(rng, {"go", "walk", "head"}) + " to the " + landmark;
    } else {
      const Vec2 before =
          j >= 2 ? centroid(*stops[j - 2]) : centroid(need_region(house, start_region));
      const Vec2 at = centroid(*stops[j - 1]);
      const Vec2 here = centroid(*stops[j]);
      const Vec2 in{at.x - before.x, at.y - before.y};
      const Vec2 out{here.x - at.x, here.y - at.y};
      switch (turn_between(in, out)) {
        case Turn::kStraight:
          clause = pick(rng, {"go", "walk", "head"}) + " straight to the " + landmark;
          break;
        case Turn::kAcross:
          clause = pick(rng, {"go", "walk", "head"}) + " across to the " + landmark;
          break;
        case Turn::kLeft:
          clause = "turn left at the " + landmark;
          break;
        case Turn::kRight:
          clause = "turn right at the " + landmark;
          break;
      }
    }
    clauses.push_back(std::move(clause));
  }

  std::string text = clauses.front();
  for (std::size_t j = 1; j < clauses.size(); ++j) {
    text += ", " + pick(rng, {"then", "and"}) + " " + clauses[j];
  }
  text += ".";

  Instruction ins;
  ins.house_name = house.name;
  ins.text = std::move(text);
  ins.start_region = start_region;
  ins.waypoints = std::move(path);
  ins.split_tag = SplitTag::kTrain;
  return ins;
}

}  // namespace follownet
