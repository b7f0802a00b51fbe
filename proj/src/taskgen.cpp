#include "follownet/taskgen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "follownet/errors.hpp"
#include "follownet/instr_gen.hpp"
#include "follownet/rng.hpp"

namespace follownet {
namespace {

struct TaskPair {
  const HouseMap* house = nullptr;
  std::string start;
  std::string goal;
};

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Shortest walkable path from the start region to the goal region's first
// cell; empty when unreachable. Cells are ordered start -> goal.
std::vector<std::pair<int, int>> shortest_path(const HouseMap& house, const Region& start,
                                               const Region& goal) {
  const std::vector<int> dist = bfs_distances(house, start.cells);
  auto [gx, gy] = goal.cells.front();
  const auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * house.width + x; };
  if (dist[idx(gx, gy)] < 0) return {};
  std::vector<std::pair<int, int>> path = {{gx, gy}};
  int x = gx, y = gy;
  while (dist[idx(x, y)] > 0) {
    static constexpr int kDx[] = {1, -1, 0, 0};
    static constexpr int kDy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (house.walkable(nx, ny) && dist[idx(nx, ny)] == dist[idx(x, y)] - 1) {
        x = nx;
        y = ny;
        path.push_back({x, y});
        break;
      }
    }
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Door regions the path passes through, in travel order.
std::vector<std::string> doors_on_path(const HouseMap& house,
                                       const std::vector<std::pair<int, int>>& path) {
  std::map<std::pair<int, int>, std::string> door_at;
  for (const Region& r : house.regions) {
    if (!starts_with(r.name, "door_")) continue;
    for (const auto& cell : r.cells) door_at[cell] = r.name;
  }
  std::vector<std::string> doors;
  for (const auto& cell : path) {
    auto it = door_at.find(cell);
    if (it == door_at.end()) continue;
    if (std::find(doors.begin(), doors.end(), it->second) == doors.end()) {
      doors.push_back(it->second);
    }
  }
  return doors;
}

}  // namespace

InstructionDataset generate_dataset(const std::vector<HouseMap>& houses,
                                    const DatasetGenParams& params, std::uint64_t seed) {
  if (houses.empty()) throw ConfigError("dataset generation needs at least one house");
  if (params.tasks < 1) throw ConfigError("tasks must be positive");
  if (params.per_task < 1) throw ConfigError("per_task must be positive");
  if (params.max_waypoints < 1 || params.max_waypoints > 5) {
    throw ConfigError("max_waypoints must be in 1..5");
  }
  if (params.split != "auto" && params.split != "train" && params.split != "holdout") {
    throw ConfigError("split must be auto, train or holdout, got '" + params.split + "'");
  }
  {
    std::set<std::string> names;
    for (const HouseMap& h : houses) {
      if (!names.insert(h.name).second) {
        throw ConfigError("two houses share the name '" + h.name + "'");
      }
    }
  }

  // Candidate pool: room starts x landmark goals, enumerated deterministically
  // (houses in input order, regions already name-sorted by the loader).
  std::vector<TaskPair> pool;
  for (const HouseMap& h : houses) {
    std::vector<const Region*> starts, goals;
    for (const Region& r : h.regions) {
      if (starts_with(r.name, "by_")) {
        goals.push_back(&r);
      } else if (!starts_with(r.name, "door_")) {
        starts.push_back(&r);
      }
    }
    if (goals.empty()) {  // hand-written house without landmark zones
      goals = starts;
    }
    for (const Region* s : starts) {
      for (const Region* g : goals) {
        if (s->name != g->name) pool.push_back({&h, s->name, g->name});
      }
    }
  }

  Rng rng(derive_seed(seed, "taskgen"));
  rng.shuffle(pool);

  InstructionDataset ds;
  int phrasing = 0;
  int accepted = 0;
  for (const TaskPair& task : pool) {
    if (accepted == params.tasks) break;
    const HouseMap& house = *task.house;
    const auto path = shortest_path(house, *house.region(task.start), *house.region(task.goal));
    if (path.empty()) continue;  // unreachable pair; try the next one
    std::vector<std::string> waypoints = doors_on_path(house, path);
    if (static_cast<int>(waypoints.size()) > params.max_waypoints - 1) {
      waypoints.erase(waypoints.begin(),
                      waypoints.end() - (params.max_waypoints - 1));
    }
    for (int p = 0; p < params.per_task; ++p) {
      ds.instructions.push_back(generate_instruction(house, task.start, task.goal, waypoints,
                                                     derive_seed(seed, phrasing++)));
    }
    ++accepted;
  }
  if (accepted < params.tasks) {
    throw GenerationError("houses supply only " + std::to_string(accepted) +
                          " reachable (start, goal) pairs; " + std::to_string(params.tasks) +
                          " requested");
  }

  if (params.split == "auto") {
    finalize_dataset(ds);
    ds = split_dataset(ds, params.holdout_fraction, derive_seed(seed, "split"));
  } else {
    const SplitTag tag = params.split == "train" ? SplitTag::kTrain : SplitTag::kHoldout;
    for (Instruction& ins : ds.instructions) ins.split_tag = tag;
  }
  finalize_dataset(ds);
  return ds;
}

}  // namespace follownet
