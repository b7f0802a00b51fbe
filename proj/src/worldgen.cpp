#include "follownet/worldgen.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"

namespace follownet {
namespace {

struct Rect {
  int x0 = 0, y0 = 0, w = 0, h = 0;
};

struct WallSegment {
  bool vertical = false;
  int coord = 0;  // x of the wall column, or y of the wall row
  int lo = 0, hi = 0;  // inclusive span along the other axis
};

constexpr std::array<const char*, 12> kObjectNames = {
    "couch", "table", "bed",   "lamp",  "desk",  "shelf",
    "sink",  "plant", "chair", "stove", "piano", "mirror"};

// Splits `rect` recursively, painting wall lines into `grid` and recording
// rooms (leaves) and wall segments in a deterministic visit order.
void split_rect(const Rect& rect, int min_span, Rng& rng, std::vector<CellKind>& grid, int width,
                std::vector<Rect>& rooms, std::vector<WallSegment>& walls, bool allow_stop) {
  const bool can_v = rect.w >= 2 * min_span + 1;
  const bool can_h = rect.h >= 2 * min_span + 1;
  const bool smallish = rect.w * rect.h <= 25 * min_span;
  if ((!can_v && !can_h) || (allow_stop && smallish && rng.uniform() < 0.55)) {
    rooms.push_back(rect);
    return;
  }
  bool vertical;
  if (can_v && can_h) {
    if (rect.w > rect.h + 1) {
      vertical = true;
    } else if (rect.h > rect.w + 1) {
      vertical = false;
    } else {
      vertical = rng.uniform_int(2) == 0;
    }
  } else {
    vertical = can_v;
  }
  if (vertical) {
    const int c = rect.x0 + min_span + rng.uniform_int(rect.w - 2 * min_span);
    for (int y = rect.y0; y < rect.y0 + rect.h; ++y) {
      grid[static_cast<std::size_t>(y) * width + c] = CellKind::kWall;
    }
    walls.push_back({true, c, rect.y0, rect.y0 + rect.h - 1});
    split_rect({rect.x0, rect.y0, c - rect.x0, rect.h}, min_span, rng, grid, width, rooms, walls,
               true);
    split_rect({c + 1, rect.y0, rect.x0 + rect.w - c - 1, rect.h}, min_span, rng, grid, width,
               rooms, walls, true);
  } else {
    const int r = rect.y0 + min_span + rng.uniform_int(rect.h - 2 * min_span);
    for (int x = rect.x0; x < rect.x0 + rect.w; ++x) {
      grid[static_cast<std::size_t>(r) * width + x] = CellKind::kWall;
    }
    walls.push_back({false, r, rect.x0, rect.x0 + rect.w - 1});
    split_rect({rect.x0, rect.y0, rect.w, r - rect.y0}, min_span, rng, grid, width, rooms, walls,
               true);
    split_rect({rect.x0, r + 1, rect.w, rect.y0 + rect.h - r - 1}, min_span, rng, grid, width,
               rooms, walls, true);
  }
}

bool all_walkable_connected(const HouseMap& h) {
  std::vector<std::pair<int, int>> source;
  int walkable_count = 0;
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      if (!h.walkable(x, y)) continue;
      ++walkable_count;
      if (source.empty()) source.push_back({x, y});
    }
  }
  if (walkable_count == 0) return false;
  const std::vector<int> dist = bfs_distances(h, source);
  int reached = 0;
  for (int d : dist) {
    if (d >= 0) ++reached;
  }
  return reached == walkable_count;
}

bool has_floor_neighbor(const HouseMap& h, int x, int y) {
  static constexpr int kDx[] = {1, -1, 0, 0};
  static constexpr int kDy[] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int nx = x + kDx[k], ny = y + kDy[k];
    if (h.in_bounds(nx, ny) && h.at(nx, ny).kind == CellKind::kFloor) return true;
  }
  return false;
}

}  // namespace

HouseMap generate_house(const WorldGenParams& params, std::uint64_t seed) {
  const int w = params.width, h = params.height;
  const int span = params.min_room_span;
  if (span < 2) throw GenerationError("min_room_span must be at least 2");
  if (params.min_objects < 1 || params.max_objects < params.min_objects ||
      params.max_objects > static_cast<int>(kObjectNames.size())) {
    throw GenerationError("object count bounds must satisfy 1 <= min <= max <= " +
                          std::to_string(kObjectNames.size()));
  }
  const int iw = w - 2, ih = h - 2;
  if (iw < span || ih < span) {
    throw GenerationError("house " + std::to_string(w) + "x" + std::to_string(h) +
                          " leaves no room interior of span " + std::to_string(span));
  }
  if (iw < 2 * span + 1 && ih < 2 * span + 1) {
    throw GenerationError("house " + std::to_string(w) + "x" + std::to_string(h) +
                          " is too small to split into multiple rooms");
  }

  Rng rng(derive_seed(seed, "worldgen"));

  // 1. Walls-and-floor layout: sealed border, then recursive wall splits.
  std::vector<CellKind> grid(static_cast<std::size_t>(w) * h, CellKind::kFloor);
  for (int x = 0; x < w; ++x) {
    grid[x] = CellKind::kWall;
    grid[static_cast<std::size_t>(h - 1) * w + x] = CellKind::kWall;
  }
  for (int y = 0; y < h; ++y) {
    grid[static_cast<std::size_t>(y) * w] = CellKind::kWall;
    grid[static_cast<std::size_t>(y) * w + (w - 1)] = CellKind::kWall;
  }
  std::vector<Rect> rooms;
  std::vector<WallSegment> walls;
  split_rect({1, 1, iw, ih}, span, rng, grid, w, rooms, walls, false);

  // 2. One door per wall, placed where both across-the-wall neighbors are
  // floor so every door is an open passage between two rooms.
  HouseMap house;
  house.name = params.name.empty() ? "gen" + std::to_string(seed) : params.name;
  house.width = w;
  house.height = h;
  house.class_names = {"floor", "wall", "ceiling", "door"};
  house.cells.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    house.cells[i].kind = grid[i];
    house.cells[i].class_id = grid[i] == CellKind::kWall ? kClassWall : kClassFloor;
  }
  std::vector<std::pair<int, int>> door_cells;
  for (const WallSegment& seg : walls) {
    std::vector<std::pair<int, int>> candidates;
    for (int t = seg.lo; t <= seg.hi; ++t) {
      const int x = seg.vertical ? seg.coord : t;
      const int y = seg.vertical ? t : seg.coord;
      const int ax = seg.vertical ? 1 : 0, ay = seg.vertical ? 0 : 1;
      if (house.at(x - ax, y - ay).kind == CellKind::kFloor &&
          house.at(x + ax, y + ay).kind == CellKind::kFloor) {
        candidates.push_back({x, y});
      }
    }
    if (candidates.empty()) {
      throw GenerationError("wall segment has no viable door position; enlarge the house");
    }
    const auto [dx, dy] = candidates[rng.uniform_int(static_cast<int>(candidates.size()))];
    house.at(dx, dy).kind = CellKind::kDoor;
    house.at(dx, dy).class_id = kClassDoor;
    door_cells.push_back({dx, dy});
  }
  if (!all_walkable_connected(house)) {
    throw GenerationError("door placement left the house disconnected");
  }

  // 3. Landmark objects: unique names, each kept only if the walkable area
  // stays connected and every placed object still touches open floor. Every
  // generated house carries the complete object class table so semantic
  // observations from different houses share one channel layout; only the
  // placed objects appear in the grid.
  for (const char* name : kObjectNames) house.class_names.push_back(name);
  const int object_count =
      params.min_objects + rng.uniform_int(params.max_objects - params.min_objects + 1);
  std::vector<int> name_order(kObjectNames.size());
  for (std::size_t i = 0; i < name_order.size(); ++i) name_order[i] = static_cast<int>(i);
  rng.shuffle(name_order);
  std::vector<std::pair<int, int>> object_cells;
  std::vector<int> object_names;
  for (int i = 0; i < object_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
      const int x = 1 + rng.uniform_int(w - 2);
      const int y = 1 + rng.uniform_int(h - 2);
      if (house.at(x, y).kind != CellKind::kFloor) continue;
      house.at(x, y).kind = CellKind::kObject;
      house.at(x, y).class_id = kFirstObjectClass + name_order[static_cast<std::size_t>(i)];
      bool ok = all_walkable_connected(house);
      for (std::size_t j = 0; ok && j <= object_cells.size(); ++j) {
        const auto [ox, oy] = j < object_cells.size() ? object_cells[j] : std::make_pair(x, y);
        ok = has_floor_neighbor(house, ox, oy);
      }
      if (ok) {
        object_cells.push_back({x, y});
        object_names.push_back(name_order[static_cast<std::size_t>(i)]);
        placed = true;
      } else {
        house.at(x, y).kind = CellKind::kFloor;
        house.at(x, y).class_id = kClassFloor;
      }
    }
    if (!placed) {
      throw GenerationError("no viable cell left for object " + std::to_string(i + 1) + " of " +
                            std::to_string(object_count));
    }
  }

  // 4. Regions: rooms, doors, and the open floor ringing each object.
  for (std::size_t k = 0; k < rooms.size(); ++k) {
    Region r;
    r.name = "room_" + std::to_string(k + 1);
    for (int y = rooms[k].y0; y < rooms[k].y0 + rooms[k].h; ++y) {
      for (int x = rooms[k].x0; x < rooms[k].x0 + rooms[k].w; ++x) {
        if (house.at(x, y).kind == CellKind::kFloor) r.cells.push_back({x, y});
      }
    }
    if (r.cells.empty()) throw GenerationError("room " + r.name + " has no open floor left");
    house.regions.push_back(std::move(r));
  }
  for (std::size_t k = 0; k < door_cells.size(); ++k) {
    house.regions.push_back({"door_" + std::to_string(k + 1), RegionKind::kRoom,
                             {door_cells[k]}});
  }
  for (std::size_t k = 0; k < object_cells.size(); ++k) {
    Region r;
    r.name = "by_" +
             house.class_names[static_cast<std::size_t>(kFirstObjectClass + object_names[k])];
    const auto [ox, oy] = object_cells[k];
    static constexpr int kDx[] = {1, -1, 0, 0};
    static constexpr int kDy[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nx = ox + kDx[d], ny = oy + kDy[d];
      if (house.in_bounds(nx, ny) && house.at(nx, ny).kind == CellKind::kFloor) {
        r.cells.push_back({nx, ny});
      }
    }
    if (r.cells.empty()) throw GenerationError("object region " + r.name + " has no floor ring");
    house.regions.push_back(std::move(r));
  }

  // Round-trip through the canonical text form: validates every structural
  // invariant and returns the map with canonical region/cell ordering.
  return load_house(save_house(house));
}

}  // namespace follownet
