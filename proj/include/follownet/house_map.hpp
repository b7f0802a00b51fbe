#pragma once

#include <string>
#include <vector>

namespace follownet {

// Reserved semantic class ids. Objects use ids >= 4; grid letters a..z map to
// 4 + (letter - 'a').
inline constexpr int kClassFloor = 0;
inline constexpr int kClassWall = 1;
inline constexpr int kClassCeiling = 2;
inline constexpr int kClassDoor = 3;
inline constexpr int kFirstObjectClass = 4;

enum class CellKind { kFloor, kWall, kDoor, kObject };

struct Cell {
  CellKind kind = CellKind::kWall;
  int class_id = kClassWall;
  int room_id = -1;  // index into regions for the covering room, -1 if none
};

enum class RegionKind { kRoom, kObject };

struct Region {
  std::string name;
  RegionKind kind = RegionKind::kRoom;
  std::vector<std::pair<int, int>> cells;  // (x, y), sorted row-major
};

enum class Heading { kPlusX = 0, kPlusY = 1, kMinusX = 2, kMinusY = 3 };

struct Pose {
  int x = 0;
  int y = 0;
  Heading heading = Heading::kPlusX;

  bool operator==(const Pose&) const = default;
};

// Immutable once loaded; cells are addressed as (x, y) with y indexing grid
// rows top to bottom in the file. Every cell edge is one meter.
struct HouseMap {
  std::string name;
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major: cells[y * width + x]
  std::vector<Region> regions;
  std::vector<std::string> class_names;  // index == class_id

  const Cell& at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
  Cell& at(int x, int y) { return cells[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  bool walkable(int x, int y) const {
    if (!in_bounds(x, y)) return false;
    const CellKind k = at(x, y).kind;
    return k == CellKind::kFloor || k == CellKind::kDoor;
  }
  // Returns nullptr when no region carries the name.
  const Region* region(const std::string& name) const;
};

// Parses the textual house format; validates all structural invariants and
// canonicalizes region order (by name) and cell order (row-major).
HouseMap load_house(const std::string& text);
HouseMap load_house_file(const std::string& path);

// Emits the canonical text form: load(save(h)) == h and save(load(f)) == f
// for canonical f.
std::string save_house(const HouseMap& house);
void save_house_file(const HouseMap& house, const std::string& path);

// 4-connected breadth-first distances over walkable cells from the given
// source cells; -1 marks unreachable cells. Indexed like HouseMap::cells.
std::vector<int> bfs_distances(const HouseMap& house,
                               const std::vector<std::pair<int, int>>& sources);

// Unit step for each heading, +x right, +y down the grid-row order.
inline int heading_dx(Heading h) {
  switch (h) {
    case Heading::kPlusX: return 1;
    case Heading::kMinusX: return -1;
    default: return 0;
  }
}
inline int heading_dy(Heading h) {
  switch (h) {
    case Heading::kPlusY: return 1;
    case Heading::kMinusY: return -1;
    default: return 0;
  }
}

}  // namespace follownet
