#include "follownet/house_map.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "follownet/errors.hpp"

namespace follownet {

const Region* HouseMap::region(const std::string& name) const {
  for (const Region& r : regions) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) fail(line_no, std::string("malformed ") + what + " '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(line_no, std::string("malformed ") + what + " '" + s + "'");
  }
}

std::pair<int, int> parse_cell_ref(const std::string& s, int line_no) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 >= s.size()) {
    fail(line_no, "malformed cell reference '" + s + "' (want x,y)");
  }
  return {parse_int(s.substr(0, comma), line_no, "x coordinate"),
          parse_int(s.substr(comma + 1), line_no, "y coordinate")};
}

void validate_region_cells(const HouseMap& h, const Region& r, int line_no) {
  std::set<std::pair<int, int>> seen;
  for (const auto& [x, y] : r.cells) {
    if (!h.in_bounds(x, y)) {
      fail(line_no, "region '" + r.name + "' cell " + std::to_string(x) + "," +
                        std::to_string(y) + " out of bounds");
    }
    if (!seen.insert({x, y}).second) {
      fail(line_no, "region '" + r.name + "' repeats cell " + std::to_string(x) + "," +
                        std::to_string(y));
    }
    const CellKind k = h.at(x, y).kind;
    if (r.kind == RegionKind::kObject && k != CellKind::kObject) {
      fail(line_no, "object region '" + r.name + "' covers a non-object cell at " +
                        std::to_string(x) + "," + std::to_string(y));
    }
    if (r.kind == RegionKind::kRoom && k != CellKind::kFloor && k != CellKind::kDoor) {
      fail(line_no, "room region '" + r.name + "' covers a non-walkable cell at " +
                        std::to_string(x) + "," + std::to_string(y));
    }
  }
}

}  // namespace

HouseMap load_house(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  std::size_t li = 0;
  auto next_nonblank = [&]() -> int {
    while (li < lines.size() && lines[li].empty()) ++li;
    return li < lines.size() ? static_cast<int>(li) : -1;
  };

  HouseMap h;
  // Header
  if (next_nonblank() < 0) throw ParseError("line 1: missing 'house' header");
  {
    const int ln = static_cast<int>(li) + 1;
    auto toks = split_ws(lines[li++]);
    if (toks.size() != 4 || toks[0] != "house") {
      fail(ln, "expected 'house <name> <width> <height>'");
    }
    h.name = toks[1];
    h.width = parse_int(toks[2], ln, "width");
    h.height = parse_int(toks[3], ln, "height");
    if (h.width < 3 || h.height < 3) fail(ln, "house must be at least 3x3 cells");
  }

  // Class table
  while (next_nonblank() >= 0 && split_ws(lines[li])[0] == "class") {
    const int ln = static_cast<int>(li) + 1;
    auto toks = split_ws(lines[li++]);
    if (toks.size() != 3) fail(ln, "expected 'class <id> <name>'");
    const int id = parse_int(toks[1], ln, "class id");
    if (id != static_cast<int>(h.class_names.size())) {
      fail(ln, "class ids must be consecutive from 0, got " + std::to_string(id));
    }
    h.class_names.push_back(toks[2]);
  }
  {
    static const char* kReserved[] = {"floor", "wall", "ceiling", "door"};
    if (h.class_names.size() < 4) {
      throw ParseError("line " + std::to_string(li + 1) +
                       ": class table must define ids 0..3 (floor, wall, ceiling, door)");
    }
    for (int i = 0; i < 4; ++i) {
      if (h.class_names[static_cast<std::size_t>(i)] != kReserved[i]) {
        throw ParseError("line " + std::to_string(li + 1) + ": reserved class " +
                         std::to_string(i) + " must be named '" + kReserved[i] + "'");
      }
    }
  }

  // Grid rows
  const int grid_first_line = static_cast<int>(li) + 1;
  h.cells.assign(static_cast<std::size_t>(h.width) * h.height, Cell{});
  for (int y = 0; y < h.height; ++y) {
    if (li >= lines.size()) {
      throw ParseError("line " + std::to_string(li + 1) + ": missing grid row " +
                       std::to_string(y));
    }
    const int ln = static_cast<int>(li) + 1;
    const std::string& row = lines[li++];
    if (static_cast<int>(row.size()) != h.width) {
      fail(ln, "grid row has " + std::to_string(row.size()) + " cells, expected " +
                   std::to_string(h.width));
    }
    for (int x = 0; x < h.width; ++x) {
      Cell& c = h.at(x, y);
      const char ch = row[static_cast<std::size_t>(x)];
      if (ch == '#') {
        c = {CellKind::kWall, kClassWall, -1};
      } else if (ch == '.') {
        c = {CellKind::kFloor, kClassFloor, -1};
      } else if (ch == 'D') {
        c = {CellKind::kDoor, kClassDoor, -1};
      } else if (ch >= 'a' && ch <= 'z') {
        const int id = kFirstObjectClass + (ch - 'a');
        if (id >= static_cast<int>(h.class_names.size())) {
          fail(ln, std::string("cell code '") + ch + "' has no class table entry");
        }
        c = {CellKind::kObject, id, -1};
      } else {
        fail(ln, std::string("unknown cell code '") + ch + "'");
      }
    }
  }

  // Border must be sealed.
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      const bool border = x == 0 || y == 0 || x == h.width - 1 || y == h.height - 1;
      if (border && h.at(x, y).kind != CellKind::kWall) {
        fail(grid_first_line + y, "border cell " + std::to_string(x) + "," + std::to_string(y) +
                                      " is not a wall");
      }
    }
  }

  // Regions
  std::set<std::string> names;
  while (next_nonblank() >= 0) {
    const int ln = static_cast<int>(li) + 1;
    auto toks = split_ws(lines[li++]);
    if (toks[0] != "region") fail(ln, "expected a 'region' line, got '" + toks[0] + "'");
    if (toks.size() != 4) fail(ln, "expected 'region <name> room|object <x,y>;...'");
    Region r;
    r.name = toks[1];
    if (!names.insert(r.name).second) fail(ln, "duplicate region name '" + r.name + "'");
    if (toks[2] == "room") {
      r.kind = RegionKind::kRoom;
    } else if (toks[2] == "object") {
      r.kind = RegionKind::kObject;
    } else {
      fail(ln, "region kind must be 'room' or 'object', got '" + toks[2] + "'");
    }
    std::istringstream cellstream(toks[3]);
    std::string ref;
    while (std::getline(cellstream, ref, ';')) {
      if (!ref.empty()) r.cells.push_back(parse_cell_ref(ref, ln));
    }
    if (r.cells.empty()) fail(ln, "region '" + r.name + "' has no cells");
    std::sort(r.cells.begin(), r.cells.end(), [&](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    validate_region_cells(h, r, ln);
    h.regions.push_back(std::move(r));
  }
  std::sort(h.regions.begin(), h.regions.end(),
            [](const Region& a, const Region& b) { return a.name < b.name; });

  for (std::size_t i = 0; i < h.regions.size(); ++i) {
    if (h.regions[i].kind != RegionKind::kRoom) continue;
    for (const auto& [x, y] : h.regions[i].cells) {
      h.at(x, y).room_id = static_cast<int>(i);
    }
  }
  return h;
}

HouseMap load_house_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open house file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_house(buf.str());
}

std::string save_house(const HouseMap& house) {
  std::ostringstream out;
  out << "house " << house.name << " " << house.width << " " << house.height << "\n";
  for (std::size_t i = 0; i < house.class_names.size(); ++i) {
    out << "class " << i << " " << house.class_names[i] << "\n";
  }
  for (int y = 0; y < house.height; ++y) {
    for (int x = 0; x < house.width; ++x) {
      const Cell& c = house.at(x, y);
      switch (c.kind) {
        case CellKind::kWall: out << '#'; break;
        case CellKind::kFloor: out << '.'; break;
        case CellKind::kDoor: out << 'D'; break;
        case CellKind::kObject:
          out << static_cast<char>('a' + (c.class_id - kFirstObjectClass));
          break;
      }
    }
    out << "\n";
  }
  std::vector<const Region*> order;
  order.reserve(house.regions.size());
  for (const Region& r : house.regions) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const Region* a, const Region* b) { return a->name < b->name; });
  for (const Region* r : order) {
    out << "region " << r->name << " " << (r->kind == RegionKind::kRoom ? "room" : "object")
        << " ";
    auto cells = r->cells;
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ";";
      out << cells[i].first << "," << cells[i].second;
    }
    out << "\n";
  }
  return out.str();
}

std::vector<int> bfs_distances(const HouseMap& house,
                               const std::vector<std::pair<int, int>>& sources) {
  std::vector<int> dist(house.cells.size(), -1);
  std::vector<std::pair<int, int>> frontier;
  for (const auto& [x, y] : sources) {
    if (!house.walkable(x, y)) continue;
    const std::size_t i = static_cast<std::size_t>(y) * house.width + x;
    if (dist[i] == -1) {
      dist[i] = 0;
      frontier.push_back({x, y});
    }
  }
  int d = 0;
  while (!frontier.empty()) {
    ++d;
    std::vector<std::pair<int, int>> next;
    for (const auto& [x, y] : frontier) {
      static constexpr int kDx[] = {1, -1, 0, 0};
      static constexpr int kDy[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k], ny = y + kDy[k];
        if (!house.walkable(nx, ny)) continue;
        const std::size_t i = static_cast<std::size_t>(ny) * house.width + nx;
        if (dist[i] == -1) {
          dist[i] = d;
          next.push_back({nx, ny});
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

void save_house_file(const HouseMap& house, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write house file '" + path + "'");
  out << save_house(house);
  if (!out) throw IoError("failed writing house file '" + path + "'");
}

}  // namespace follownet
