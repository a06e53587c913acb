#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace occnav {

/// Static classification of one occupancy-grid cell.
enum class StaticCell : std::uint8_t { Free, Wall, Entrance, ParkedVehicle };

/// True for cell kinds that stop line-of-sight rays and pedestrian spread.
/// Entrances are transparent to rays but act as pedestrian seeds.
bool is_blocking(StaticCell cell);

struct GridIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

/// Parse failure with the offending source location (1-based line/column).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Grid geometry shared by all per-cell map layers. Cell (0,0) is the
/// south-west corner; row indices grow northward with world y. Points on
/// shared cell edges belong to the higher-index cell (floor convention).
struct GridFrame {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  WorldPoint origin{};

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }
  bool in_bounds(GridIndex i) const {
    return i.col >= 0 && i.col < width && i.row >= 0 && i.row < height;
  }
  bool contains(WorldPoint p) const;
  GridIndex world_to_cell(WorldPoint p) const;  // throws std::out_of_range
  WorldPoint cell_to_world(GridIndex i) const;  // cell center; throws std::out_of_range
  std::size_t flat(GridIndex i) const {
    return static_cast<std::size_t>(i.row) * width + i.col;
  }
  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

/// Immutable occupancy grid of the static environment (walls, pedestrian
/// entrances, parked vehicles). Safe to share across threads by reference.
class GridMap {
 public:
  GridMap(GridFrame frame, std::vector<StaticCell> cells);

  const GridFrame& frame() const { return frame_; }
  int width() const { return frame_.width; }
  int height() const { return frame_.height; }
  double resolution() const { return frame_.resolution; }
  WorldPoint origin() const { return frame_.origin; }

  StaticCell at(GridIndex i) const { return cells_[frame_.flat(i)]; }
  StaticCell at_checked(GridIndex i) const;
  bool blocking_at(GridIndex i) const { return is_blocking(at(i)); }

  bool in_bounds(GridIndex i) const { return frame_.in_bounds(i); }
  bool contains(WorldPoint p) const { return frame_.contains(p); }
  GridIndex world_to_cell(WorldPoint p) const { return frame_.world_to_cell(p); }
  WorldPoint cell_to_world(GridIndex i) const { return frame_.cell_to_world(i); }

  const std::vector<StaticCell>& cells() const { return cells_; }

 private:
  GridFrame frame_;
  std::vector<StaticCell> cells_;
};

/// Map text format: line 1 `resolution <meters>`, line 2 `origin <x> <y>`,
/// then one line per grid row, northmost row first. Cell characters:
/// `.` free, `#` wall, `E` entrance, `V` parked vehicle.
GridMap parse_static_map(std::istream& in);
GridMap parse_static_map(const std::string& text);
GridMap load_static_map(const std::filesystem::path& path);

/// Inverse of parse_static_map; re-parsing the output yields an equal map.
std::string serialize_static_map(const GridMap& map);

}  // namespace occnav
