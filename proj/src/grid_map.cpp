#include "occnav/grid_map.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace occnav {

bool is_blocking(StaticCell cell) {
  return cell == StaticCell::Wall || cell == StaticCell::ParkedVehicle;
}

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error(std::move(message)), line_(line), column_(column) {}

bool GridFrame::contains(WorldPoint p) const {
  const double dx = p.x - origin.x;
  const double dy = p.y - origin.y;
  return dx >= 0.0 && dy >= 0.0 && dx < width * resolution && dy < height * resolution;
}

GridIndex GridFrame::world_to_cell(WorldPoint p) const {
  if (!contains(p)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") outside map extent";
    throw std::out_of_range(msg.str());
  }
  return GridIndex{static_cast<int>(std::floor((p.x - origin.x) / resolution)),
                   static_cast<int>(std::floor((p.y - origin.y) / resolution))};
}

WorldPoint GridFrame::cell_to_world(GridIndex i) const {
  if (!in_bounds(i)) {
    std::ostringstream msg;
    msg << "cell (" << i.col << ", " << i.row << ") out of bounds";
    throw std::out_of_range(msg.str());
  }
  return WorldPoint{origin.x + (i.col + 0.5) * resolution,
                    origin.y + (i.row + 0.5) * resolution};
}

GridMap::GridMap(GridFrame frame, std::vector<StaticCell> cells)
    : frame_(frame), cells_(std::move(cells)) {
  if (frame_.width <= 0 || frame_.height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (frame_.resolution <= 0.0) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  if (cells_.size() != frame_.cell_count()) {
    throw std::invalid_argument("cell count does not match grid dimensions");
  }
}

StaticCell GridMap::at_checked(GridIndex i) const {
  if (!in_bounds(i)) {
    std::ostringstream msg;
    msg << "cell (" << i.col << ", " << i.row << ") out of bounds";
    throw std::out_of_range(msg.str());
  }
  return at(i);
}

namespace {

StaticCell cell_from_char(char c, int line, int column) {
  switch (c) {
    case '.':
      return StaticCell::Free;
    case '#':
      return StaticCell::Wall;
    case 'E':
      return StaticCell::Entrance;
    case 'V':
      return StaticCell::ParkedVehicle;
    default: {
      std::ostringstream msg;
      msg << "unknown cell character '" << c << "' at line " << line << ", column " << column;
      throw ParseError(msg.str(), line, column);
    }
  }
}

char char_from_cell(StaticCell cell) {
  switch (cell) {
    case StaticCell::Free:
      return '.';
    case StaticCell::Wall:
      return '#';
    case StaticCell::Entrance:
      return 'E';
    case StaticCell::ParkedVehicle:
      return 'V';
  }
  return '?';
}

std::string read_line_trimmed(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

GridMap parse_static_map(std::istream& in) {
  std::string header = read_line_trimmed(in);
  std::istringstream res_line(header);
  std::string key;
  double resolution = 0.0;
  if (!(res_line >> key >> resolution) || key != "resolution") {
    throw ParseError("expected 'resolution <meters>' on line 1", 1, 1);
  }
  if (resolution <= 0.0) {
    throw ParseError("resolution must be positive", 1, 1);
  }

  std::string origin_text = read_line_trimmed(in);
  std::istringstream origin_line(origin_text);
  WorldPoint origin;
  if (!(origin_line >> key >> origin.x >> origin.y) || key != "origin") {
    throw ParseError("expected 'origin <x> <y>' on line 2", 2, 1);
  }

  // Northmost row comes first in the file; storage row 0 is the south edge.
  std::vector<std::string> rows;
  std::string line;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!rows.empty() && line.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << "ragged row: expected " << rows.front().size() << " cells, got " << line.size()
          << " at line " << line_no << " (grid row " << rows.size() + 1 << ")";
      throw ParseError(msg.str(), line_no, static_cast<int>(line.size()) + 1);
    }
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw ParseError("map has no grid rows", 3, 1);
  }

  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  std::vector<StaticCell> cells(static_cast<std::size_t>(width) * height);
  for (int file_row = 0; file_row < height; ++file_row) {
    const int row = height - 1 - file_row;
    for (int col = 0; col < width; ++col) {
      cells[static_cast<std::size_t>(row) * width + col] =
          cell_from_char(rows[file_row][col], file_row + 3, col + 1);
    }
  }
  return GridMap(GridFrame{width, height, resolution, origin}, std::move(cells));
}

GridMap parse_static_map(const std::string& text) {
  std::istringstream in(text);
  return parse_static_map(in);
}

GridMap load_static_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open map file: " + path.string());
  }
  return parse_static_map(in);
}

std::string serialize_static_map(const GridMap& map) {
  std::ostringstream out;
  out << "resolution " << map.resolution() << "\n";
  out << "origin " << map.origin().x << " " << map.origin().y << "\n";
  for (int row = map.height() - 1; row >= 0; --row) {
    for (int col = 0; col < map.width(); ++col) {
      out << char_from_cell(map.at(GridIndex{col, row}));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace occnav
