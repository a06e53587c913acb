#include "occnav/fov.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace occnav {

std::array<WorldPoint, 4> sensor_positions(const VehicleState& state,
                                           const VehicleParams& params) {
  const std::array<SensorMount, 4> mounts = {
      SensorMount{params.lf, 0.0},            // front center
      SensorMount{-params.lr, 0.0},           // rear center
      SensorMount{0.0, params.width / 2.0},   // left b-pillar
      SensorMount{0.0, -params.width / 2.0},  // right b-pillar
  };
  const double c = std::cos(state.psi);
  const double s = std::sin(state.psi);
  std::array<WorldPoint, 4> out;
  for (std::size_t i = 0; i < mounts.size(); ++i) {
    out[i] = WorldPoint{state.x + c * mounts[i].longitudinal - s * mounts[i].lateral,
                        state.y + s * mounts[i].longitudinal + c * mounts[i].lateral};
  }
  return out;
}

void for_each_line_cell(GridIndex a, GridIndex b,
                        const std::function<bool(GridIndex)>& visit) {
  const int dx = b.col - a.col;
  const int dy = b.row - a.row;
  const int adx = std::abs(dx);
  const int ady = std::abs(dy);

  if (adx >= ady) {
    if (adx == 0) {
      visit(a);
      return;
    }
    // Drive on columns; the row error term is the numerator of
    // (2·dy·k + adx) / (2·adx), whose floor is the offset of the row
    // nearest to the ideal line with .5 ties rounded toward +row. The
    // numerator is shifted into [0, 2·adx) so the floor stays zero.
    const int sx = dx > 0 ? 1 : -1;
    const int span = 2 * adx;
    int rem = adx;
    int row = a.row;
    for (int k = 0; k <= adx; ++k) {
      if (!visit(GridIndex{a.col + sx * k, row})) return;
      rem += 2 * dy;
      if (rem >= span) {
        rem -= span;
        ++row;
      } else if (rem < 0) {
        rem += span;
        --row;
      }
    }
  } else {
    const int sy = dy > 0 ? 1 : -1;
    const int span = 2 * ady;
    int rem = ady;
    int col = a.col;
    for (int k = 0; k <= ady; ++k) {
      if (!visit(GridIndex{col, a.row + sy * k})) return;
      rem += 2 * dx;
      if (rem >= span) {
        rem -= span;
        ++col;
      } else if (rem < 0) {
        rem += span;
        --col;
      }
    }
  }
}

std::vector<GridIndex> trace_ray(const GridMap& map, GridIndex from, GridIndex to) {
  if (!map.in_bounds(from) || !map.in_bounds(to)) {
    throw std::out_of_range("ray endpoints must be in bounds");
  }
  std::vector<GridIndex> cells;
  for_each_line_cell(from, to, [&](GridIndex i) {
    cells.push_back(i);
    return !map.blocking_at(i);
  });
  return cells;
}

FovMap compute_fov(const GridMap& map, const VehicleState& state,
                   const VehicleParams& params) {
  const auto sensors = sensor_positions(state, params);
  std::array<GridIndex, 4> sensor_cells;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (!map.contains(sensors[i])) {
      std::ostringstream msg;
      msg << "sensor " << i << " outside map extent";
      throw std::out_of_range(msg.str());
    }
    sensor_cells[i] = map.world_to_cell(sensors[i]);
  }

  const int w = map.width();
  const int h = map.height();
  std::vector<GridIndex> targets;
  targets.reserve(2 * (w + h) + 5);
  for (int col = 0; col < w; ++col) {
    targets.push_back(GridIndex{col, 0});
    if (h > 1) targets.push_back(GridIndex{col, h - 1});
  }
  for (int row = 1; row + 1 < h; ++row) {
    targets.push_back(GridIndex{0, row});
    if (w > 1) targets.push_back(GridIndex{w - 1, row});
  }
  // The vehicle interior is covered explicitly so the pose cell itself is
  // reached by a genuine, replayable ray.
  if (map.contains(WorldPoint{state.x, state.y})) {
    targets.push_back(map.world_to_cell(WorldPoint{state.x, state.y}));
  }
  for (const auto& cell : sensor_cells) targets.push_back(cell);

  FovMap fov(map.frame());
  for (const auto& sensor : sensor_cells) {
    for (const auto& target : targets) {
      for_each_line_cell(sensor, target, [&](GridIndex i) {
        fov.mark_visible(i);
        return !map.blocking_at(i);
      });
    }
  }
  return fov;
}

std::string dump_fov(const FovMap& fov) {
  std::string out;
  const auto& frame = fov.frame();
  out.reserve((frame.width + 1) * frame.height);
  for (int row = frame.height - 1; row >= 0; --row) {
    for (int col = 0; col < frame.width; ++col) {
      out.push_back(fov.visible(GridIndex{col, row}) ? '*' : 'o');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace occnav
