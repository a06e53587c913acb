#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "occnav/grid_map.hpp"
#include "occnav/vehicle.hpp"

namespace occnav {

/// Virtual sensor mount relative to the CoG, in the vehicle frame.
/// Lateral offsets are positive to the left.
struct SensorMount {
  double longitudinal = 0.0;
  double lateral = 0.0;
};

/// Per-cell line-of-sight classification, same geometry as the source map.
class FovMap {
 public:
  explicit FovMap(GridFrame frame)
      : frame_(frame), visible_(frame.cell_count(), 0) {}

  const GridFrame& frame() const { return frame_; }
  bool visible(GridIndex i) const { return visible_[frame_.flat(i)] != 0; }
  void mark_visible(GridIndex i) { visible_[frame_.flat(i)] = 1; }
  friend bool operator==(const FovMap&, const FovMap&) = default;

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> visible_;
};

/// World positions of the four virtual sensors (front center, rear center,
/// left b-pillar, right b-pillar) for the given pose.
std::array<WorldPoint, 4> sensor_positions(const VehicleState& state,
                                           const VehicleParams& params);

/// Enumerate the cells of the grid-exact line from `a` to `b`, in travel
/// order. The rasterization is symmetric: both travel directions visit the
/// same cell set. Midpoint ties round toward the positive non-driving axis.
/// The visitor returns false to stop early.
void for_each_line_cell(GridIndex a, GridIndex b,
                        const std::function<bool(GridIndex)>& visit);

/// Line cells from `from` toward `to`, truncated at (and including) the
/// first blocking cell. Always contains `from`.
std::vector<GridIndex> trace_ray(const GridMap& map, GridIndex from, GridIndex to);

/// Ray-cast visibility from the four sensors. Targets are every grid
/// perimeter cell plus the CoG and the other sensors' cells, so the result
/// is a deterministic union of truncated rays. Sensors outside the map
/// extent raise std::out_of_range.
FovMap compute_fov(const GridMap& map, const VehicleState& state,
                   const VehicleParams& params);

/// ASCII rendering for golden tests: `*` visible, `o` occluded.
std::string dump_fov(const FovMap& fov);

}  // namespace occnav
