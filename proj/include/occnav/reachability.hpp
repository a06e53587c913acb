#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occnav/fov.hpp"
#include "occnav/grid_map.hpp"

namespace occnav {

/// A detected pedestrian. Detections carry positional uncertainty, so they
/// occupy an axis-aligned square footprint. Tracked pedestrians additionally
/// carry their observed speed.
struct PedestrianTrack {
  WorldPoint position{};
  double footprint_side = 1.0;
  std::optional<double> observed_speed;
};

enum class DrivableCell : std::uint8_t { SafeDrivable, PotentialPedestrian, StaticBlocked };

/// Per-cell dynamic classification after seeding and extrapolation.
class DrivableMap {
 public:
  explicit DrivableMap(GridFrame frame)
      : frame_(frame), cells_(frame.cell_count(), DrivableCell::SafeDrivable) {}

  const GridFrame& frame() const { return frame_; }
  DrivableCell at(GridIndex i) const { return cells_[frame_.flat(i)]; }
  void set(GridIndex i, DrivableCell c) { cells_[frame_.flat(i)] = c; }
  bool safe(GridIndex i) const { return at(i) == DrivableCell::SafeDrivable; }
  const std::vector<DrivableCell>& cells() const { return cells_; }
  friend bool operator==(const DrivableMap&, const DrivableMap&) = default;

 private:
  GridFrame frame_;
  std::vector<DrivableCell> cells_;
};

/// Extrapolation parameters requested by the controller.
struct ExtrapolationRequest {
  double horizon = 1.5;        // T [s]
  double max_ped_speed = 1.0;  // v̄_ped [m/s]
  double vehicle_speed = 0.0;  // v0 [m/s]
};

/// Speed used to extrapolate a seed. Untracked seeds are capped at
/// min(v̄_ped, v0); pedestrians tracked with an observed speed use that
/// speed even when it exceeds the cap.
double effective_speed(const ExtrapolationRequest& req,
                       const PedestrianTrack* track = nullptr);

/// Automaton generations for a seed class: ceil(speed · horizon / resolution).
int spread_generations(double speed, double horizon, double resolution);

/// Initial classification: StaticBlocked where the static map blocks,
/// PotentialPedestrian at occluded free cells, entrance cells, and cells
/// whose center falls in a track's footprint square, SafeDrivable elsewhere.
DrivableMap seed_dynamic_map(const GridMap& map, const FovMap& fov,
                             std::span<const PedestrianTrack> tracks);

/// One extrapolation seed class: cells spreading at a common speed.
struct SeedGroup {
  std::vector<GridIndex> cells;
  double speed = 0.0;
};

/// Cellular-automaton extrapolation: each group spreads for its own number
/// of generations; one generation marks all 8-neighbors that are not
/// StaticBlocked. Groups are dilated independently and unioned.
DrivableMap extrapolate(const DrivableMap& seeded, const ExtrapolationRequest& req,
                        std::span<const SeedGroup> groups);

/// Full monitor map pipeline: seed, derive per-class speeds, extrapolate.
DrivableMap build_drivable_map(const GridMap& map, const FovMap& fov,
                               std::span<const PedestrianTrack> tracks,
                               const ExtrapolationRequest& req);

/// Cells whose center lies in the half-open square around a track position.
std::vector<GridIndex> footprint_cells(const GridFrame& frame, const PedestrianTrack& track);

/// ASCII rendering: `.` safe, `P` potential pedestrian, `#` blocked.
std::string dump_drivable(const DrivableMap& dmap);

}  // namespace occnav
