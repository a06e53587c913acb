#pragma once

#include <optional>
#include <vector>

#include "occnav/reachability.hpp"
#include "occnav/trajectory.hpp"
#include "occnav/vehicle.hpp"

namespace occnav {

/// Collision-check footprint: either the CoG point alone (the experimental
/// default) or the full oriented vehicle rectangle.
enum class CheckMode { CogPoint, Footprint };

struct Verdict {
  bool accepted = false;
  int offending_stage = -1;  // first conflicting stage when rejected

  static Verdict accept() { return Verdict{true, -1}; }
  static Verdict reject(int stage) { return Verdict{false, stage}; }
};

/// Cells overlapped by the oriented vehicle rectangle (spanning lr behind to
/// lf ahead of the CoG, full width) with positive area. Cells falling
/// outside the map are reported through `out_of_map`.
std::vector<GridIndex> footprint_overlap_cells(const GridFrame& frame,
                                               const VehicleState& state,
                                               const VehicleParams& params,
                                               bool* out_of_map = nullptr);

/// Superimpose the trajectory on the extrapolated map: rejected at the first
/// stage whose checked cells are not SafeDrivable or leave the map.
Verdict check_trajectory(const Trajectory& trajectory, const DrivableMap& dmap,
                         CheckMode mode, const VehicleParams& params);

/// Holds the latest accepted trajectory and walks it stage by stage while
/// candidates are rejected; past the final stage the command is a held full
/// stop. The store is never empty: mission start seeds it with the initial
/// braking plan.
class FallbackStore {
 public:
  explicit FallbackStore(Trajectory initial);

  /// Accepted candidates replace the store and actuate their first-stage
  /// inputs; otherwise the stored plan's next stage is actuated.
  ControlInput next_command(const Verdict& verdict, const std::optional<Trajectory>& candidate);

  const Trajectory& active() const { return stored_; }
  int consumption_index() const { return index_; }

 private:
  Trajectory stored_;
  int index_ = 1;
};

}  // namespace occnav
