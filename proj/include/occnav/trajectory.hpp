#pragma once

#include <vector>

#include "occnav/vehicle.hpp"

namespace occnav {

struct TrajectoryStage {
  VehicleState state{};
  ControlInput input{};
};

/// Planned motion over one horizon: N+1 stages with the terminal stage at
/// rest under zero inputs.
struct Trajectory {
  std::vector<TrajectoryStage> stages;

  int horizon() const { return static_cast<int>(stages.size()) - 1; }
  bool empty() const { return stages.empty(); }
};

}  // namespace occnav
