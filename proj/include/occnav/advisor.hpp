#pragma once

#include <utility>
#include <vector>

#include "occnav/reachability.hpp"
#include "occnav/vehicle.hpp"

namespace occnav {

/// One probed free-space boundary: the heading is in the vehicle frame of
/// the probing pose, the point and distance are in world units.
struct BoundaryEntry {
  double heading = 0.0;
  WorldPoint point{};
  double distance = 0.0;
};

struct BoundarySet {
  std::vector<BoundaryEntry> entries;
};

struct AdvisorRequest {
  std::vector<double> directions;  // headings in the vehicle frame [rad]
  double buffer = 0.0;             // clearance kept to non-safe cells [m]
};

/// Cast a ray from the CoG cell along world heading psi+heading until the
/// first cell that is not SafeDrivable (or the map edge). The distance is
/// measured to the near edge of the obstructing cell, reduced by the buffer
/// and floored at zero; the boundary point lies at that distance along the
/// ray. A pose whose own cell is not SafeDrivable yields distance zero.
std::pair<WorldPoint, double> probe_direction(const DrivableMap& dmap,
                                              const VehicleState& pose, double heading,
                                              double buffer);

/// One boundary entry per requested direction, in request order.
BoundarySet advise(const DrivableMap& dmap, const VehicleState& pose,
                   const AdvisorRequest& req);

/// The default probe set: front, rear, left, right, plus one forward probe
/// along the reference-path heading for the front constraint.
AdvisorRequest default_advisor_request(const VehicleState& pose, double reference_heading,
                                       double buffer);

}  // namespace occnav
