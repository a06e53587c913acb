#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "occnav/advisor.hpp"
#include "occnav/reachability.hpp"
#include "occnav/trajectory.hpp"

namespace occnav {

/// Points p with normal·p ≤ offset. The normal has unit length.
struct HalfSpace {
  Eigen::Vector2d normal{1.0, 0.0};
  double offset = 0.0;

  /// normal·p − offset; non-positive inside the half-space.
  double evaluate(WorldPoint p) const { return normal.x() * p.x + normal.y() * p.y - offset; }
};

/// Convex position bounds for one trajectory stage.
struct StageConstraints {
  HalfSpace left;
  HalfSpace right;
  std::optional<HalfSpace> front;
};

/// Global box limits on heading rate, velocity, steering and acceleration.
struct BoxLimits {
  double dpsi_max = M_PI / 4.0;  // per step
  double v_min = 0.0;
  double v_max = 5.56;
  double delta_min = -M_PI / 4.0;
  double delta_max = M_PI / 4.0;
  double a_min = -7.0;
  double a_max = 3.0;
};

/// Left/right half-spaces aligned with the stage heading. The boundary set
/// must contain probes at +pi/2 (left) and -pi/2 (right) taken from the
/// stage position; their free distances, reduced by the margin, place the
/// two bounding planes. A non-positive usable distance collapses the plane
/// onto the stage position itself.
std::pair<HalfSpace, HalfSpace> lateral_halfspaces(double stage_heading,
                                                   WorldPoint stage_position,
                                                   const BoundarySet& boundaries,
                                                   double margin);

/// Single forward bound: the plane through the boundary point whose normal
/// points along the reference heading.
HalfSpace front_halfspace(double reference_heading, WorldPoint boundary_point);

/// Box-limit check for one consecutive stage pair: heading rate between the
/// stages plus the first stage's velocity and inputs, all with closed bounds.
bool check_box(const TrajectoryStage& stage, const TrajectoryStage& next,
               const BoxLimits& limits);

/// check_box over every consecutive pair plus the terminal velocity bound.
bool check_trajectory_boxes(const Trajectory& trajectory, const BoxLimits& limits);

struct CorridorConfig {
  double buffer = 0.0;  // advisor clearance to non-safe cells [m]
  double margin = 0.0;  // extra lateral margin, e.g. vehicle half-width [m]
};

/// Per-stage convex corridor for stages 1..N, built by probing the drivable
/// map laterally from each stage of the previous trajectory and forward from
/// the current pose along the reference heading. Entry k constrains stage
/// k+1.
std::vector<StageConstraints> build_corridor(const DrivableMap& dmap,
                                             const VehicleState& pose,
                                             const Trajectory& previous,
                                             double front_reference_heading,
                                             const CorridorConfig& config);

}  // namespace occnav
