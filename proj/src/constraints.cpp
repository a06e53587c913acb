#include "occnav/constraints.hpp"

#include <cmath>
#include <stdexcept>

namespace occnav {

namespace {

const BoundaryEntry* find_probe(const BoundarySet& boundaries, double heading) {
  for (const auto& entry : boundaries.entries) {
    if (std::abs(entry.heading - heading) < 1e-6) return &entry;
  }
  return nullptr;
}

}  // namespace

std::pair<HalfSpace, HalfSpace> lateral_halfspaces(double stage_heading,
                                                   WorldPoint stage_position,
                                                   const BoundarySet& boundaries,
                                                   double margin) {
  const BoundaryEntry* left_probe = find_probe(boundaries, M_PI / 2.0);
  const BoundaryEntry* right_probe = find_probe(boundaries, -M_PI / 2.0);
  if (left_probe == nullptr || right_probe == nullptr) {
    throw std::invalid_argument("boundary set is missing a lateral probe");
  }

  const Eigen::Vector2d left_normal(-std::sin(stage_heading), std::cos(stage_heading));
  const Eigen::Vector2d position(stage_position.x, stage_position.y);

  HalfSpace left;
  left.normal = left_normal;
  left.offset = left_normal.dot(position) + std::max(0.0, left_probe->distance - margin);

  HalfSpace right;
  right.normal = -left_normal;
  right.offset = right.normal.dot(position) + std::max(0.0, right_probe->distance - margin);

  return {left, right};
}

HalfSpace front_halfspace(double reference_heading, WorldPoint boundary_point) {
  HalfSpace front;
  front.normal = Eigen::Vector2d(std::cos(reference_heading), std::sin(reference_heading));
  front.offset = front.normal.dot(Eigen::Vector2d(boundary_point.x, boundary_point.y));
  return front;
}

bool check_box(const TrajectoryStage& stage, const TrajectoryStage& next,
               const BoxLimits& limits) {
  return std::abs(next.state.psi - stage.state.psi) <= limits.dpsi_max &&
         stage.state.v >= limits.v_min && stage.state.v <= limits.v_max &&
         stage.input.delta >= limits.delta_min && stage.input.delta <= limits.delta_max &&
         stage.input.accel >= limits.a_min && stage.input.accel <= limits.a_max;
}

bool check_trajectory_boxes(const Trajectory& trajectory, const BoxLimits& limits) {
  for (std::size_t t = 0; t + 1 < trajectory.stages.size(); ++t) {
    if (!check_box(trajectory.stages[t], trajectory.stages[t + 1], limits)) return false;
  }
  if (!trajectory.stages.empty()) {
    const double v = trajectory.stages.back().state.v;
    if (v < limits.v_min || v > limits.v_max) return false;
  }
  return true;
}

std::vector<StageConstraints> build_corridor(const DrivableMap& dmap,
                                             const VehicleState& pose,
                                             const Trajectory& previous,
                                             double front_reference_heading,
                                             const CorridorConfig& config) {
  if (previous.horizon() < 1) {
    throw std::invalid_argument("corridor needs a previous trajectory with N >= 1");
  }

  const auto [front_point, front_distance] =
      probe_direction(dmap, pose, front_reference_heading - pose.psi, config.buffer);
  (void)front_distance;
  const HalfSpace front = front_halfspace(front_reference_heading, front_point);

  std::vector<StageConstraints> corridor;
  corridor.reserve(previous.horizon());
  for (int t = 1; t <= previous.horizon(); ++t) {
    const VehicleState& stage = previous.stages[t].state;
    BoundarySet probes;
    for (double heading : {M_PI / 2.0, -M_PI / 2.0}) {
      auto [point, distance] = probe_direction(dmap, stage, heading, config.buffer);
      probes.entries.push_back(BoundaryEntry{heading, point, distance});
    }
    auto [left, right] = lateral_halfspaces(stage.psi, WorldPoint{stage.x, stage.y}, probes,
                                            config.margin);
    corridor.push_back(StageConstraints{left, right, front});
  }
  return corridor;
}

}  // namespace occnav
