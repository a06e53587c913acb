#include "occnav/advisor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace occnav {

namespace {

// Parametric distance along `dir` from `p` to the map extent boundary.
double distance_to_extent(const GridFrame& frame, WorldPoint p, double cx, double cy) {
  double tmax = std::numeric_limits<double>::infinity();
  const double x_lo = frame.origin.x;
  const double x_hi = frame.origin.x + frame.width * frame.resolution;
  const double y_lo = frame.origin.y;
  const double y_hi = frame.origin.y + frame.height * frame.resolution;
  if (cx > 1e-12) {
    tmax = std::min(tmax, (x_hi - p.x) / cx);
  } else if (cx < -1e-12) {
    tmax = std::min(tmax, (x_lo - p.x) / cx);
  }
  if (cy > 1e-12) {
    tmax = std::min(tmax, (y_hi - p.y) / cy);
  } else if (cy < -1e-12) {
    tmax = std::min(tmax, (y_lo - p.y) / cy);
  }
  return tmax;
}

}  // namespace

std::pair<WorldPoint, double> probe_direction(const DrivableMap& dmap,
                                              const VehicleState& pose, double heading,
                                              double buffer) {
  const GridFrame& frame = dmap.frame();
  const WorldPoint cog{pose.x, pose.y};
  if (!frame.contains(cog) || !dmap.safe(frame.world_to_cell(cog))) {
    return {cog, 0.0};
  }

  const double theta = pose.psi + heading;
  const double cx = std::cos(theta);
  const double cy = std::sin(theta);
  const double tmax = distance_to_extent(frame, cog, cx, cy);

  // Ray target: the last in-extent cell along the heading.
  const double inset = std::min(tmax, frame.resolution * 1e-6);
  const WorldPoint edge{cog.x + cx * (tmax - inset), cog.y + cy * (tmax - inset)};
  const GridIndex start = frame.world_to_cell(cog);
  const GridIndex target = frame.world_to_cell(edge);

  double raw = tmax;
  for_each_line_cell(start, target, [&](GridIndex i) {
    if (dmap.safe(i)) return true;
    const WorldPoint center = frame.cell_to_world(i);
    const double to_center = std::hypot(center.x - cog.x, center.y - cog.y);
    raw = std::max(0.0, to_center - frame.resolution / 2.0);
    return false;
  });

  const double distance = std::max(0.0, raw - buffer);
  return {WorldPoint{cog.x + cx * distance, cog.y + cy * distance}, distance};
}

BoundarySet advise(const DrivableMap& dmap, const VehicleState& pose,
                   const AdvisorRequest& req) {
  if (req.directions.empty()) {
    throw std::invalid_argument("advisor request needs at least one direction");
  }
  if (req.buffer < 0.0) {
    throw std::invalid_argument("advisor buffer must be non-negative");
  }
  BoundarySet out;
  out.entries.reserve(req.directions.size());
  for (double heading : req.directions) {
    auto [point, distance] = probe_direction(dmap, pose, heading, req.buffer);
    out.entries.push_back(BoundaryEntry{heading, point, distance});
  }
  return out;
}

AdvisorRequest default_advisor_request(const VehicleState& pose, double reference_heading,
                                       double buffer) {
  AdvisorRequest req;
  req.directions = {0.0, M_PI, M_PI / 2.0, -M_PI / 2.0, reference_heading - pose.psi};
  req.buffer = buffer;
  return req;
}

}  // namespace occnav
