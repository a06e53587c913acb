#include "occnav/reference.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace occnav {

PathValidationError::PathValidationError(std::string message, std::size_t index)
    : std::runtime_error(std::move(message)), index_(index) {}

ReferencePath::ReferencePath(std::vector<Waypoint> waypoints, double spacing)
    : waypoints_(std::move(waypoints)), spacing_(spacing) {}

ReferencePath ReferencePath::validate(std::vector<Waypoint> waypoints) {
  if (waypoints.size() < 2) {
    throw PathValidationError("path needs at least two waypoints", waypoints.size());
  }
  const auto gap = [&](std::size_t i) {
    return std::hypot(waypoints[i + 1].x - waypoints[i].x, waypoints[i + 1].y - waypoints[i].y);
  };
  const double spacing = gap(0);
  if (spacing <= 0.0) {
    throw PathValidationError("waypoints 0 and 1 coincide", 1);
  }
  for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
    if (std::abs(gap(i) - spacing) > 1e-6 * spacing) {
      std::ostringstream msg;
      msg << "non-constant waypoint spacing at index " << i + 1 << ": expected " << spacing
          << ", got " << gap(i);
      throw PathValidationError(msg.str(), i + 1);
    }
  }
  return ReferencePath(std::move(waypoints), spacing);
}

double reference_speed(double curvature, double max_lat_accel, double v_max) {
  if (max_lat_accel <= 0.0) {
    throw std::invalid_argument("max lateral acceleration must be positive");
  }
  if (curvature == 0.0) return v_max;
  return std::min(v_max, std::sqrt(max_lat_accel / std::abs(curvature)));
}

std::size_t nearest_index(const ReferencePath& path, const VehicleState& state) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Waypoint& wp = path.waypoints()[i];
    const double d = std::hypot(wp.x - state.x, wp.y - state.y);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

namespace {

// The final waypoint's reference speed is forced to zero: the mission ends
// in a stop and the index recurrence pins there.
double waypoint_speed(const ReferencePath& path, std::size_t index, double max_lat_accel,
                      double v_max) {
  if (index + 1 >= path.size()) return 0.0;
  return reference_speed(path.waypoints()[index].curvature, max_lat_accel, v_max);
}

}  // namespace

std::size_t advance_index(const ReferencePath& path, std::size_t index, double ts,
                          double max_lat_accel, double v_max) {
  const double vp = waypoint_speed(path, index, max_lat_accel, v_max);
  const auto step = static_cast<std::size_t>(std::floor(vp * ts / path.spacing()));
  return std::min(index + step, path.size() - 1);
}

std::vector<ReferenceState> horizon_reference(const ReferencePath& path, std::size_t start,
                                              double ts, int horizon, double max_lat_accel,
                                              double v_max) {
  if (start >= path.size()) {
    throw std::out_of_range("reference start index out of range");
  }
  std::vector<ReferenceState> refs;
  refs.reserve(horizon + 1);
  std::size_t index = start;
  for (int k = 0; k <= horizon; ++k) {
    const Waypoint& wp = path.waypoints()[index];
    refs.push_back(ReferenceState{wp.x, wp.y, wp.heading,
                                  waypoint_speed(path, index, max_lat_accel, v_max)});
    index = advance_index(path, index, ts, max_lat_accel, v_max);
  }
  return refs;
}

std::vector<Waypoint> parse_waypoints(const std::string& text) {
  std::istringstream in(text);
  std::vector<Waypoint> waypoints;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Waypoint wp;
    if (!(fields >> wp.x >> wp.y >> wp.heading >> wp.curvature)) {
      std::ostringstream msg;
      msg << "malformed waypoint at line " << line_no << ": '" << line << "'";
      throw std::runtime_error(msg.str());
    }
    waypoints.push_back(wp);
  }
  return waypoints;
}

std::vector<Waypoint> load_waypoints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open waypoint file: " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_waypoints(text.str());
}

std::string serialize_waypoints(const std::vector<Waypoint>& waypoints) {
  std::ostringstream out;
  out.precision(17);
  for (const Waypoint& wp : waypoints) {
    out << wp.x << " " << wp.y << " " << wp.heading << " " << wp.curvature << "\n";
  }
  return out.str();
}

}  // namespace occnav
