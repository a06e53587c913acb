#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "occnav/vehicle.hpp"

namespace occnav {

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;    // [rad]
  double curvature = 0.0;  // [1/m], 0 on straights
};

class PathValidationError : public std::runtime_error {
 public:
  PathValidationError(std::string message, std::size_t index);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Waypoint path with constant consecutive spacing. Immutable once built.
class ReferencePath {
 public:
  /// Accepts iff n >= 2 and every consecutive gap equals the first within
  /// a 1e-6 relative tolerance; throws PathValidationError naming the first
  /// offending waypoint otherwise.
  static ReferencePath validate(std::vector<Waypoint> waypoints);

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  std::size_t size() const { return waypoints_.size(); }
  double spacing() const { return spacing_; }

 private:
  ReferencePath(std::vector<Waypoint> waypoints, double spacing);
  std::vector<Waypoint> waypoints_;
  double spacing_;
};

/// Tracking target for one horizon stage.
struct ReferenceState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

/// Curvature-limited reference speed min(v_max, sqrt(a_lat/|curvature|));
/// straight segments run at v_max.
double reference_speed(double curvature, double max_lat_accel, double v_max);

/// Index of the waypoint closest to the vehicle position; ties break toward
/// the lowest index.
std::size_t nearest_index(const ReferencePath& path, const VehicleState& state);

/// One reference-index update: i + floor(v_p(i)·ts / spacing), clamped to
/// the final waypoint. The final waypoint's reference speed is zero, so the
/// index pins there. Note the floor stalls when v_p·ts < spacing; paths must
/// be sampled with spacing <= v_p·ts wherever progress is expected.
std::size_t advance_index(const ReferencePath& path, std::size_t index, double ts,
                          double max_lat_accel, double v_max);

/// N+1 per-stage references obtained by applying the index update across the
/// prediction horizon starting from `start`.
std::vector<ReferenceState> horizon_reference(const ReferencePath& path, std::size_t start,
                                              double ts, int horizon, double max_lat_accel,
                                              double v_max);

/// Waypoint file: one `x y heading curvature` line per waypoint.
std::vector<Waypoint> parse_waypoints(const std::string& text);
std::vector<Waypoint> load_waypoints(const std::filesystem::path& path);
std::string serialize_waypoints(const std::vector<Waypoint>& waypoints);

}  // namespace occnav
