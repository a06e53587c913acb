#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "occnav/advisor.hpp"
#include "occnav/constraints.hpp"
#include "occnav/nmpc.hpp"
#include "occnav/observer.hpp"
#include "occnav/reachability.hpp"
#include "occnav/reference.hpp"
#include "occnav/trajectory.hpp"

namespace occnav {

/// Run rating by the worst footprint overlap with potentially
/// pedestrian-occupied cells: none, up to 10%, up to 50%, beyond.
enum class SeverityClass : int { Safe = 0, MinorConflict = 1, Critical = 2, Hazardous = 3 };

SeverityClass classify_severity(double max_overlap_fraction);
std::string severity_name(SeverityClass severity);

/// A scenario pedestrian: a detected square footprint that moves with a
/// scripted constant velocity. Tracked pedestrians expose their speed to
/// the monitor; untracked ones only their existence and position.
struct PedestrianScript {
  WorldPoint position{};
  double vx = 0.0;
  double vy = 0.0;
  bool tracked = false;
  double footprint_side = 1.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string map_text;
  std::string waypoints_text;
  std::vector<PedestrianScript> pedestrians;
  double max_ped_speed = 1.0;    // v̄_ped [m/s]
  double horizon_seconds = 1.5;  // T; N = round(T / ts)
  double buffer = 0.0;
  double margin = 0.0;
  double max_lat_accel = 1.3;
  VehicleParams vehicle{};
  BoxLimits limits{};
  Weights weights = Weights::defaults();
  SqpSettings sqp{};
  CheckMode observer_mode = CheckMode::CogPoint;
  int tick_limit = 1000;
  std::optional<VehicleState> start;  // default: first waypoint pose at rest
  double goal_speed_tolerance = 0.05;

  /// N = round(T/ts); throws unless T/ts is an integer up to roundoff.
  int horizon_stages() const;
};

/// Plain key-value scenario text; `map`/`waypoints` keys reference files
/// relative to `base_dir`, `map_inline`/`waypoints_inline` open blocks that
/// run until `end_map`/`end_waypoints`.
ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Self-contained scenario text with map and waypoints inlined; parsing it
/// back yields an equivalent configuration.
std::string snapshot_scenario(const ScenarioConfig& config);

struct TickRecord {
  int tick = 0;
  VehicleState state{};  // at tick start, before actuation
  bool has_candidate = false;
  Verdict verdict{};
  SolveStatus solver_status = SolveStatus::Infeasible;
  ControlInput applied{};
  std::array<double, 5> free_distances{};  // front, rear, left, right, forward-reference
  double overlap = 0.0;
};

/// Per-tick artifacts kept for replay verification.
struct TickHistory {
  DrivableMap dmap;
  std::optional<Trajectory> candidate;
  std::vector<StageConstraints> corridor;
};

struct RunResult {
  std::vector<TickRecord> ticks;
  std::vector<TickHistory> history;  // filled only when requested
  double max_overlap = 0.0;
  SeverityClass severity = SeverityClass::Safe;
  bool goal_reached = false;
  VehicleState final_state{};
  int accepted = 0;
  int rejected = 0;
  int no_candidate = 0;
  bool initial_plan_safe = true;
};

struct RunOptions {
  bool keep_history = false;
};

/// Oriented-footprint fraction covered by PotentialPedestrian cells,
/// computed on a deterministic sample lattice with at least 16 samples per
/// cell area. Samples outside the map count as conflicting.
double overlap_fraction(const VehicleState& state, const VehicleParams& params,
                        const DrivableMap& dmap);

/// Closed-loop monitor–controller–observer loop; terminates at the final
/// waypoint (within one waypoint spacing, near rest) or at the tick limit.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

std::string format_run_csv(const RunResult& result);
std::string format_advisor_csv(const RunResult& result);
std::string format_run_report(const ScenarioConfig& config, const RunResult& result);

/// Write run.csv, advisor.csv, report.txt and scenario.snapshot into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                       const RunResult& result);

struct SweepCell {
  double ped_speed = 0.0;
  double horizon = 0.0;
  SeverityClass severity = SeverityClass::Safe;
  double max_overlap = 0.0;
  bool goal_reached = false;
  int ticks = 0;
};

struct SweepResult {
  std::vector<double> ped_speeds;
  std::vector<double> horizons;
  std::vector<SweepCell> cells;  // row-major, rows = horizons

  const SweepCell& at(std::size_t horizon_idx, std::size_t speed_idx) const {
    return cells[horizon_idx * ped_speeds.size() + speed_idx];
  }
};

/// Run the scenario grid over (v̄_ped, T). Cells are independent and may run
/// on up to `jobs` threads; results are ordered deterministically.
SweepResult run_sweep(const ScenarioConfig& base, const std::vector<double>& ped_speeds,
                      const std::vector<double>& horizons, int jobs = 1);

std::string format_sweep_table(const SweepResult& result);
std::string format_sweep_csv(const SweepResult& result);

struct ReplayIssue {
  int tick = 0;
  std::string message;
};

/// Re-verify a recorded run (with history) against the observer and
/// constraint invariants: accepted trajectories stay on safe cells and
/// within their constraints, and every actuated command stems from the
/// fallback-store walk over accepted trajectories.
std::vector<ReplayIssue> verify_run(const ScenarioConfig& config, const RunResult& result);

}  // namespace occnav
