#include "occnav/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace occnav {

SeverityClass classify_severity(double f) {
  if (f < 0.0 || f > 1.0 || !std::isfinite(f)) {
    throw std::invalid_argument("overlap fraction must be within [0, 1]");
  }
  if (f == 0.0) return SeverityClass::Safe;
  if (f <= 0.10) return SeverityClass::MinorConflict;
  if (f <= 0.50) return SeverityClass::Critical;
  return SeverityClass::Hazardous;
}

std::string severity_name(SeverityClass severity) {
  switch (severity) {
    case SeverityClass::Safe:
      return "safe";
    case SeverityClass::MinorConflict:
      return "minor_conflict";
    case SeverityClass::Critical:
      return "critical";
    case SeverityClass::Hazardous:
      return "hazardous";
  }
  return "unknown";
}

int ScenarioConfig::horizon_stages() const {
  const double ratio = horizon_seconds / vehicle.ts;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 4.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::abs(ratio)) ||
      rounded < 1.0) {
    throw std::invalid_argument("horizon must be an integer multiple of the sampling time");
  }
  return static_cast<int>(rounded);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string read_block(std::istringstream& in, const std::string& terminator,
                       const std::string& key) {
  std::string block;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == terminator) return block;
    block += line;
    block += '\n';
  }
  throw std::runtime_error("unterminated " + key + " block (missing " + terminator + ")");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    const auto want = [&](auto&... values) {
      if (!((fields >> values) && ...)) {
        std::ostringstream msg;
        msg << "scenario line " << line_no << ": malformed '" << key << "' entry";
        throw std::runtime_error(msg.str());
      }
    };
    if (key == "name") {
      want(config.name);
    } else if (key == "map") {
      std::string path;
      want(path);
      config.map_text = read_file(base_dir / path);
    } else if (key == "waypoints") {
      std::string path;
      want(path);
      config.waypoints_text = read_file(base_dir / path);
    } else if (key == "map_inline") {
      config.map_text = read_block(in, "end_map", key);
    } else if (key == "waypoints_inline") {
      config.waypoints_text = read_block(in, "end_waypoints", key);
    } else if (key == "vped") {
      want(config.max_ped_speed);
    } else if (key == "horizon") {
      want(config.horizon_seconds);
    } else if (key == "buffer") {
      want(config.buffer);
    } else if (key == "margin") {
      want(config.margin);
    } else if (key == "max_lat_accel") {
      want(config.max_lat_accel);
    } else if (key == "tick_limit") {
      want(config.tick_limit);
    } else if (key == "goal_speed_tolerance") {
      want(config.goal_speed_tolerance);
    } else if (key == "observer_mode") {
      std::string mode;
      want(mode);
      if (mode == "cog") {
        config.observer_mode = CheckMode::CogPoint;
      } else if (mode == "footprint") {
        config.observer_mode = CheckMode::Footprint;
      } else {
        throw std::runtime_error("scenario: observer_mode must be 'cog' or 'footprint'");
      }
    } else if (key == "start") {
      VehicleState s;
      want(s.x, s.y, s.psi, s.v);
      config.start = s;
    } else if (key == "pedestrian") {
      PedestrianScript ped;
      std::string tracked;
      want(ped.position.x, ped.position.y, ped.vx, ped.vy, tracked);
      if (tracked != "tracked" && tracked != "untracked") {
        throw std::runtime_error("scenario: pedestrian flag must be 'tracked' or 'untracked'");
      }
      ped.tracked = tracked == "tracked";
      config.pedestrians.push_back(ped);
    } else if (key == "vehicle") {
      want(config.vehicle.lf, config.vehicle.lr, config.vehicle.width, config.vehicle.ts);
    } else if (key == "limits") {
      want(config.limits.dpsi_max, config.limits.v_min, config.limits.v_max,
           config.limits.delta_min, config.limits.delta_max, config.limits.a_min,
           config.limits.a_max);
    } else if (key == "weights_q") {
      Eigen::Vector4d d;
      want(d.x(), d.y(), d.z(), d.w());
      config.weights.q = d.asDiagonal();
    } else if (key == "weights_r") {
      Eigen::Vector2d d;
      want(d.x(), d.y());
      config.weights.r = d.asDiagonal();
    } else if (key == "sqp_iterations") {
      want(config.sqp.sqp_iterations);
    } else if (key == "qp_tolerance") {
      want(config.sqp.qp.tolerance);
    } else if (key == "qp_max_iterations") {
      want(config.sqp.qp.max_iterations);
    } else {
      std::ostringstream msg;
      msg << "scenario line " << line_no << ": unknown key '" << key << "'";
      throw std::runtime_error(msg.str());
    }
  }
  if (config.map_text.empty()) throw std::runtime_error("scenario: missing map");
  if (config.waypoints_text.empty()) throw std::runtime_error("scenario: missing waypoints");
  config.horizon_stages();  // validate early
  config.weights.validate();
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

std::string snapshot_scenario(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "name " << config.name << "\n";
  out << "vped " << fmt(config.max_ped_speed) << "\n";
  out << "horizon " << fmt(config.horizon_seconds) << "\n";
  out << "buffer " << fmt(config.buffer) << "\n";
  out << "margin " << fmt(config.margin) << "\n";
  out << "max_lat_accel " << fmt(config.max_lat_accel) << "\n";
  out << "tick_limit " << config.tick_limit << "\n";
  out << "goal_speed_tolerance " << fmt(config.goal_speed_tolerance) << "\n";
  out << "observer_mode "
      << (config.observer_mode == CheckMode::CogPoint ? "cog" : "footprint") << "\n";
  out << "vehicle " << fmt(config.vehicle.lf) << " " << fmt(config.vehicle.lr) << " "
      << fmt(config.vehicle.width) << " " << fmt(config.vehicle.ts) << "\n";
  out << "limits " << fmt(config.limits.dpsi_max) << " " << fmt(config.limits.v_min) << " "
      << fmt(config.limits.v_max) << " " << fmt(config.limits.delta_min) << " "
      << fmt(config.limits.delta_max) << " " << fmt(config.limits.a_min) << " "
      << fmt(config.limits.a_max) << "\n";
  out << "weights_q " << fmt(config.weights.q(0, 0)) << " " << fmt(config.weights.q(1, 1))
      << " " << fmt(config.weights.q(2, 2)) << " " << fmt(config.weights.q(3, 3)) << "\n";
  out << "weights_r " << fmt(config.weights.r(0, 0)) << " " << fmt(config.weights.r(1, 1))
      << "\n";
  out << "sqp_iterations " << config.sqp.sqp_iterations << "\n";
  out << "qp_tolerance " << fmt(config.sqp.qp.tolerance) << "\n";
  out << "qp_max_iterations " << config.sqp.qp.max_iterations << "\n";
  if (config.start.has_value()) {
    out << "start " << fmt(config.start->x) << " " << fmt(config.start->y) << " "
        << fmt(config.start->psi) << " " << fmt(config.start->v) << "\n";
  }
  for (const PedestrianScript& ped : config.pedestrians) {
    out << "pedestrian " << fmt(ped.position.x) << " " << fmt(ped.position.y) << " "
        << fmt(ped.vx) << " " << fmt(ped.vy) << " "
        << (ped.tracked ? "tracked" : "untracked") << "\n";
  }
  out << "map_inline\n" << config.map_text;
  if (!config.map_text.empty() && config.map_text.back() != '\n') out << "\n";
  out << "end_map\n";
  out << "waypoints_inline\n" << config.waypoints_text;
  if (!config.waypoints_text.empty() && config.waypoints_text.back() != '\n') out << "\n";
  out << "end_waypoints\n";
  return out.str();
}

double overlap_fraction(const VehicleState& state, const VehicleParams& params,
                        const DrivableMap& dmap) {
  const GridFrame& frame = dmap.frame();
  const double length = params.lf + params.lr;
  const double sample_step = frame.resolution / 4.0;  // >= 16 samples per cell
  const int n_lon = std::max(1, static_cast<int>(std::ceil(length / sample_step)));
  const int n_lat = std::max(1, static_cast<int>(std::ceil(params.width / sample_step)));
  const double cos_psi = std::cos(state.psi);
  const double sin_psi = std::sin(state.psi);

  int conflicting = 0;
  for (int i = 0; i < n_lon; ++i) {
    const double u = -params.lr + (i + 0.5) * length / n_lon;
    for (int j = 0; j < n_lat; ++j) {
      const double w = -params.width / 2.0 + (j + 0.5) * params.width / n_lat;
      const WorldPoint p{state.x + cos_psi * u - sin_psi * w,
                         state.y + sin_psi * u + cos_psi * w};
      if (!frame.contains(p)) {
        ++conflicting;  // outside the map counts as conflicting
      } else if (dmap.at(frame.world_to_cell(p)) == DrivableCell::PotentialPedestrian) {
        ++conflicting;
      }
    }
  }
  return static_cast<double>(conflicting) / (static_cast<double>(n_lon) * n_lat);
}

namespace {

std::vector<PedestrianTrack> make_tracks(const std::vector<PedestrianScript>& pedestrians) {
  std::vector<PedestrianTrack> tracks;
  tracks.reserve(pedestrians.size());
  for (const PedestrianScript& ped : pedestrians) {
    PedestrianTrack track;
    track.position = ped.position;
    track.footprint_side = ped.footprint_side;
    if (ped.tracked) track.observed_speed = std::hypot(ped.vx, ped.vy);
    tracks.push_back(track);
  }
  return tracks;
}

double unwrap_near(double angle, double anchor) {
  return angle - 2.0 * M_PI * std::round((angle - anchor) / (2.0 * M_PI));
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const GridMap map = parse_static_map(config.map_text);
  const ReferencePath path = ReferencePath::validate(parse_waypoints(config.waypoints_text));
  const int n_stages = config.horizon_stages();
  config.weights.validate();

  VehicleState state;
  if (config.start.has_value()) {
    state = *config.start;
  } else {
    const Waypoint& first = path.waypoints().front();
    state = VehicleState{first.x, first.y, first.heading, 0.0};
  }

  std::vector<PedestrianScript> pedestrians = config.pedestrians;
  std::size_t ref_index = nearest_index(path, state);
  std::optional<Trajectory> previous;

  RunResult result;

  // Mission-start fallback: the braking seed is pre-loaded after its own
  // check against the initial map.
  const Trajectory initial_plan =
      cold_start_trajectory(state, config.vehicle, config.limits, n_stages);
  {
    const FovMap fov0 = compute_fov(map, state, config.vehicle);
    const ExtrapolationRequest req0{config.horizon_seconds, config.max_ped_speed,
                                    std::max(0.0, state.v)};
    const DrivableMap dmap0 = build_drivable_map(map, fov0, make_tracks(pedestrians), req0);
    result.initial_plan_safe =
        check_trajectory(initial_plan, dmap0, config.observer_mode, config.vehicle).accepted;
  }
  FallbackStore store(initial_plan);

  const Waypoint& goal = path.waypoints().back();
  const CorridorConfig corridor_config{config.buffer, config.margin};

  for (int tick = 0; tick < config.tick_limit; ++tick) {
    // Safety monitor: field of view, then conservative extrapolation.
    const std::vector<PedestrianTrack> tracks = make_tracks(pedestrians);
    const FovMap fov = compute_fov(map, state, config.vehicle);
    const ExtrapolationRequest req{config.horizon_seconds, config.max_ped_speed,
                                   std::max(0.0, state.v)};
    const DrivableMap dmap = build_drivable_map(map, fov, tracks, req);

    // Controller references; headings unwrapped toward the current heading.
    std::vector<ReferenceState> refs = horizon_reference(
        path, ref_index, config.vehicle.ts, n_stages, config.max_lat_accel, config.limits.v_max);
    double anchor = state.psi;
    for (ReferenceState& r : refs) {
      r.heading = unwrap_near(r.heading, anchor);
      anchor = r.heading;
    }
    const double front_heading = refs.back().heading;

    const BoundarySet advisory =
        advise(dmap, state, default_advisor_request(state, front_heading, config.buffer));

    const Trajectory& corridor_seed = previous.has_value() ? *previous : initial_plan;
    const std::vector<StageConstraints> corridor =
        build_corridor(dmap, state, corridor_seed, front_heading, corridor_config);

    const NmpcResult nmpc = solve_nmpc(state, previous, refs, corridor, config.vehicle,
                                       config.weights, config.limits, config.sqp);
    std::optional<Trajectory> candidate;
    if (nmpc.status == SolveStatus::Solved) candidate = nmpc.trajectory;

    // Independent observer: re-derive the map from the same inputs, judge
    // the candidate, and produce the actuated command.
    const FovMap observer_fov = compute_fov(map, state, config.vehicle);
    const DrivableMap observer_dmap = build_drivable_map(map, observer_fov, tracks, req);
    const Verdict verdict = candidate.has_value()
                                ? check_trajectory(*candidate, observer_dmap,
                                                   config.observer_mode, config.vehicle)
                                : Verdict::reject(-1);
    const ControlInput applied = store.next_command(verdict, candidate);

    TickRecord record;
    record.tick = tick;
    record.state = state;
    record.has_candidate = candidate.has_value();
    record.verdict = verdict;
    record.solver_status = nmpc.status;
    record.applied = applied;
    for (std::size_t i = 0; i < record.free_distances.size(); ++i) {
      record.free_distances[i] = advisory.entries[i].distance;
    }
    record.overlap = overlap_fraction(state, config.vehicle, dmap);
    result.max_overlap = std::max(result.max_overlap, record.overlap);
    if (!candidate.has_value()) {
      ++result.no_candidate;
    } else if (verdict.accepted) {
      ++result.accepted;
    } else {
      ++result.rejected;
    }
    result.ticks.push_back(record);
    if (options.keep_history) {
      result.history.push_back(TickHistory{dmap, candidate, corridor});
    }

    // Plant update; the parked vehicle does not roll backwards at rest.
    previous = candidate;
    state = step(state, applied, config.vehicle);
    state.v = std::max(0.0, state.v);

    for (PedestrianScript& ped : pedestrians) {
      ped.position.x += ped.vx * config.vehicle.ts;
      ped.position.y += ped.vy * config.vehicle.ts;
    }

    ref_index = advance_index(path, ref_index, config.vehicle.ts, config.max_lat_accel,
                              config.limits.v_max);

    const double goal_distance = std::hypot(goal.x - state.x, goal.y - state.y);
    if (goal_distance < path.spacing() && std::abs(state.v) < config.goal_speed_tolerance) {
      result.goal_reached = true;
      break;
    }
  }

  result.final_state = state;
  result.severity = classify_severity(result.max_overlap);
  return result;
}

namespace {

std::string fmt_csv(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string verdict_token(const TickRecord& record) {
  if (!record.has_candidate) return "no_candidate";
  if (record.verdict.accepted) return "accepted";
  return "rejected:" + std::to_string(record.verdict.offending_stage);
}

std::string status_token(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved:
      return "solved";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

}  // namespace

std::string format_run_csv(const RunResult& result) {
  std::string out = "tick,x,y,psi,v,delta,a,verdict,overlap,status\n";
  for (const TickRecord& r : result.ticks) {
    out += std::to_string(r.tick);
    out += ',';
    out += fmt_csv(r.state.x);
    out += ',';
    out += fmt_csv(r.state.y);
    out += ',';
    out += fmt_csv(r.state.psi);
    out += ',';
    out += fmt_csv(r.state.v);
    out += ',';
    out += fmt_csv(r.applied.delta);
    out += ',';
    out += fmt_csv(r.applied.accel);
    out += ',';
    out += verdict_token(r);
    out += ',';
    out += fmt_csv(r.overlap);
    out += ',';
    out += status_token(r.solver_status);
    out += '\n';
  }
  return out;
}

std::string format_advisor_csv(const RunResult& result) {
  std::string out = "tick,front,rear,left,right,forward_ref\n";
  for (const TickRecord& r : result.ticks) {
    out += std::to_string(r.tick);
    for (double d : r.free_distances) {
      out += ',';
      out += fmt_csv(d);
    }
    out += '\n';
  }
  return out;
}

std::string format_run_report(const ScenarioConfig& config, const RunResult& result) {
  std::ostringstream out;
  out << "scenario: " << config.name << "\n";
  out << "ticks: " << result.ticks.size() << "\n";
  out << "goal_reached: " << (result.goal_reached ? "yes" : "no") << "\n";
  out << "final_state: " << fmt_csv(result.final_state.x) << " " << fmt_csv(result.final_state.y)
      << " " << fmt_csv(result.final_state.psi) << " " << fmt_csv(result.final_state.v) << "\n";
  out << "max_overlap: " << fmt_csv(result.max_overlap) << "\n";
  out << "severity: " << severity_name(result.severity) << "\n";
  out << "accepted: " << result.accepted << "\n";
  out << "rejected: " << result.rejected << "\n";
  out << "no_candidate: " << result.no_candidate << "\n";
  out << "initial_plan_safe: " << (result.initial_plan_safe ? "yes" : "no") << "\n";
  return out.str();
}

void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                       const RunResult& result) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& file, const std::string& content) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    out << content;
  };
  write("run.csv", format_run_csv(result));
  write("advisor.csv", format_advisor_csv(result));
  write("report.txt", format_run_report(config, result));
  write("scenario.snapshot", snapshot_scenario(config));
}

SweepResult run_sweep(const ScenarioConfig& base, const std::vector<double>& ped_speeds,
                      const std::vector<double>& horizons, int jobs) {
  if (ped_speeds.empty() || horizons.empty()) {
    throw std::invalid_argument("sweep needs at least one pedestrian speed and one horizon");
  }
  SweepResult result;
  result.ped_speeds = ped_speeds;
  result.horizons = horizons;
  result.cells.resize(ped_speeds.size() * horizons.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= result.cells.size()) return;
      const std::size_t h = index / ped_speeds.size();
      const std::size_t s = index % ped_speeds.size();
      ScenarioConfig config = base;
      config.max_ped_speed = ped_speeds[s];
      config.horizon_seconds = horizons[h];
      const RunResult run = run_scenario(config);
      SweepCell cell;
      cell.ped_speed = ped_speeds[s];
      cell.horizon = horizons[h];
      cell.severity = run.severity;
      cell.max_overlap = run.max_overlap;
      cell.goal_reached = run.goal_reached;
      cell.ticks = static_cast<int>(run.ticks.size());
      result.cells[index] = cell;
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(result.cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  return result;
}

std::string format_sweep_table(const SweepResult& result) {
  std::ostringstream out;
  out << "severity sweep (rows: horizon T [s], cols: max pedestrian speed [m/s])\n";
  out << "T\\vped";
  for (double v : result.ped_speeds) out << "\t" << fmt_csv(v);
  out << "\n";
  for (std::size_t h = 0; h < result.horizons.size(); ++h) {
    out << fmt_csv(result.horizons[h]);
    for (std::size_t s = 0; s < result.ped_speeds.size(); ++s) {
      out << "\t" << severity_name(result.at(h, s).severity);
    }
    out << "\n";
  }
  return out.str();
}

std::string format_sweep_csv(const SweepResult& result) {
  std::string out = "horizon,vped,severity,max_overlap,goal_reached,ticks\n";
  for (const SweepCell& cell : result.cells) {
    out += fmt_csv(cell.horizon);
    out += ',';
    out += fmt_csv(cell.ped_speed);
    out += ',';
    out += severity_name(cell.severity);
    out += ',';
    out += fmt_csv(cell.max_overlap);
    out += ',';
    out += cell.goal_reached ? "yes" : "no";
    out += ',';
    out += std::to_string(cell.ticks);
    out += '\n';
  }
  return out;
}

std::vector<ReplayIssue> verify_run(const ScenarioConfig& config, const RunResult& result) {
  std::vector<ReplayIssue> issues;
  if (result.history.size() != result.ticks.size()) {
    issues.push_back({-1, "run history missing; re-run with keep_history"});
    return issues;
  }
  const int n_stages = config.horizon_stages();
  constexpr double kTol = 1e-5;

  VehicleState start;
  if (config.start.has_value()) {
    start = *config.start;
  } else {
    const ReferencePath path = ReferencePath::validate(parse_waypoints(config.waypoints_text));
    const Waypoint& first = path.waypoints().front();
    start = VehicleState{first.x, first.y, first.heading, 0.0};
  }
  FallbackStore store(cold_start_trajectory(start, config.vehicle, config.limits, n_stages));

  BoxLimits relaxed = config.limits;
  relaxed.dpsi_max += kTol;
  relaxed.v_min -= kTol;
  relaxed.v_max += kTol;
  relaxed.delta_min -= kTol;
  relaxed.delta_max += kTol;
  relaxed.a_min -= kTol;
  relaxed.a_max += kTol;

  for (std::size_t t = 0; t < result.ticks.size(); ++t) {
    const TickRecord& record = result.ticks[t];
    const TickHistory& hist = result.history[t];
    const std::optional<Trajectory>& candidate = hist.candidate;

    if (record.verdict.accepted && candidate.has_value()) {
      const Trajectory& traj = *candidate;
      // Observer invariant: accepted stages never touch conflict cells.
      for (std::size_t k = 0; k < traj.stages.size(); ++k) {
        const VehicleState& s = traj.stages[k].state;
        const WorldPoint p{s.x, s.y};
        if (!hist.dmap.frame().contains(p)) {
          issues.push_back({record.tick, "accepted stage " + std::to_string(k) + " leaves map"});
          continue;
        }
        if (hist.dmap.at(hist.dmap.frame().world_to_cell(p)) ==
            DrivableCell::PotentialPedestrian) {
          issues.push_back(
              {record.tick, "accepted stage " + std::to_string(k) + " on conflict cell"});
        }
      }
      // Constraint replay: corridor half-spaces and box limits.
      for (int stage = 1; stage <= n_stages; ++stage) {
        const StageConstraints& sc = hist.corridor[stage - 1];
        const VehicleState& s = traj.stages[stage].state;
        const WorldPoint p{s.x, s.y};
        if (sc.left.evaluate(p) > kTol || sc.right.evaluate(p) > kTol ||
            (sc.front.has_value() && sc.front->evaluate(p) > kTol)) {
          issues.push_back(
              {record.tick, "accepted stage " + std::to_string(stage) + " violates corridor"});
        }
      }
      if (!check_trajectory_boxes(traj, relaxed)) {
        issues.push_back({record.tick, "accepted trajectory violates box limits"});
      }
      // Full-stop terminal condition.
      const TrajectoryStage& last = traj.stages.back();
      if (std::abs(last.state.v) > 1e-6 || last.input.delta != 0.0 || last.input.accel != 0.0) {
        issues.push_back({record.tick, "accepted trajectory does not end at rest"});
      }
    }

    // Actuation provenance: the applied command must match the fallback walk.
    const ControlInput expected = store.next_command(record.verdict, candidate);
    if (expected.delta != record.applied.delta || expected.accel != record.applied.accel) {
      issues.push_back({record.tick, "applied command does not match the fallback store"});
    }
  }
  return issues;
}

}  // namespace occnav
