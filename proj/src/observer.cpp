#include "occnav/observer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace occnav {

namespace {

// Separating-axis overlap test between an axis-aligned cell and the oriented
// footprint rectangle; touching edges do not count as overlap.
bool rect_overlaps_cell(double cx, double cy, double half_len_back, double half_len_front,
                        double half_width, double cos_psi, double sin_psi, double cell_min_x,
                        double cell_min_y, double cell_size) {
  // Footprint corners in world coordinates. The rectangle spans
  // [-half_len_back, half_len_front] longitudinally around the CoG.
  const double lon[2] = {-half_len_back, half_len_front};
  const double lat[2] = {-half_width, half_width};
  double xs[4], ys[4];
  int corner = 0;
  for (double u : lon) {
    for (double w : lat) {
      xs[corner] = cx + cos_psi * u - sin_psi * w;
      ys[corner] = cy + sin_psi * u + cos_psi * w;
      ++corner;
    }
  }

  // Axis 1/2: the cell's axes.
  const auto minmax4 = [](const double* v) {
    return std::pair<double, double>{std::min({v[0], v[1], v[2], v[3]}),
                                     std::max({v[0], v[1], v[2], v[3]})};
  };
  const auto [min_x, max_x] = minmax4(xs);
  const auto [min_y, max_y] = minmax4(ys);
  constexpr double kEps = 1e-12;
  if (max_x <= cell_min_x + kEps || min_x >= cell_min_x + cell_size - kEps) return false;
  if (max_y <= cell_min_y + kEps || min_y >= cell_min_y + cell_size - kEps) return false;

  // Axis 3/4: the footprint's axes; project the cell corners.
  const double cell_x[4] = {cell_min_x, cell_min_x + cell_size, cell_min_x,
                            cell_min_x + cell_size};
  const double cell_y[4] = {cell_min_y, cell_min_y, cell_min_y + cell_size,
                            cell_min_y + cell_size};
  double proj_lon[4], proj_lat[4];
  for (int i = 0; i < 4; ++i) {
    const double dx = cell_x[i] - cx;
    const double dy = cell_y[i] - cy;
    proj_lon[i] = cos_psi * dx + sin_psi * dy;
    proj_lat[i] = -sin_psi * dx + cos_psi * dy;
  }
  const auto [min_lon, max_lon] = minmax4(proj_lon);
  const auto [min_lat, max_lat] = minmax4(proj_lat);
  if (max_lon <= -half_len_back + kEps || min_lon >= half_len_front - kEps) return false;
  if (max_lat <= -half_width + kEps || min_lat >= half_width - kEps) return false;
  return true;
}

}  // namespace

std::vector<GridIndex> footprint_overlap_cells(const GridFrame& frame,
                                               const VehicleState& state,
                                               const VehicleParams& params, bool* out_of_map) {
  const double half_width = params.width / 2.0;
  const double cos_psi = std::cos(state.psi);
  const double sin_psi = std::sin(state.psi);
  const double reach = std::hypot(std::max(params.lf, params.lr), half_width);

  if (out_of_map != nullptr) *out_of_map = false;
  std::vector<GridIndex> cells;
  const int col_lo = static_cast<int>(std::floor((state.x - reach - frame.origin.x) / frame.resolution));
  const int col_hi = static_cast<int>(std::floor((state.x + reach - frame.origin.x) / frame.resolution));
  const int row_lo = static_cast<int>(std::floor((state.y - reach - frame.origin.y) / frame.resolution));
  const int row_hi = static_cast<int>(std::floor((state.y + reach - frame.origin.y) / frame.resolution));
  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      const double cell_min_x = frame.origin.x + col * frame.resolution;
      const double cell_min_y = frame.origin.y + row * frame.resolution;
      if (!rect_overlaps_cell(state.x, state.y, params.lr, params.lf, half_width, cos_psi,
                              sin_psi, cell_min_x, cell_min_y, frame.resolution)) {
        continue;
      }
      const GridIndex i{col, row};
      if (frame.in_bounds(i)) {
        cells.push_back(i);
      } else if (out_of_map != nullptr) {
        *out_of_map = true;
      }
    }
  }
  return cells;
}

Verdict check_trajectory(const Trajectory& trajectory, const DrivableMap& dmap,
                         CheckMode mode, const VehicleParams& params) {
  if (trajectory.empty()) throw std::invalid_argument("cannot check an empty trajectory");
  const GridFrame& frame = dmap.frame();
  for (std::size_t t = 0; t < trajectory.stages.size(); ++t) {
    const VehicleState& state = trajectory.stages[t].state;
    const int stage = static_cast<int>(t);
    if (mode == CheckMode::CogPoint) {
      const WorldPoint p{state.x, state.y};
      if (!frame.contains(p)) return Verdict::reject(stage);
      if (!dmap.safe(frame.world_to_cell(p))) return Verdict::reject(stage);
    } else {
      bool out_of_map = false;
      const auto cells = footprint_overlap_cells(frame, state, params, &out_of_map);
      if (out_of_map) return Verdict::reject(stage);
      for (const GridIndex& i : cells) {
        if (!dmap.safe(i)) return Verdict::reject(stage);
      }
    }
  }
  return Verdict::accept();
}

FallbackStore::FallbackStore(Trajectory initial) : stored_(std::move(initial)) {
  if (stored_.empty()) throw std::invalid_argument("fallback store needs a trajectory");
}

ControlInput FallbackStore::next_command(const Verdict& verdict,
                                         const std::optional<Trajectory>& candidate) {
  if (verdict.accepted && candidate.has_value() && !candidate->empty()) {
    stored_ = *candidate;
    index_ = 1;
    return stored_.stages.front().input;
  }
  if (index_ <= stored_.horizon()) {
    const ControlInput command = stored_.stages[index_].input;
    ++index_;
    return command;
  }
  return ControlInput{0.0, 0.0};  // past the plan: hold the full stop
}

}  // namespace occnav
