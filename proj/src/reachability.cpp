#include "occnav/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace occnav {

double effective_speed(const ExtrapolationRequest& req, const PedestrianTrack* track) {
  if (track != nullptr && track->observed_speed.has_value()) {
    return *track->observed_speed;
  }
  return std::min(req.max_ped_speed, req.vehicle_speed);
}

int spread_generations(double speed, double horizon, double resolution) {
  if (speed <= 0.0 || horizon <= 0.0) return 0;
  return static_cast<int>(std::ceil(speed * horizon / resolution - 1e-12));
}

std::vector<GridIndex> footprint_cells(const GridFrame& frame, const PedestrianTrack& track) {
  const double half = track.footprint_side / 2.0;
  const double lo_x = track.position.x - half;
  const double hi_x = track.position.x + half;
  const double lo_y = track.position.y - half;
  const double hi_y = track.position.y + half;

  // Candidate range padded by one cell, then filtered on the half-open
  // square so footprints aligned with cell centers stay tight.
  const auto first = [&](double lo) {
    return static_cast<int>(std::floor((lo - frame.origin.x) / frame.resolution)) - 1;
  };
  std::vector<GridIndex> cells;
  const int col_lo = first(lo_x);
  const int col_hi = static_cast<int>(std::floor((hi_x - frame.origin.x) / frame.resolution)) + 1;
  const int row_lo = static_cast<int>(std::floor((lo_y - frame.origin.y) / frame.resolution)) - 1;
  const int row_hi = static_cast<int>(std::floor((hi_y - frame.origin.y) / frame.resolution)) + 1;
  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      const GridIndex i{col, row};
      if (!frame.in_bounds(i)) continue;
      const WorldPoint c = frame.cell_to_world(i);
      if (c.x >= lo_x && c.x < hi_x && c.y >= lo_y && c.y < hi_y) {
        cells.push_back(i);
      }
    }
  }
  return cells;
}

DrivableMap seed_dynamic_map(const GridMap& map, const FovMap& fov,
                             std::span<const PedestrianTrack> tracks) {
  if (fov.frame() != map.frame()) {
    throw std::invalid_argument("FoV map dimensions do not match the static map");
  }
  DrivableMap dmap(map.frame());
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      const GridIndex i{col, row};
      const StaticCell cell = map.at(i);
      if (is_blocking(cell)) {
        dmap.set(i, DrivableCell::StaticBlocked);
      } else if (cell == StaticCell::Entrance || !fov.visible(i)) {
        dmap.set(i, DrivableCell::PotentialPedestrian);
      }
    }
  }
  for (const auto& track : tracks) {
    for (const GridIndex& i : footprint_cells(map.frame(), track)) {
      if (dmap.at(i) != DrivableCell::StaticBlocked) {
        dmap.set(i, DrivableCell::PotentialPedestrian);
      }
    }
  }
  return dmap;
}

namespace {

void dilate_group(const DrivableMap& seeded, DrivableMap& out,
                  const std::vector<GridIndex>& seeds, int generations) {
  const GridFrame& frame = seeded.frame();
  std::vector<std::uint8_t> current(frame.cell_count(), 0);
  for (const GridIndex& i : seeds) {
    if (frame.in_bounds(i) && seeded.at(i) != DrivableCell::StaticBlocked) {
      current[frame.flat(i)] = 1;
    }
  }
  std::vector<std::uint8_t> next(frame.cell_count(), 0);
  for (int gen = 0; gen < generations; ++gen) {
    next = current;
    bool grew = false;
    for (int row = 0; row < frame.height; ++row) {
      for (int col = 0; col < frame.width; ++col) {
        const GridIndex i{col, row};
        if (!current[frame.flat(i)]) continue;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const GridIndex n{col + dc, row + dr};
            if (!frame.in_bounds(n)) continue;
            const std::size_t f = frame.flat(n);
            if (next[f] || seeded.at(n) == DrivableCell::StaticBlocked) continue;
            next[f] = 1;
            grew = true;
          }
        }
      }
    }
    current.swap(next);
    if (!grew) break;
  }
  for (std::size_t f = 0; f < current.size(); ++f) {
    if (current[f] && out.cells()[f] == DrivableCell::SafeDrivable) {
      out.set(GridIndex{static_cast<int>(f % frame.width), static_cast<int>(f / frame.width)},
              DrivableCell::PotentialPedestrian);
    }
  }
}

}  // namespace

DrivableMap extrapolate(const DrivableMap& seeded, const ExtrapolationRequest& req,
                        std::span<const SeedGroup> groups) {
  DrivableMap out = seeded;
  for (const SeedGroup& group : groups) {
    const int g = spread_generations(group.speed, req.horizon, seeded.frame().resolution);
    if (g <= 0) continue;
    dilate_group(seeded, out, group.cells, g);
  }
  return out;
}

DrivableMap build_drivable_map(const GridMap& map, const FovMap& fov,
                               std::span<const PedestrianTrack> tracks,
                               const ExtrapolationRequest& req) {
  DrivableMap seeded = seed_dynamic_map(map, fov, tracks);

  std::vector<SeedGroup> groups;
  SeedGroup untracked;
  untracked.speed = effective_speed(req);
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      const GridIndex i{col, row};
      const StaticCell cell = map.at(i);
      if (is_blocking(cell)) continue;
      if (cell == StaticCell::Entrance || !fov.visible(i)) {
        untracked.cells.push_back(i);
      }
    }
  }
  for (const auto& track : tracks) {
    SeedGroup group;
    group.speed = effective_speed(req, &track);
    group.cells = footprint_cells(map.frame(), track);
    if (track.observed_speed.has_value()) {
      groups.push_back(std::move(group));
    } else {
      // Untracked pedestrians spread with the shared capped speed.
      untracked.cells.insert(untracked.cells.end(), group.cells.begin(), group.cells.end());
    }
  }
  groups.push_back(std::move(untracked));
  return extrapolate(seeded, req, groups);
}

std::string dump_drivable(const DrivableMap& dmap) {
  std::string out;
  const GridFrame& frame = dmap.frame();
  out.reserve((frame.width + 1) * frame.height);
  for (int row = frame.height - 1; row >= 0; --row) {
    for (int col = 0; col < frame.width; ++col) {
      switch (dmap.at(GridIndex{col, row})) {
        case DrivableCell::SafeDrivable:
          out.push_back('.');
          break;
        case DrivableCell::PotentialPedestrian:
          out.push_back('P');
          break;
        case DrivableCell::StaticBlocked:
          out.push_back('#');
          break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace occnav
