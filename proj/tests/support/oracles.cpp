#include "support/oracles.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdlib>
#include <deque>

namespace occnav::testing {

namespace {

// floor(n / d) for d > 0 with exact behavior on negative numerators
long long floor_div(long long n, long long d) {
  long long q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

}  // namespace

std::vector<GridIndex> line_cells_reference(GridIndex a, GridIndex b) {
  const long long dx = b.col - a.col;
  const long long dy = b.row - a.row;
  const long long adx = std::llabs(dx);
  const long long ady = std::llabs(dy);
  std::vector<GridIndex> cells;
  if (adx >= ady) {
    if (adx == 0) return {a};
    const long long sx = dx > 0 ? 1 : -1;
    for (long long k = 0; k <= adx; ++k) {
      // round-half-up of a.row + dy*k/adx
      const long long row = a.row + floor_div(2 * dy * k + adx, 2 * adx);
      cells.push_back(GridIndex{static_cast<int>(a.col + sx * k), static_cast<int>(row)});
    }
  } else {
    const long long sy = dy > 0 ? 1 : -1;
    for (long long k = 0; k <= ady; ++k) {
      const long long col = a.col + floor_div(2 * dx * k + ady, 2 * ady);
      cells.push_back(GridIndex{static_cast<int>(col), static_cast<int>(a.row + sy * k)});
    }
  }
  return cells;
}

std::set<std::pair<int, int>> bfs_dilation(const DrivableMap& seeded,
                                           const std::vector<GridIndex>& seeds, int depth) {
  const GridFrame& frame = seeded.frame();
  std::set<std::pair<int, int>> reached;
  std::deque<std::pair<GridIndex, int>> queue;
  for (const GridIndex& s : seeds) {
    if (!frame.in_bounds(s) || seeded.at(s) == DrivableCell::StaticBlocked) continue;
    if (reached.insert({s.col, s.row}).second) queue.push_back({s, 0});
  }
  while (!queue.empty()) {
    const auto [cell, dist] = queue.front();
    queue.pop_front();
    if (dist >= depth) continue;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const GridIndex n{cell.col + dc, cell.row + dr};
        if (!frame.in_bounds(n) || seeded.at(n) == DrivableCell::StaticBlocked) continue;
        if (reached.insert({n.col, n.row}).second) queue.push_back({n, dist + 1});
      }
    }
  }
  return reached;
}

FovMap fov_reference(const GridMap& map, const VehicleState& state,
                     const VehicleParams& params) {
  const auto sensors = sensor_positions(state, params);
  std::vector<GridIndex> sensor_cells;
  for (const WorldPoint& s : sensors) sensor_cells.push_back(map.world_to_cell(s));

  std::vector<GridIndex> targets;
  for (int col = 0; col < map.width(); ++col) {
    targets.push_back(GridIndex{col, 0});
    if (map.height() > 1) targets.push_back(GridIndex{col, map.height() - 1});
  }
  for (int row = 1; row + 1 < map.height(); ++row) {
    targets.push_back(GridIndex{0, row});
    if (map.width() > 1) targets.push_back(GridIndex{map.width() - 1, row});
  }
  if (map.contains(WorldPoint{state.x, state.y})) {
    targets.push_back(map.world_to_cell(WorldPoint{state.x, state.y}));
  }
  for (const GridIndex& s : sensor_cells) targets.push_back(s);

  FovMap fov(map.frame());
  for (const GridIndex& sensor : sensor_cells) {
    for (const GridIndex& target : targets) {
      for (const GridIndex& cell : line_cells_reference(sensor, target)) {
        fov.mark_visible(cell);
        if (map.blocking_at(cell)) break;
      }
    }
  }
  return fov;
}

void finite_difference_jacobians(const VehicleState& state, const ControlInput& input,
                                 const VehicleParams& params, double h, Eigen::Matrix4d& a,
                                 Eigen::Matrix<double, 4, 2>& b) {
  const auto pack = [](const VehicleState& s) {
    return Eigen::Vector4d(s.x, s.y, s.psi, s.v);
  };
  const auto eval = [&](const Eigen::Vector4d& xi, const Eigen::Vector2d& u) {
    return pack(step(VehicleState{xi(0), xi(1), xi(2), xi(3)}, ControlInput{u(0), u(1)}, params));
  };
  const Eigen::Vector4d xi0 = pack(state);
  const Eigen::Vector2d u0(input.delta, input.accel);
  for (int j = 0; j < 4; ++j) {
    Eigen::Vector4d lo = xi0, hi = xi0;
    lo(j) -= h;
    hi(j) += h;
    a.col(j) = (eval(hi, u0) - eval(lo, u0)) / (2.0 * h);
  }
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector2d lo = u0, hi = u0;
    lo(j) -= h;
    hi(j) += h;
    b.col(j) = (eval(xi0, hi) - eval(xi0, lo)) / (2.0 * h);
  }
}

Eigen::VectorXd qp_oracle(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                          const Eigen::MatrixXd& ineq, const Eigen::VectorXd& upper,
                          int max_iterations, double tolerance) {
  const Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  const Eigen::VectorXd base = llt.solve(gradient);  // H^{-1} g
  const Eigen::Index m = ineq.rows();
  if (m == 0) return -base;

  const Eigen::MatrixXd w = llt.solve(ineq.transpose());  // H^{-1} Cᵀ
  const Eigen::MatrixXd gram = ineq * w;                   // dual Hessian, PSD
  const Eigen::VectorXd shift = ineq * base + upper;       // dual gradient offset

  // Lipschitz constant by deterministic power iteration.
  Eigen::VectorXd p = Eigen::VectorXd::Ones(m);
  double lam = 1.0;
  for (int i = 0; i < 200; ++i) {
    p = gram * p;
    const double norm = p.norm();
    if (norm < 1e-300) break;
    p /= norm;
    lam = p.dot(gram * p);
  }
  const double step_size = 1.0 / std::max(lam * 1.01, 1e-12);

  // FISTA on the dual with restart on non-monotone fixed-point residuals.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd momentum = lambda;
  double theta = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd grad = gram * momentum + shift;
    Eigen::VectorXd next = (momentum - step_size * grad).cwiseMax(0.0);
    const double residual = (next - lambda).lpNorm<Eigen::Infinity>();
    const double theta_next = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
    Eigen::VectorXd candidate = next + ((theta - 1.0) / theta_next) * (next - lambda);
    if ((gram * next + shift).dot(next - lambda) > 0.0) {
      candidate = next;  // restart momentum
      theta = 1.0;
    } else {
      theta = theta_next;
    }
    lambda = next;
    momentum = candidate;
    if (residual <= tolerance && it > 10) break;
  }
  return -(base + w * lambda);
}

GridMap random_map(std::mt19937& rng, int width, int height, double wall_density,
                   double vehicle_density, double entrance_density, double resolution) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<StaticCell> cells(static_cast<std::size_t>(width) * height, StaticCell::Free);
  for (auto& cell : cells) {
    const double draw = unit(rng);
    if (draw < wall_density) {
      cell = StaticCell::Wall;
    } else if (draw < wall_density + vehicle_density) {
      cell = StaticCell::ParkedVehicle;
    } else if (draw < wall_density + vehicle_density + entrance_density) {
      cell = StaticCell::Entrance;
    }
  }
  return GridMap(GridFrame{width, height, resolution, WorldPoint{0.0, 0.0}}, std::move(cells));
}

}  // namespace occnav::testing
