#pragma once

#include <Eigen/Dense>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "occnav/fov.hpp"
#include "occnav/grid_map.hpp"
#include "occnav/reachability.hpp"
#include "occnav/vehicle.hpp"

// Independent reference implementations used to derive expected test values.
// Everything here deliberately avoids the production code paths it checks.
namespace occnav::testing {

/// Closed-form symmetric line rasterization: the non-driving coordinate is
/// round-half-up of the exact rational line value, evaluated per step with
/// integer arithmetic.
std::vector<GridIndex> line_cells_reference(GridIndex a, GridIndex b);

/// Depth-capped multi-source BFS over the 8-neighborhood, skipping
/// StaticBlocked cells.
std::set<std::pair<int, int>> bfs_dilation(const DrivableMap& seeded,
                                           const std::vector<GridIndex>& seeds, int depth);

/// Visibility recomputation from first principles with the reference line
/// enumerator and an explicit truncation scan.
FovMap fov_reference(const GridMap& map, const VehicleState& state,
                     const VehicleParams& params);

/// Central finite differences of the vehicle step function.
void finite_difference_jacobians(const VehicleState& state, const ControlInput& input,
                                 const VehicleParams& params, double h, Eigen::Matrix4d& a,
                                 Eigen::Matrix<double, 4, 2>& b);

/// Long-running first-order oracle for strictly convex inequality-constrained
/// QPs: accelerated projected gradient on the dual, primal recovered from the
/// multipliers. Boxes must be passed as inequality rows of c·x <= d.
Eigen::VectorXd qp_oracle(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                          const Eigen::MatrixXd& ineq, const Eigen::VectorXd& upper,
                          int max_iterations = 500000, double tolerance = 1e-12);

/// Random occupancy map with the given obstacle densities.
GridMap random_map(std::mt19937& rng, int width, int height, double wall_density,
                   double vehicle_density = 0.0, double entrance_density = 0.0,
                   double resolution = 0.5);

}  // namespace occnav::testing
