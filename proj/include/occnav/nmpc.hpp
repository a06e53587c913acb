#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "occnav/constraints.hpp"
#include "occnav/qp.hpp"
#include "occnav/reference.hpp"
#include "occnav/trajectory.hpp"
#include "occnav/vehicle.hpp"

namespace occnav {

/// Tracking weights: Q on the state error, R on the inputs. Q must be
/// symmetric positive semi-definite, R symmetric positive definite.
struct Weights {
  Eigen::Matrix4d q;
  Eigen::Matrix2d r;

  static Weights defaults();
  void validate() const;  // throws std::invalid_argument
};

struct SqpSettings {
  int sqp_iterations = 3;
  QpSettings qp{};
};

enum class SolveStatus { Solved, Infeasible, IterationLimit };

/// Per-SQP-iteration telemetry for regression checks and tick logs.
struct SqpIterationStats {
  double tracking_cost = 0.0;  // nonlinear objective of the iterate
  double max_defect = 0.0;     // worst dynamics violation of the iterate
  int qp_iterations = 0;
  double qp_primal_residual = 0.0;
  double qp_dual_residual = 0.0;
};

struct NmpcResult {
  SolveStatus status = SolveStatus::Infeasible;
  Trajectory trajectory;  // meaningful only when status == Solved
  std::vector<SqpIterationStats> iterations;
};

/// Stacked-variable QP of the linearized tracking problem. Decision vector:
/// states of stages 0..N then inputs of stages 0..N-1. Equalities pin the
/// initial state, the linearized dynamics and the terminal rest; the
/// inequalities hold the corridor half-spaces and the box limits. `corridor`
/// entry k constrains stage k+1.
QuadraticProgram build_qp(std::span<const LinearizedDynamics> linearizations,
                          std::span<const ReferenceState> references,
                          std::span<const StageConstraints> corridor,
                          const BoxLimits& limits, const Weights& weights,
                          const VehicleState& initial_state);

/// Braking seed used when no previous trajectory exists: zero steering and
/// the mildest constant braking that reaches rest at stage N.
Trajectory cold_start_trajectory(const VehicleState& initial_state,
                                 const VehicleParams& params, const BoxLimits& limits,
                                 int horizon);

/// Receding-horizon warm start: drop stage 0, repeat the terminal rest stage.
Trajectory shift_trajectory(const Trajectory& previous);

/// Nonlinear tracking objective of a trajectory (the Eq.-(13) sum).
double tracking_cost(const Trajectory& trajectory, std::span<const ReferenceState> references,
                     const Weights& weights);

/// Worst infinity-norm defect between consecutive stages and the nonlinear
/// model prediction.
double max_dynamics_defect(const Trajectory& trajectory, const VehicleParams& params);

/// SQP loop: linearize around the incumbent (the shifted previous trajectory
/// or the cold-start seed), build and solve the QP, adopt the solution as
/// the next incumbent. QP infeasibility or iteration exhaustion aborts with
/// the corresponding status so the caller can fall back.
NmpcResult solve_nmpc(const VehicleState& initial_state,
                      const std::optional<Trajectory>& previous,
                      std::span<const ReferenceState> references,
                      std::span<const StageConstraints> corridor,
                      const VehicleParams& params, const Weights& weights,
                      const BoxLimits& limits, const SqpSettings& settings);

}  // namespace occnav
