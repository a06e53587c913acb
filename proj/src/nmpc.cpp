#include "occnav/nmpc.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace occnav {

Weights Weights::defaults() {
  Weights w;
  w.q = Eigen::Vector4d(0.1, 0.1, 1.0, 0.5).asDiagonal();
  w.r = Eigen::Vector2d(0.01, 0.1).asDiagonal();
  return w;
}

void Weights::validate() const {
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      (r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("weight matrices must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eq(q);
  if (eq.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("Q must be positive semi-definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> er(r);
  if (er.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("R must be positive definite");
  }
}

namespace {

Eigen::Vector4d state_vector(const VehicleState& s) {
  return Eigen::Vector4d(s.x, s.y, s.psi, s.v);
}

}  // namespace

QuadraticProgram build_qp(std::span<const LinearizedDynamics> linearizations,
                          std::span<const ReferenceState> references,
                          std::span<const StageConstraints> corridor,
                          const BoxLimits& limits, const Weights& weights,
                          const VehicleState& initial_state) {
  const int n_stages = static_cast<int>(linearizations.size());  // N
  if (n_stages < 1) throw std::invalid_argument("horizon must be at least 1");
  if (static_cast<int>(references.size()) != n_stages + 1) {
    throw std::invalid_argument("need N+1 reference states");
  }
  if (static_cast<int>(corridor.size()) != n_stages) {
    throw std::invalid_argument("need one corridor entry per stage 1..N");
  }

  const int nx = 4 * (n_stages + 1);
  const int nu = 2 * n_stages;
  const int n_var = nx + nu;
  const auto sx = [](int t) { return 4 * t; };
  const auto su = [&](int t) { return nx + 2 * t; };

  QuadraticProgram qp;
  qp.hessian = Eigen::MatrixXd::Zero(n_var, n_var);
  qp.gradient = Eigen::VectorXd::Zero(n_var);
  qp.offset = 0.0;
  for (int t = 0; t <= n_stages; ++t) {
    const Eigen::Vector4d ref(references[t].x, references[t].y, references[t].heading,
                              references[t].speed);
    qp.hessian.block<4, 4>(sx(t), sx(t)) = 2.0 * weights.q;
    qp.gradient.segment<4>(sx(t)) = -2.0 * weights.q * ref;
    qp.offset += ref.dot(weights.q * ref);
  }
  for (int t = 0; t < n_stages; ++t) {
    qp.hessian.block<2, 2>(su(t), su(t)) = 2.0 * weights.r;
  }

  // Equalities: initial state, stage dynamics, terminal rest.
  const int n_eq = 4 + 4 * n_stages + 1;
  qp.eq_matrix = Eigen::MatrixXd::Zero(n_eq, n_var);
  qp.eq_values = Eigen::VectorXd::Zero(n_eq);
  qp.eq_matrix.block<4, 4>(0, sx(0)).setIdentity();
  qp.eq_values.head<4>() = state_vector(initial_state);
  for (int t = 0; t < n_stages; ++t) {
    const int row = 4 + 4 * t;
    qp.eq_matrix.block<4, 4>(row, sx(t)) = -linearizations[t].a;
    qp.eq_matrix.block<4, 2>(row, su(t)) = -linearizations[t].b;
    qp.eq_matrix.block<4, 4>(row, sx(t + 1)).setIdentity();
    qp.eq_values.segment<4>(row) = linearizations[t].c;
  }
  qp.eq_matrix(n_eq - 1, sx(n_stages) + 3) = 1.0;  // v^N = 0

  // Inequalities: corridor half-spaces for stages 1..N, then the boxes.
  int n_in = 0;
  for (const StageConstraints& sc : corridor) n_in += sc.front.has_value() ? 3 : 2;
  n_in += 2 * n_stages;        // heading rate
  n_in += 2 * (n_stages + 1);  // velocity
  n_in += 2 * n_stages;        // steering
  n_in += 2 * n_stages;        // acceleration
  qp.ineq_matrix = Eigen::MatrixXd::Zero(n_in, n_var);
  qp.ineq_upper = Eigen::VectorXd::Zero(n_in);

  int row = 0;
  const auto add_halfspace = [&](int t, const HalfSpace& hs) {
    qp.ineq_matrix(row, sx(t)) = hs.normal.x();
    qp.ineq_matrix(row, sx(t) + 1) = hs.normal.y();
    qp.ineq_upper(row) = hs.offset;
    ++row;
  };
  for (int t = 1; t <= n_stages; ++t) {
    const StageConstraints& sc = corridor[t - 1];
    add_halfspace(t, sc.left);
    add_halfspace(t, sc.right);
    if (sc.front.has_value()) add_halfspace(t, *sc.front);
  }
  for (int t = 0; t < n_stages; ++t) {
    qp.ineq_matrix(row, sx(t + 1) + 2) = 1.0;
    qp.ineq_matrix(row, sx(t) + 2) = -1.0;
    qp.ineq_upper(row++) = limits.dpsi_max;
    qp.ineq_matrix(row, sx(t + 1) + 2) = -1.0;
    qp.ineq_matrix(row, sx(t) + 2) = 1.0;
    qp.ineq_upper(row++) = limits.dpsi_max;
  }
  for (int t = 0; t <= n_stages; ++t) {
    qp.ineq_matrix(row, sx(t) + 3) = 1.0;
    qp.ineq_upper(row++) = limits.v_max;
    qp.ineq_matrix(row, sx(t) + 3) = -1.0;
    qp.ineq_upper(row++) = -limits.v_min;
  }
  for (int t = 0; t < n_stages; ++t) {
    qp.ineq_matrix(row, su(t)) = 1.0;
    qp.ineq_upper(row++) = limits.delta_max;
    qp.ineq_matrix(row, su(t)) = -1.0;
    qp.ineq_upper(row++) = -limits.delta_min;
  }
  for (int t = 0; t < n_stages; ++t) {
    qp.ineq_matrix(row, su(t) + 1) = 1.0;
    qp.ineq_upper(row++) = limits.a_max;
    qp.ineq_matrix(row, su(t) + 1) = -1.0;
    qp.ineq_upper(row++) = -limits.a_min;
  }
  return qp;
}

Trajectory cold_start_trajectory(const VehicleState& initial_state,
                                 const VehicleParams& params, const BoxLimits& limits,
                                 int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const double accel =
      initial_state.v > 0.0 ? std::max(limits.a_min, -initial_state.v / (horizon * params.ts))
                            : 0.0;
  Trajectory seed;
  seed.stages.resize(horizon + 1);
  VehicleState state = initial_state;
  for (int t = 0; t < horizon; ++t) {
    const ControlInput input{0.0, accel};
    seed.stages[t] = TrajectoryStage{state, input};
    state = step(state, input, params);
  }
  state.v = std::max(0.0, state.v);  // exact rest against roundoff
  seed.stages[horizon] = TrajectoryStage{state, ControlInput{0.0, 0.0}};
  return seed;
}

Trajectory shift_trajectory(const Trajectory& previous) {
  if (previous.horizon() < 1) throw std::invalid_argument("cannot shift an empty trajectory");
  Trajectory shifted;
  shifted.stages.assign(previous.stages.begin() + 1, previous.stages.end());
  TrajectoryStage rest = shifted.stages.back();
  rest.input = ControlInput{0.0, 0.0};
  shifted.stages.push_back(rest);
  return shifted;
}

double tracking_cost(const Trajectory& trajectory, std::span<const ReferenceState> references,
                     const Weights& weights) {
  double cost = 0.0;
  for (std::size_t t = 0; t < trajectory.stages.size(); ++t) {
    const VehicleState& s = trajectory.stages[t].state;
    const Eigen::Vector4d err(s.x - references[t].x, s.y - references[t].y,
                              s.psi - references[t].heading, s.v - references[t].speed);
    cost += err.dot(weights.q * err);
    if (t + 1 < trajectory.stages.size()) {
      const Eigen::Vector2d u(trajectory.stages[t].input.delta, trajectory.stages[t].input.accel);
      cost += u.dot(weights.r * u);
    }
  }
  return cost;
}

double max_dynamics_defect(const Trajectory& trajectory, const VehicleParams& params) {
  double worst = 0.0;
  for (std::size_t t = 0; t + 1 < trajectory.stages.size(); ++t) {
    const VehicleState pred = step(trajectory.stages[t].state, trajectory.stages[t].input, params);
    const VehicleState& next = trajectory.stages[t + 1].state;
    worst = std::max({worst, std::abs(pred.x - next.x), std::abs(pred.y - next.y),
                      std::abs(pred.psi - next.psi), std::abs(pred.v - next.v)});
  }
  return worst;
}

namespace {

Trajectory unpack_solution(const Eigen::VectorXd& primal, int n_stages) {
  const int nx = 4 * (n_stages + 1);
  Trajectory traj;
  traj.stages.resize(n_stages + 1);
  for (int t = 0; t <= n_stages; ++t) {
    traj.stages[t].state =
        VehicleState{primal(4 * t), primal(4 * t + 1), primal(4 * t + 2), primal(4 * t + 3)};
    traj.stages[t].input = t < n_stages
                               ? ControlInput{primal(nx + 2 * t), primal(nx + 2 * t + 1)}
                               : ControlInput{0.0, 0.0};
  }
  return traj;
}

}  // namespace

NmpcResult solve_nmpc(const VehicleState& initial_state,
                      const std::optional<Trajectory>& previous,
                      std::span<const ReferenceState> references,
                      std::span<const StageConstraints> corridor,
                      const VehicleParams& params, const Weights& weights,
                      const BoxLimits& limits, const SqpSettings& settings) {
  weights.validate();
  const int n_stages = static_cast<int>(corridor.size());
  if (settings.sqp_iterations < 1) {
    throw std::invalid_argument("need at least one SQP iteration");
  }

  Trajectory incumbent = previous.has_value()
                             ? shift_trajectory(*previous)
                             : cold_start_trajectory(initial_state, params, limits, n_stages);
  if (incumbent.horizon() != n_stages) {
    throw std::invalid_argument("previous trajectory horizon does not match the corridor");
  }

  NmpcResult result;
  std::optional<QpWarmStart> warm;
  std::vector<LinearizedDynamics> lins(n_stages);
  for (int it = 0; it < settings.sqp_iterations; ++it) {
    for (int t = 0; t < n_stages; ++t) {
      lins[t] = linearize(incumbent.stages[t].state, incumbent.stages[t].input, params);
    }
    const QuadraticProgram qp =
        build_qp(lins, references, corridor, limits, weights, initial_state);
    const QpSolution sol = solve_qp(qp, settings.qp, warm);
    if (!sol.solved()) {
      result.status = sol.status == QpStatus::MaxIterations ? SolveStatus::IterationLimit
                                                            : SolveStatus::Infeasible;
      result.trajectory = Trajectory{};
      return result;
    }
    incumbent = unpack_solution(sol.primal, n_stages);
    warm = QpWarmStart{sol.primal, sol.dual_eq, sol.dual_ineq};

    SqpIterationStats stats;
    stats.tracking_cost = tracking_cost(incumbent, references, weights);
    stats.max_defect = max_dynamics_defect(incumbent, params);
    stats.qp_iterations = sol.iterations;
    stats.qp_primal_residual = sol.primal_residual;
    stats.qp_dual_residual = sol.dual_residual;
    result.iterations.push_back(stats);
  }
  result.status = SolveStatus::Solved;
  result.trajectory = std::move(incumbent);
  return result;
}

}  // namespace occnav
