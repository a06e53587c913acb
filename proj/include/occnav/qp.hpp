#pragma once

#include <Eigen/Dense>
#include <optional>

namespace occnav {

/// Dense convex quadratic program
///   minimize    0.5 xᵀ H x + gᵀ x + offset
///   subject to  A_eq x = b_eq
///               A_in x ≤ b_in
/// H must be symmetric positive semi-definite.
struct QuadraticProgram {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  double offset = 0.0;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_values;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_upper;

  Eigen::Index variables() const { return gradient.size(); }
  double cost(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(hessian * x) + gradient.dot(x) + offset;
  }
};

enum class QpStatus { Solved, MaxIterations, PrimalInfeasible, DualInfeasible };

struct QpSolution {
  QpStatus status = QpStatus::MaxIterations;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual_eq;    // multipliers of the equality rows
  Eigen::VectorXd dual_ineq;  // multipliers of the inequality rows, >= 0
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;

  bool solved() const { return status == QpStatus::Solved; }
};

struct QpSettings {
  double tolerance = 1e-6;  // absolute primal/dual residual threshold
  int max_iterations = 20000;
};

/// Warm-start state from a previous solve of a problem with identical
/// dimensions.
struct QpWarmStart {
  Eigen::VectorXd primal;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_ineq;
};

/// Operator-splitting (ADMM) solver over the stacked problem with a
/// quasi-definite KKT factorization, Ruiz equilibration and deterministic
/// residual-balancing rho updates. Residuals are measured on the unscaled
/// problem. Throws std::invalid_argument on inconsistent dimensions or an
/// indefinite Hessian.
QpSolution solve_qp(const QuadraticProgram& qp, const QpSettings& settings = {},
                    const std::optional<QpWarmStart>& warm = std::nullopt);

}  // namespace occnav
