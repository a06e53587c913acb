#include "occnav/qp.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace occnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSigma = 1e-6;
constexpr double kAlpha = 1.6;
constexpr double kRhoEqScale = 1e3;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr int kRuizIterations = 10;
constexpr int kCheckInterval = 25;
constexpr double kInfeasTol = 1e-7;

void validate_problem(const QuadraticProgram& qp) {
  const Eigen::Index n = qp.gradient.size();
  if (n <= 0) throw std::invalid_argument("qp has no variables");
  if (qp.hessian.rows() != n || qp.hessian.cols() != n) {
    throw std::invalid_argument("hessian dimensions do not match the gradient");
  }
  if ((qp.hessian - qp.hessian.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, qp.hessian.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("hessian must be symmetric");
  }
  if (qp.eq_matrix.rows() != qp.eq_values.size() ||
      (qp.eq_matrix.rows() > 0 && qp.eq_matrix.cols() != n)) {
    throw std::invalid_argument("equality constraint dimensions are inconsistent");
  }
  if (qp.ineq_matrix.rows() != qp.ineq_upper.size() ||
      (qp.ineq_matrix.rows() > 0 && qp.ineq_matrix.cols() != n)) {
    throw std::invalid_argument("inequality constraint dimensions are inconsistent");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(qp.hessian);
  const double scale = std::max(1.0, qp.hessian.cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-8 * scale) {
    throw std::invalid_argument("hessian must be positive semi-definite");
  }
}

struct ScaledProblem {
  Eigen::MatrixXd p;
  Eigen::VectorXd q;
  Eigen::MatrixXd m;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd d;  // variable scaling
  Eigen::VectorXd e;  // row scaling
  double cost_scale = 1.0;
};

// Modified Ruiz equilibration of [P Mᵀ; M 0] with OSQP-style cost scaling.
ScaledProblem scale_problem(const Eigen::MatrixXd& p, const Eigen::VectorXd& q,
                            const Eigen::MatrixXd& m, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  const Eigen::Index n = q.size();
  const Eigen::Index rows = m.rows();
  ScaledProblem s;
  s.p = p;
  s.q = q;
  s.m = m;
  s.d = Eigen::VectorXd::Ones(n);
  s.e = Eigen::VectorXd::Ones(rows);

  for (int pass = 0; pass < kRuizIterations; ++pass) {
    Eigen::VectorXd dd(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double norm = s.p.col(j).cwiseAbs().maxCoeff();
      if (rows > 0) norm = std::max(norm, s.m.col(j).cwiseAbs().maxCoeff());
      dd(j) = norm > 1e-12 ? 1.0 / std::sqrt(norm) : 1.0;
    }
    Eigen::VectorXd de(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double norm = s.m.row(i).cwiseAbs().maxCoeff();
      de(i) = norm > 1e-12 ? 1.0 / std::sqrt(norm) : 1.0;
    }
    s.p = dd.asDiagonal() * s.p * dd.asDiagonal();
    s.q = dd.asDiagonal() * s.q;
    if (rows > 0) s.m = de.asDiagonal() * s.m * dd.asDiagonal();
    s.d = s.d.cwiseProduct(dd);
    s.e = s.e.cwiseProduct(de);

    double mean_col_norm = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) mean_col_norm += s.p.col(j).cwiseAbs().maxCoeff();
    mean_col_norm /= static_cast<double>(n);
    const double gamma_target = std::max(mean_col_norm, s.q.cwiseAbs().maxCoeff());
    const double gamma = gamma_target > 1e-12 ? 1.0 / gamma_target : 1.0;
    s.p *= gamma;
    s.q *= gamma;
    s.cost_scale *= gamma;
  }

  s.lower.resize(rows);
  s.upper.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    s.lower(i) = std::isfinite(lower(i)) ? s.e(i) * lower(i) : lower(i);
    s.upper(i) = std::isfinite(upper(i)) ? s.e(i) * upper(i) : upper(i);
  }
  return s;
}

Eigen::SparseMatrix<double> build_kkt(const Eigen::MatrixXd& p, const Eigen::MatrixXd& m,
                                      const Eigen::VectorXd& rho, double sigma) {
  const Eigen::Index n = p.rows();
  const Eigen::Index rows = m.rows();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 8 + rows * 4);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = p(i, j) + (i == j ? sigma : 0.0);
      if (v != 0.0) triplets.emplace_back(i, j, v);
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (v != 0.0) {
        triplets.emplace_back(n + i, j, v);
        triplets.emplace_back(j, n + i, v);
      }
    }
    triplets.emplace_back(n + i, n + i, -1.0 / rho(i));
  }
  Eigen::SparseMatrix<double> kkt(n + rows, n + rows);
  kkt.setFromTriplets(triplets.begin(), triplets.end());
  return kkt;
}

}  // namespace

QpSolution solve_qp(const QuadraticProgram& qp, const QpSettings& settings,
                    const std::optional<QpWarmStart>& warm) {
  validate_problem(qp);
  if (settings.tolerance <= 0.0 || settings.max_iterations < 1) {
    throw std::invalid_argument("qp settings must be positive");
  }

  const Eigen::Index n = qp.gradient.size();
  const Eigen::Index me = qp.eq_matrix.rows();
  const Eigen::Index mi = qp.ineq_matrix.rows();
  const Eigen::Index rows = me + mi;

  Eigen::MatrixXd m(rows, n);
  Eigen::VectorXd lower(rows);
  Eigen::VectorXd upper(rows);
  if (me > 0) {
    m.topRows(me) = qp.eq_matrix;
    lower.head(me) = qp.eq_values;
    upper.head(me) = qp.eq_values;
  }
  if (mi > 0) {
    m.bottomRows(mi) = qp.ineq_matrix;
    lower.tail(mi).setConstant(-kInf);
    upper.tail(mi) = qp.ineq_upper;
  }

  ScaledProblem s = scale_problem(qp.hessian, qp.gradient, m, lower, upper);

  double rho_bar = 0.1;
  Eigen::VectorXd rho(rows);
  const auto fill_rho = [&]() {
    for (Eigen::Index i = 0; i < rows; ++i) {
      rho(i) = (i < me ? kRhoEqScale : 1.0) * rho_bar;
    }
  };
  fill_rho();

  Eigen::SparseMatrix<double> kkt = build_kkt(s.p, s.m, rho, kSigma);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(kkt);
  ldlt.factorize(kkt);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("kkt factorization failed");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  if (warm.has_value() && warm->primal.size() == n &&
      warm->dual_eq.size() == me && warm->dual_ineq.size() == mi) {
    x = s.d.cwiseInverse().cwiseProduct(warm->primal);
    Eigen::VectorXd y_unscaled(rows);
    y_unscaled.head(me) = warm->dual_eq;
    y_unscaled.tail(mi) = warm->dual_ineq;
    y = s.cost_scale * s.e.cwiseInverse().cwiseProduct(y_unscaled);
    z = (s.m * x).cwiseMax(s.lower).cwiseMin(s.upper);
  }

  QpSolution result;
  Eigen::VectorXd rhs(n + rows), sol(n + rows), z_tilde(rows), z_hat(rows);
  Eigen::VectorXd delta_x(n), delta_y(rows);
  Eigen::VectorXd x_prev(n), y_prev(rows);
  int infeasible_primal_streak = 0;
  int infeasible_dual_streak = 0;

  const auto unscaled_solution = [&](QpSolution& out) {
    out.primal = s.d.cwiseProduct(x);
    const Eigen::VectorXd y_unscaled = s.e.cwiseProduct(y) / s.cost_scale;
    out.dual_eq = y_unscaled.head(me);
    out.dual_ineq = y_unscaled.tail(mi).cwiseMax(0.0);
  };

  for (int iter = 1; iter <= settings.max_iterations; ++iter) {
    x_prev = x;
    y_prev = y;

    rhs.head(n) = kSigma * x - s.q;
    rhs.tail(rows) = z - y.cwiseQuotient(rho);
    sol = ldlt.solve(rhs);

    const auto x_tilde = sol.head(n);
    const auto nu = sol.tail(rows);
    z_tilde = z + (nu - y).cwiseQuotient(rho);

    x = kAlpha * x_tilde + (1.0 - kAlpha) * x;
    z_hat = kAlpha * z_tilde + (1.0 - kAlpha) * z;
    z = (z_hat + y.cwiseQuotient(rho)).cwiseMax(s.lower).cwiseMin(s.upper);
    y += rho.cwiseProduct(z_hat - z);

    if (iter % kCheckInterval != 0 && iter != settings.max_iterations) continue;

    // Termination and diagnostics on the unscaled problem.
    const Eigen::VectorXd x_u = s.d.cwiseProduct(x);
    const Eigen::VectorXd y_u = s.e.cwiseProduct(y) / s.cost_scale;
    const Eigen::VectorXd z_u = z.cwiseQuotient(s.e);
    const Eigen::VectorXd mx = rows > 0 ? Eigen::VectorXd(m * x_u) : Eigen::VectorXd(0);
    const double r_prim = rows > 0 ? (mx - z_u).cwiseAbs().maxCoeff() : 0.0;
    Eigen::VectorXd stationarity = qp.hessian * x_u + qp.gradient;
    if (rows > 0) stationarity += m.transpose() * y_u;
    const double r_dual = stationarity.cwiseAbs().maxCoeff();

    result.iterations = iter;
    result.primal_residual = r_prim;
    result.dual_residual = r_dual;

    if (r_prim <= settings.tolerance && r_dual <= settings.tolerance) {
      result.status = QpStatus::Solved;
      unscaled_solution(result);
      return result;
    }

    // Infeasibility certificates from the one-step differences, required on
    // two consecutive checks before declaring.
    delta_y = s.e.cwiseProduct(y - y_prev) / s.cost_scale;
    const double dy_norm = rows > 0 ? delta_y.cwiseAbs().maxCoeff() : 0.0;
    if (dy_norm > 1e-12) {
      bool certificate = (m.transpose() * delta_y).cwiseAbs().maxCoeff() <= kInfeasTol * dy_norm;
      double gap = 0.0;
      for (Eigen::Index i = 0; i < rows && certificate; ++i) {
        const double dyi = delta_y(i);
        if (dyi > 0.0) {
          if (!std::isfinite(upper(i))) {
            if (dyi > kInfeasTol * dy_norm) certificate = false;
          } else {
            gap += upper(i) * dyi;
          }
        } else if (dyi < 0.0) {
          if (!std::isfinite(lower(i))) {
            if (-dyi > kInfeasTol * dy_norm) certificate = false;
          } else {
            gap += lower(i) * dyi;
          }
        }
      }
      if (certificate && gap <= -kInfeasTol * dy_norm) {
        if (++infeasible_primal_streak >= 2) {
          result.status = QpStatus::PrimalInfeasible;
          unscaled_solution(result);
          return result;
        }
      } else {
        infeasible_primal_streak = 0;
      }
    }
    delta_x = s.d.cwiseProduct(x - x_prev);
    const double dx_norm = delta_x.cwiseAbs().maxCoeff();
    if (dx_norm > 1e-12) {
      bool certificate =
          (qp.hessian * delta_x).cwiseAbs().maxCoeff() <= kInfeasTol * dx_norm &&
          qp.gradient.dot(delta_x) <= -kInfeasTol * dx_norm;
      if (certificate && rows > 0) {
        const Eigen::VectorXd mdx = m * delta_x;
        for (Eigen::Index i = 0; i < rows && certificate; ++i) {
          const bool is_eq = i < me;
          if (is_eq ? std::abs(mdx(i)) > kInfeasTol * dx_norm
                    : mdx(i) > kInfeasTol * dx_norm) {
            certificate = false;
          }
        }
      }
      if (certificate) {
        if (++infeasible_dual_streak >= 2) {
          result.status = QpStatus::DualInfeasible;
          unscaled_solution(result);
          return result;
        }
      } else {
        infeasible_dual_streak = 0;
      }
    }

    // Residual balancing on the scaled problem.
    if (iter < settings.max_iterations && rows > 0) {
      const Eigen::VectorXd mxs = s.m * x;
      const double rp_s = (mxs - z).cwiseAbs().maxCoeff();
      const double rd_s = (s.p * x + s.q + s.m.transpose() * y).cwiseAbs().maxCoeff();
      const double rp_rel =
          rp_s / std::max({mxs.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff(), 1e-12});
      const double rd_rel = rd_s / std::max({(s.p * x).cwiseAbs().maxCoeff(),
                                             (s.m.transpose() * y).cwiseAbs().maxCoeff(),
                                             s.q.cwiseAbs().maxCoeff(), 1e-12});
      const double ratio = std::sqrt(rp_rel / std::max(rd_rel, 1e-18));
      const double rho_new = std::clamp(rho_bar * ratio, kRhoMin, kRhoMax);
      if (rho_new > 5.0 * rho_bar || rho_new < rho_bar / 5.0) {
        rho_bar = rho_new;
        fill_rho();
        kkt = build_kkt(s.p, s.m, rho, kSigma);
        ldlt.factorize(kkt);
        if (ldlt.info() != Eigen::Success) {
          throw std::runtime_error("kkt refactorization failed");
        }
      }
    }
  }

  result.status = QpStatus::MaxIterations;
  unscaled_solution(result);
  return result;
}

}  // namespace occnav
