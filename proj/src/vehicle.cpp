#include "occnav/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace occnav {

double slip_angle(double delta, const VehicleParams& params) {
  if (!(std::abs(delta) < M_PI / 2.0)) {
    throw std::domain_error("steering angle magnitude must be below pi/2");
  }
  const double ratio = params.lr / (params.lf + params.lr);
  return std::atan(ratio * std::tan(delta));
}

VehicleState step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params) {
  const double beta = slip_angle(input.delta, params);
  VehicleState next;
  next.x = state.x + state.v * std::cos(state.psi + beta) * params.ts;
  next.y = state.y + state.v * std::sin(state.psi + beta) * params.ts;
  next.psi = state.psi + state.v / params.lr * std::sin(beta) * params.ts;
  next.v = state.v + input.accel * params.ts;
  return next;
}

LinearizedDynamics linearize(const VehicleState& state, const ControlInput& input,
                             const VehicleParams& params) {
  const double beta = slip_angle(input.delta, params);
  const double ts = params.ts;
  const double c = std::cos(state.psi + beta);
  const double s = std::sin(state.psi + beta);

  LinearizedDynamics lin;
  lin.a = Eigen::Matrix4d::Identity();
  lin.a(0, 2) = -state.v * s * ts;
  lin.a(0, 3) = c * ts;
  lin.a(1, 2) = state.v * c * ts;
  lin.a(1, 3) = s * ts;
  lin.a(2, 3) = std::sin(beta) / params.lr * ts;

  // d beta / d delta for beta = atan(k·tan(delta))
  const double k = params.lr / (params.lf + params.lr);
  const double tan_d = std::tan(input.delta);
  const double sec2 = 1.0 + tan_d * tan_d;
  const double dbeta = k * sec2 / (1.0 + k * k * tan_d * tan_d);

  lin.b.setZero();
  lin.b(0, 0) = -state.v * s * ts * dbeta;
  lin.b(1, 0) = state.v * c * ts * dbeta;
  lin.b(2, 0) = state.v / params.lr * std::cos(beta) * ts * dbeta;
  lin.b(3, 1) = ts;

  const VehicleState next = step(state, input, params);
  const Eigen::Vector4d xi(state.x, state.y, state.psi, state.v);
  const Eigen::Vector2d u(input.delta, input.accel);
  lin.c = Eigen::Vector4d(next.x, next.y, next.psi, next.v) - lin.a * xi - lin.b * u;
  return lin;
}

}  // namespace occnav
