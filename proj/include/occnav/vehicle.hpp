#pragma once

#include <Eigen/Dense>

namespace occnav {

struct VehicleParams {
  double lf = 1.82;   // CoG to front axle [m]
  double lr = 1.0;    // CoG to rear axle [m]
  double width = 1.8;
  double ts = 0.1;    // sampling time [s]
};

/// Kinematic bicycle state: CoG position, heading, CoG speed.
/// The heading is kept unwrapped; consumers work on heading differences.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;
};

struct ControlInput {
  double delta = 0.0;  // steering angle [rad]
  double accel = 0.0;  // [m/s^2]
};

/// Exact affine expansion of the discrete model at one point:
/// next ≈ a·state + b·input + c, with equality at the expansion point.
struct LinearizedDynamics {
  Eigen::Matrix4d a;
  Eigen::Matrix<double, 4, 2> b;
  Eigen::Vector4d c;
};

/// Slip angle beta = atan(lr/(lf+lr) · tan(delta)); odd in delta.
/// Requires |delta| < pi/2, else throws std::domain_error.
double slip_angle(double delta, const VehicleParams& params);

/// One forward-Euler step of the kinematic bicycle model.
VehicleState step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params);

/// Analytic Jacobians of step() with the affine residual c chosen so the
/// expansion reproduces step() exactly at the linearization point.
LinearizedDynamics linearize(const VehicleState& state, const ControlInput& input,
                             const VehicleParams& params);

}  // namespace occnav
