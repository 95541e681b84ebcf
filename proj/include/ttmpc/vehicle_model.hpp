// Copyright 2026 The ttmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TTMPC_VEHICLE_MODEL_HPP
#define TTMPC_VEHICLE_MODEL_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "ttmpc/dual.hpp"

namespace ttmpc {

// Kinematic tractor-trailer model.
//
// State (tracked at the trailer axle midpoint S2):
//   x2, y2   trailer position [m]
//   theta1   hitch angle, tractor heading minus trailer heading [rad]
//   theta2   trailer heading, measured from the +y axis such that the
//            trailer's forward unit vector is (sin theta2, -cos theta2) [rad]
// Control:
//   v        longitudinal velocity [m/s]; sign(v) < 0 is reverse motion
//   phi      tractor steering angle [rad]
//
// With this convention theta2 = pi/2 faces +x and theta2 = 0 faces -y.

enum class ModelVariant {
  // Hitch-angle rate uses the trailer length under the steering term:
  //   d(theta1) = v * (sin(theta1) + tan(phi)) / l2
  kPaper,
  // Steering term scaled by the tractor wheelbase instead:
  //   d(theta1) = v * (sin(theta1) / l2 + tan(phi) / l1)
  kTwoLength,
};

enum class IntegratorKind { kEuler, kRk4 };

struct VehicleParams {
  double l1 = 1.9;          // tractor wheelbase [m]
  double l2 = 4.0;          // hitch-to-trailer-axle length [m]
  double width = 1.0;       // body width [m]
  double v_max = 0.2;       // speed magnitude limit [m/s]
  double phi_max = 0.5;     // steering limit [rad]
  double theta1_max = 0.7;  // hitch-angle (anti-jackknife) limit [rad]
  double dv_max = 0.05;     // per-sample velocity slew limit [m/s]
  double dphi_max = 0.1;    // per-sample steering slew limit [rad]
  double r_body = 1.0;      // collision circle radius [m]
  ModelVariant variant = ModelVariant::kPaper;

  void validate() const {
    if (!(l1 > 0.0) || !(l2 > 0.0) || !(width > 0.0) || !(r_body > 0.0))
      throw std::invalid_argument("VehicleParams: lengths must be positive");
    if (!(v_max > 0.0) || !(phi_max > 0.0) || !(theta1_max > 0.0) ||
        !(dv_max > 0.0) || !(dphi_max > 0.0))
      throw std::invalid_argument("VehicleParams: limits must be positive");
    if (!(phi_max < M_PI / 2.0))
      throw std::invalid_argument("VehicleParams: phi_max must be < pi/2");
  }
};

template <typename Scalar>
struct StateT {
  Scalar x2{}, y2{}, theta1{}, theta2{};

  Eigen::Matrix<Scalar, 4, 1> vec() const {
    return Eigen::Matrix<Scalar, 4, 1>(x2, y2, theta1, theta2);
  }
  static StateT from_vec(const Eigen::Matrix<Scalar, 4, 1>& v) {
    return StateT{v(0), v(1), v(2), v(3)};
  }
};

template <typename Scalar>
struct ControlT {
  Scalar v{}, phi{};

  Eigen::Matrix<Scalar, 2, 1> vec() const {
    return Eigen::Matrix<Scalar, 2, 1>(v, phi);
  }
  static ControlT from_vec(const Eigen::Matrix<Scalar, 2, 1>& u) {
    return ControlT{u(0), u(1)};
  }
};

using State = StateT<double>;
using Control = ControlT<double>;

namespace detail {
inline bool finite(double x) { return std::isfinite(x); }
template <int N>
bool finite(const Dual<N>& x) {
  return std::isfinite(x.value);
}
}  // namespace detail

// Continuous-time state derivative.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> dynamics(const StateT<Scalar>& x,
                                     const ControlT<Scalar>& u,
                                     const VehicleParams& p) {
  p.validate();
  if (!detail::finite(x.x2) || !detail::finite(x.y2) ||
      !detail::finite(x.theta1) || !detail::finite(x.theta2) ||
      !detail::finite(u.v) || !detail::finite(u.phi))
    throw std::invalid_argument("dynamics: non-finite state or control");

  const Scalar c1 = cos(x.theta1);
  const Scalar s1 = sin(x.theta1);
  Eigen::Matrix<Scalar, 4, 1> dx;
  dx(0) = u.v * c1 * sin(x.theta2);
  dx(1) = -(u.v * c1 * cos(x.theta2));
  if (p.variant == ModelVariant::kPaper) {
    dx(2) = u.v * (s1 + tan(u.phi)) / p.l2;
  } else {
    dx(2) = u.v * (s1 / p.l2 + tan(u.phi) / p.l1);
  }
  dx(3) = u.v * s1 / p.l2;
  return dx;
}

template <typename Scalar>
StateT<Scalar> step_euler(const StateT<Scalar>& x, const ControlT<Scalar>& u,
                          const VehicleParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_euler: dt must be > 0");
  const auto dx = dynamics(x, u, p);
  return StateT<Scalar>::from_vec(x.vec() + dt * dx);
}

template <typename Scalar>
StateT<Scalar> step_rk4(const StateT<Scalar>& x, const ControlT<Scalar>& u,
                        const VehicleParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be > 0");
  using Vec = Eigen::Matrix<Scalar, 4, 1>;
  const Vec x0 = x.vec();
  const Vec k1 = dynamics(x, u, p);
  const Vec k2 = dynamics(StateT<Scalar>::from_vec(x0 + (dt / 2.0) * k1), u, p);
  const Vec k3 = dynamics(StateT<Scalar>::from_vec(x0 + (dt / 2.0) * k2), u, p);
  const Vec k4 = dynamics(StateT<Scalar>::from_vec(x0 + dt * k3), u, p);
  return StateT<Scalar>::from_vec(x0 +
                                  (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

template <typename Scalar>
StateT<Scalar> step(const StateT<Scalar>& x, const ControlT<Scalar>& u,
                    const VehicleParams& p, double dt, IntegratorKind kind) {
  return kind == IntegratorKind::kEuler ? step_euler(x, u, p, dt)
                                        : step_rk4(x, u, p, dt);
}

// One-step Jacobian of the discrete map w.r.t. state (A, 4x4) and control
// (B, 4x2), evaluated with dual numbers so it stays exact for either
// integrator and either model variant.
struct StepJacobian {
  State next;
  Eigen::Matrix4d a;
  Eigen::Matrix<double, 4, 2> b;
};

inline StepJacobian step_with_jacobian(const State& x, const Control& u,
                                       const VehicleParams& p, double dt,
                                       IntegratorKind kind) {
  using D6 = Dual<6>;
  StateT<D6> xd{D6::seeded(x.x2, 0), D6::seeded(x.y2, 1),
                D6::seeded(x.theta1, 2), D6::seeded(x.theta2, 3)};
  ControlT<D6> ud{D6::seeded(u.v, 4), D6::seeded(u.phi, 5)};
  const StateT<D6> next = step(xd, ud, p, dt, kind);

  StepJacobian out;
  const std::array<const D6*, 4> rows = {&next.x2, &next.y2, &next.theta1,
                                         &next.theta2};
  for (int i = 0; i < 4; ++i) {
    out.a.row(i) = rows[i]->grad.head<4>().transpose();
    out.b.row(i) = rows[i]->grad.tail<2>().transpose();
  }
  out.next = State{next.x2.value, next.y2.value, next.theta1.value,
                   next.theta2.value};
  return out;
}

// Outer-wheel steering angle for an inner-wheel angle under an ideal
// Ackermann linkage: cot(phi_o) = cot(phi_i) + track_width / wheelbase.
inline double ackermann_outer(double phi_inner, double track_width,
                              double wheelbase) {
  if (!(phi_inner > 0.0) || !(phi_inner < M_PI / 2.0))
    throw std::invalid_argument("ackermann_outer: phi_inner outside (0, pi/2)");
  if (!(track_width >= 0.0) || !(wheelbase > 0.0))
    throw std::invalid_argument("ackermann_outer: invalid geometry");
  const double cot_outer = 1.0 / std::tan(phi_inner) + track_width / wheelbase;
  return std::atan(1.0 / cot_outer);
}

// Hitch-adjacent reference point: one trailer length ahead of S2 along the
// trailer's forward direction.
inline Eigen::Vector2d hitch_point(const State& x, double l2) {
  return Eigen::Vector2d(x.x2 + l2 * std::sin(x.theta2),
                         x.y2 - l2 * std::cos(x.theta2));
}

// Two collision circles of radius r_body: one at the trailer axle, one at the
// hitch point.
struct BodyCircles {
  std::array<Eigen::Vector2d, 2> centers;
  double radius = 0.0;
};

inline BodyCircles body_circles(const State& x, const VehicleParams& p) {
  p.validate();
  return BodyCircles{{Eigen::Vector2d(x.x2, x.y2), hitch_point(x, p.l2)},
                     p.r_body};
}

}  // namespace ttmpc

#endif  // TTMPC_VEHICLE_MODEL_HPP
