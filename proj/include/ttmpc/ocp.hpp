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

#ifndef TTMPC_OCP_HPP
#define TTMPC_OCP_HPP

#include <vector>

#include <Eigen/Core>

#include "ttmpc/vehicle_model.hpp"

namespace ttmpc {

// Quadratic stage/terminal weights. All three must be symmetric positive
// definite; checked once at construction via Cholesky.
struct Weights {
  Eigen::Matrix4d q;
  Eigen::Matrix2d r;
  Eigen::Matrix4d p;

  Weights(const Eigen::Matrix4d& q_in, const Eigen::Matrix2d& r_in,
          const Eigen::Matrix4d& p_in);

  static Weights diagonal(const Eigen::Vector4d& q_diag,
                          const Eigen::Vector2d& r_diag,
                          const Eigen::Vector4d& p_diag);
};

struct Obstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;  // physical radius [m]
  double r_safe = 0.0;  // extra safety margin [m]
};

enum class TerminalMode { kCostOnly, kEquality, kBall };
enum class StateConstraintMode { kSoft, kHard };

// Finite-horizon optimal control problem over the tractor-trailer model.
// The reference is either a single target pose (held constant across the
// horizon) or a full per-step sequence of horizon+1 states.
struct OcpProblem {
  int horizon = 60;
  double dt = 0.2;
  VehicleParams params;
  Weights weights = Weights::diagonal(Eigen::Vector4d(5, 5, 1, 1),
                                      Eigen::Vector2d(0.5, 0.05),
                                      Eigen::Vector4d(50, 50, 10, 10));
  State x0;
  std::vector<State> reference = {State{}};
  Control u_ref{0.0, 0.0};
  Control u_prev{0.0, 0.0};  // last applied control, anchors the k=0 slew

  Eigen::Vector4d state_lower =
      Eigen::Vector4d(-1e20, -1e20, -0.7, -1e20);
  Eigen::Vector4d state_upper = Eigen::Vector4d(1e20, 1e20, 0.7, 1e20);
  Eigen::Vector2d control_lower = Eigen::Vector2d(0.0, -0.5);
  Eigen::Vector2d control_upper = Eigen::Vector2d(0.2, 0.5);
  Eigen::Vector2d rate_lower = Eigen::Vector2d(-0.05, -0.1);
  Eigen::Vector2d rate_upper = Eigen::Vector2d(0.05, 0.1);

  std::vector<Obstacle> obstacles;
  StateConstraintMode state_mode = StateConstraintMode::kSoft;
  double state_slack_weight = 1e4;
  TerminalMode terminal_mode = TerminalMode::kCostOnly;
  double terminal_ball_radius = 0.0;
  IntegratorKind integrator = IntegratorKind::kEuler;

  void validate() const;
  const State& reference_at(int k) const;
};

// Quadratic deviation costs. The raw-matrix overloads are the primitive;
// the Weights overloads forward to them.
double running_cost(const State& x, const Control& u, const State& x_ref,
                    const Control& u_ref, const Eigen::Matrix4d& q,
                    const Eigen::Matrix2d& r);
double running_cost(const State& x, const Control& u, const State& x_ref,
                    const Control& u_ref, const Weights& w);
double terminal_cost(const State& x, const State& x_ref,
                     const Eigen::Matrix4d& p);
double terminal_cost(const State& x, const State& x_ref, const Weights& w);

// Discrete objective: sum of running costs over k = 0..horizon-1 plus the
// terminal cost at k = horizon. states has horizon+1 columns, controls has
// horizon columns.
double objective(const Eigen::Matrix4Xd& states,
                 const Eigen::Matrix2Xd& controls, const OcpProblem& problem);

// Signed clearance of the vehicle's collision circles against one obstacle:
// min over both circles of dist(center, obstacle) - (radius + r_body +
// r_safe). Negative means violation.
double obstacle_violation(const State& x, const Obstacle& obs,
                          const VehicleParams& params);

// Euclidean norm of the raw 4-component state difference. Angles are
// deliberately not wrapped.
double terminal_error(const State& x, const State& target);

}  // namespace ttmpc

#endif  // TTMPC_OCP_HPP
