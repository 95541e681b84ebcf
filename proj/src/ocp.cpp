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

#include "ttmpc/ocp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace ttmpc {

namespace {

template <typename Mat>
void require_spd(const Mat& m, const char* name) {
  if (!m.isApprox(m.transpose(), 1e-12))
    throw std::invalid_argument(std::string("Weights: ") + name +
                                " is not symmetric");
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(std::string("Weights: ") + name +
                                " is not positive definite");
}

}  // namespace

Weights::Weights(const Eigen::Matrix4d& q_in, const Eigen::Matrix2d& r_in,
                 const Eigen::Matrix4d& p_in)
    : q(q_in), r(r_in), p(p_in) {
  require_spd(q, "Q");
  require_spd(r, "R");
  require_spd(p, "P");
}

Weights Weights::diagonal(const Eigen::Vector4d& q_diag,
                          const Eigen::Vector2d& r_diag,
                          const Eigen::Vector4d& p_diag) {
  return Weights(q_diag.asDiagonal(), r_diag.asDiagonal(),
                 p_diag.asDiagonal());
}

void OcpProblem::validate() const {
  if (horizon < 2)
    throw std::invalid_argument("OcpProblem: horizon must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("OcpProblem: dt must be > 0");
  params.validate();
  if (reference.size() != 1 &&
      reference.size() != static_cast<size_t>(horizon) + 1)
    throw std::invalid_argument(
        "OcpProblem: reference must hold 1 or horizon+1 states");
  if ((state_upper - state_lower).minCoeff() < 0.0 ||
      (control_upper - control_lower).minCoeff() < 0.0 ||
      (rate_upper - rate_lower).minCoeff() < 0.0)
    throw std::invalid_argument("OcpProblem: box bounds are inverted");
  if (state_mode == StateConstraintMode::kSoft && !(state_slack_weight > 0.0))
    throw std::invalid_argument(
        "OcpProblem: soft state constraints need a positive slack weight");
  if (terminal_mode == TerminalMode::kBall && !(terminal_ball_radius > 0.0))
    throw std::invalid_argument(
        "OcpProblem: terminal ball needs a positive radius");
}

const State& OcpProblem::reference_at(int k) const {
  if (reference.size() == 1) return reference.front();
  return reference.at(static_cast<size_t>(k));
}

double running_cost(const State& x, const Control& u, const State& x_ref,
                    const Control& u_ref, const Eigen::Matrix4d& q,
                    const Eigen::Matrix2d& r) {
  const Eigen::Vector4d dx = x.vec() - x_ref.vec();
  const Eigen::Vector2d du = u.vec() - u_ref.vec();
  return dx.dot(q * dx) + du.dot(r * du);
}

double running_cost(const State& x, const Control& u, const State& x_ref,
                    const Control& u_ref, const Weights& w) {
  return running_cost(x, u, x_ref, u_ref, w.q, w.r);
}

double terminal_cost(const State& x, const State& x_ref,
                     const Eigen::Matrix4d& p) {
  const Eigen::Vector4d dx = x.vec() - x_ref.vec();
  return dx.dot(p * dx);
}

double terminal_cost(const State& x, const State& x_ref, const Weights& w) {
  return terminal_cost(x, x_ref, w.p);
}

double objective(const Eigen::Matrix4Xd& states,
                 const Eigen::Matrix2Xd& controls, const OcpProblem& problem) {
  problem.validate();
  const int n = problem.horizon;
  if (states.cols() != n + 1)
    throw std::invalid_argument("objective: states must have horizon+1 cols");
  if (controls.cols() != n)
    throw std::invalid_argument("objective: controls must have horizon cols");

  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    total += running_cost(State::from_vec(states.col(k)),
                          Control::from_vec(controls.col(k)),
                          problem.reference_at(k), problem.u_ref,
                          problem.weights);
  }
  total += terminal_cost(State::from_vec(states.col(n)),
                         problem.reference_at(n), problem.weights);
  return total;
}

double obstacle_violation(const State& x, const Obstacle& obs,
                          const VehicleParams& params) {
  const BodyCircles body = body_circles(x, params);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : body.centers) {
    const double clearance =
        (c - obs.center).norm() - (obs.radius + body.radius + obs.r_safe);
    worst = std::min(worst, clearance);
  }
  return worst;
}

double terminal_error(const State& x, const State& target) {
  return (x.vec() - target.vec()).norm();
}

}  // namespace ttmpc
