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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <stdexcept>

#include "ttmpc/ocp.hpp"

using namespace ttmpc;

namespace {

Weights unit_weights() {
  return Weights(Eigen::Matrix4d::Identity(), Eigen::Matrix2d::Identity(),
                 Eigen::Matrix4d::Identity());
}

State state_from(const Eigen::Vector4d& v) {
  return State{v(0), v(1), v(2), v(3)};
}

}  // namespace

TEST_CASE("running cost is the weighted squared deviation") {
  const Weights w = unit_weights();
  const State x{1.0, -2.0, 0.3, 1.1};
  const Control u{0.1, -0.2};

  // Zero deviation costs nothing.
  CHECK(running_cost(x, u, x, u, w) == 0.0);

  // Unit state deviation against identity weights costs exactly one.
  State x_ref = x;
  x_ref.x2 -= 1.0;
  CHECK(running_cost(x, u, x_ref, u, w) == doctest::Approx(1.0));

  // Hand-evaluated quadratic form: Q=diag(2,0,0,0), deviation 3 in x2.
  // The raw overload accepts a singular Q; only Weights demands SPD.
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = 2.0;
  CHECK(running_cost(x, u, x_ref, u, q, Eigen::Matrix2d::Identity()) ==
        doctest::Approx(2.0));
  x_ref.x2 = x.x2 - 3.0;
  CHECK(running_cost(x, u, x_ref, u, q, Eigen::Matrix2d::Identity()) ==
        doctest::Approx(18.0));

  // Control deviation feeds through R.
  Control u_ref = u;
  u_ref.v -= 2.0;
  CHECK(running_cost(x, u, x, u_ref, w) == doctest::Approx(4.0));
}

TEST_CASE("terminal cost is the weighted squared deviation") {
  const State x{0.0, 0.0, 1.0, 0.0};
  const State at_ref = x;
  CHECK(terminal_cost(x, at_ref, unit_weights()) == 0.0);

  const State ref{0.0, 0.0, 0.0, 0.0};
  CHECK(terminal_cost(x, ref, Eigen::Matrix4d::Identity()) ==
        doctest::Approx(1.0));
  // P = 4I, deviation [1,1,0,0] -> 4 + 4 = 8.
  const State x2{1.0, 1.0, 0.0, 0.0};
  CHECK(terminal_cost(x2, ref, 4.0 * Eigen::Matrix4d::Identity()) ==
        doctest::Approx(8.0));
}

TEST_CASE("terminal error is the unwrapped 4-norm") {
  const State a{1.0, 2.0, 3.0, 4.0};
  CHECK(terminal_error(a, a) == 0.0);
  CHECK(terminal_error(State{3.0, 4.0, 0.0, 0.0}, State{0.0, 0.0, 0.0, 0.0}) ==
        doctest::Approx(5.0));
  CHECK(terminal_error(State{0.0, 0.0, 0.3, 0.4}, State{0.0, 0.0, 0.0, 0.0}) ==
        doctest::Approx(0.5));
  // Angles are deliberately not wrapped: a 2*pi heading difference counts.
  CHECK(terminal_error(State{0.0, 0.0, 0.0, 2.0 * M_PI},
                       State{0.0, 0.0, 0.0, 0.0}) ==
        doctest::Approx(2.0 * M_PI));
}

TEST_CASE("objective sums running costs and the terminal cost") {
  OcpProblem p;
  p.horizon = 2;
  p.weights = unit_weights();
  p.reference = {State{}};
  p.u_ref = Control{0.0, 0.0};

  Eigen::Matrix4Xd states = Eigen::Matrix4Xd::Zero(4, 3);
  Eigen::Matrix2Xd controls = Eigen::Matrix2Xd::Zero(2, 2);
  CHECK(objective(states, controls, p) == 0.0);

  // A single unit deviation at k=1 contributes exactly one.
  states(0, 1) = 1.0;
  CHECK(objective(states, controls, p) == doctest::Approx(1.0));

  // Random instance against an independent re-summation.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 4; ++i) states(i, k) = d(rng);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i) controls(i, k) = d(rng);
    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
      expected += states.col(k).squaredNorm();
      expected += controls.col(k).squaredNorm();
    }
    expected += states.col(2).squaredNorm();
    CHECK(objective(states, controls, p) == doctest::Approx(expected));
  }

  // Length mismatches are rejected.
  Eigen::Matrix2Xd wrong = Eigen::Matrix2Xd::Zero(2, 3);
  CHECK_THROWS_AS(objective(states, wrong, p), std::invalid_argument);
}

TEST_CASE("objective is invariant under planar translation") {
  OcpProblem p;
  p.horizon = 3;
  p.weights = Weights::diagonal(Eigen::Vector4d(5, 5, 1, 1),
                                Eigen::Vector2d(0.5, 0.05),
                                Eigen::Vector4d(50, 50, 10, 10));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  Eigen::Matrix4Xd states(4, 4);
  Eigen::Matrix2Xd controls(2, 3);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i) states(i, k) = d(rng);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 2; ++i) controls(i, k) = d(rng);
  p.reference = {state_from(Eigen::Vector4d(d(rng), d(rng), d(rng), d(rng)))};

  const double base = objective(states, controls, p);

  const Eigen::Vector2d shift(13.5, -4.25);
  Eigen::Matrix4Xd moved = states;
  moved.row(0).array() += shift.x();
  moved.row(1).array() += shift.y();
  OcpProblem moved_p = p;
  State ref = p.reference.front();
  ref.x2 += shift.x();
  ref.y2 += shift.y();
  moved_p.reference = {ref};

  CHECK(objective(moved, controls, moved_p) == doctest::Approx(base));
}

TEST_CASE("obstacle violation is the worst body-circle clearance") {
  VehicleParams params;  // l2 = 4, r_body = 1
  const Obstacle obs{Eigen::Vector2d(0.0, 10.0), 2.5, 0.5};

  // Facing -y: trailer circle at origin (clearance 10-4=6), hitch circle at
  // (0,-4) (clearance 14-4=10). The minimum wins.
  const State x{0.0, 0.0, 0.0, 0.0};
  CHECK(obstacle_violation(x, obs, params) == doctest::Approx(6.0));

  // Exactly on the clearance boundary.
  const Obstacle tight{Eigen::Vector2d(0.0, 4.0), 2.5, 0.5};
  CHECK(obstacle_violation(x, tight, params) == doctest::Approx(0.0));

  // Far away is comfortably positive.
  const Obstacle far_away{Eigen::Vector2d(1e6, 1e6), 2.5, 0.5};
  CHECK(obstacle_violation(x, far_away, params) > 1e5);

  // Monotone in obstacle distance along a ray.
  double prev = -1e300;
  for (double dist = 1.0; dist < 40.0; dist += 1.0) {
    const Obstacle o{Eigen::Vector2d(0.0, dist), 2.5, 0.5};
    const double c = obstacle_violation(x, o, params);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("weights demand symmetric positive definite matrices") {
  CHECK_THROWS_AS(Weights(Eigen::Matrix4d::Zero(), Eigen::Matrix2d::Identity(),
                          Eigen::Matrix4d::Identity()),
                  std::invalid_argument);
  Eigen::Matrix4d negative = Eigen::Matrix4d::Identity();
  negative(2, 2) = -1.0;
  CHECK_THROWS_AS(Weights(negative, Eigen::Matrix2d::Identity(),
                          Eigen::Matrix4d::Identity()),
                  std::invalid_argument);
  Eigen::Matrix4d asym = Eigen::Matrix4d::Identity();
  asym(0, 1) = 0.5;  // not symmetric
  CHECK_THROWS_AS(Weights(asym, Eigen::Matrix2d::Identity(),
                          Eigen::Matrix4d::Identity()),
                  std::invalid_argument);
  CHECK_NOTHROW(Weights::diagonal(Eigen::Vector4d(5, 5, 1, 1),
                                  Eigen::Vector2d(0.5, 0.05),
                                  Eigen::Vector4d(50, 50, 10, 10)));
  CHECK_THROWS_AS(Weights::diagonal(Eigen::Vector4d(5, 5, 0, 1),
                                    Eigen::Vector2d(0.5, 0.05),
                                    Eigen::Vector4d(50, 50, 10, 10)),
                  std::invalid_argument);
}

TEST_CASE("problem validation rejects malformed setups") {
  OcpProblem p;
  CHECK_NOTHROW(p.validate());

  OcpProblem bad = p;
  bad.horizon = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.control_lower = Eigen::Vector2d(0.3, -0.5);  // lower > upper
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.reference = {State{}, State{}};  // neither 1 nor horizon+1 entries
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.terminal_mode = TerminalMode::kBall;
  bad.terminal_ball_radius = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reference_at serves constant or per-step references") {
  OcpProblem p;
  p.horizon = 3;
  State target{1.0, 2.0, 0.0, 0.5};
  p.reference = {target};
  for (int k = 0; k <= 3; ++k) {
    CHECK(p.reference_at(k).x2 == target.x2);
    CHECK(p.reference_at(k).y2 == target.y2);
  }

  std::vector<State> seq;
  for (int k = 0; k <= 3; ++k) seq.push_back(State{double(k), 0.0, 0.0, 0.0});
  p.reference = seq;
  for (int k = 0; k <= 3; ++k) CHECK(p.reference_at(k).x2 == double(k));
}
