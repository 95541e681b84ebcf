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

#ifndef TTMPC_SIM_HPP_
#define TTMPC_SIM_HPP_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "ttmpc/vehicle_model.hpp"

namespace ttmpc {

// Plant stand-in for closed-loop runs. By default it integrates with RK4 and
// several substeps per control period, which deliberately differs from the
// planner's one-step Euler prediction so the loop is exercised against model
// mismatch. Optional per-substep Gaussian state noise and first-order
// actuator lag are available; both default to off.
struct SimOptions {
  IntegratorKind integrator = IntegratorKind::kRk4;
  int substeps = 5;
  Eigen::Vector4d noise_std = Eigen::Vector4d::Zero();  // per substep
  double actuator_tau_v = 0.0;    // time constants, 0 means ideal actuator
  double actuator_tau_phi = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

class Simulator {
 public:
  Simulator(const VehicleParams& params, const State& initial,
            const SimOptions& options = SimOptions{});

  // Advances the true state by dt under the commanded control and returns
  // the new measured state. Commands are clamped to the physical actuator
  // range before integration.
  State apply(const Control& command, double dt);

  void reset(const State& initial);

  const State& state() const { return state_; }
  Control actuator() const { return actuator_; }
  double sim_time() const { return sim_time_; }
  // Simulated seconds per wall-clock second, accumulated over apply calls.
  double real_time_factor() const;

 private:
  VehicleParams params_;
  SimOptions options_;
  State state_;
  Control actuator_{0.0, 0.0};
  double sim_time_ = 0.0;
  double wall_time_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace ttmpc

#endif  // TTMPC_SIM_HPP_
