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

#include "ttmpc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ttmpc {

void SimOptions::validate() const {
  if (substeps < 1)
    throw std::invalid_argument("SimOptions: substeps must be >= 1");
  if ((noise_std.array() < 0.0).any())
    throw std::invalid_argument("SimOptions: noise std must be >= 0");
  if (actuator_tau_v < 0.0 || actuator_tau_phi < 0.0)
    throw std::invalid_argument("SimOptions: lag time constants must be >= 0");
}

Simulator::Simulator(const VehicleParams& params, const State& initial,
                     const SimOptions& options)
    : params_(params), options_(options), state_(initial), rng_(options.seed) {
  params_.validate();
  options_.validate();
}

void Simulator::reset(const State& initial) {
  state_ = initial;
  actuator_ = Control{0.0, 0.0};
  sim_time_ = 0.0;
  wall_time_ = 0.0;
  rng_.seed(options_.seed);
}

State Simulator::apply(const Control& command, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("Simulator: dt must be > 0");
  const auto t0 = std::chrono::steady_clock::now();

  Control cmd = command;
  cmd.v = std::clamp(cmd.v, -params_.v_max, params_.v_max);
  cmd.phi = std::clamp(cmd.phi, -params_.phi_max, params_.phi_max);

  const double h = dt / options_.substeps;
  for (int i = 0; i < options_.substeps; ++i) {
    if (options_.actuator_tau_v > 0.0) {
      actuator_.v += (cmd.v - actuator_.v) *
                     (1.0 - std::exp(-h / options_.actuator_tau_v));
    } else {
      actuator_.v = cmd.v;
    }
    if (options_.actuator_tau_phi > 0.0) {
      actuator_.phi += (cmd.phi - actuator_.phi) *
                       (1.0 - std::exp(-h / options_.actuator_tau_phi));
    } else {
      actuator_.phi = cmd.phi;
    }

    state_ = step(state_, actuator_, params_, h, options_.integrator);

    if ((options_.noise_std.array() > 0.0).any()) {
      // Draw all four components every substep so the stream consumption is
      // independent of which components are enabled.
      Eigen::Vector4d noise;
      for (int j = 0; j < 4; ++j) noise(j) = gauss_(rng_);
      state_ = State::from_vec(state_.vec() +
                               options_.noise_std.cwiseProduct(noise));
    }
  }

  sim_time_ += dt;
  wall_time_ +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return state_;
}

double Simulator::real_time_factor() const {
  if (sim_time_ <= 0.0)
    throw std::logic_error("Simulator: no apply call recorded yet");
  return sim_time_ / std::max(wall_time_, 1e-12);
}

}  // namespace ttmpc
