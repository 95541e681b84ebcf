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

#ifndef TTMPC_HARNESS_HPP_
#define TTMPC_HARNESS_HPP_

#include <string>

#include "ttmpc/guidance.hpp"
#include "ttmpc/mission_log.hpp"
#include "ttmpc/planner.hpp"
#include "ttmpc/scenario.hpp"
#include "ttmpc/sim.hpp"

namespace ttmpc {

struct MissionOptions {
  double threshold = 0.05;  // stop once terminal_error drops below this
  int max_ticks = 0;        // 0 derives a cap from the mission distance
  GuidanceConfig guidance;  // path-following missions only
};

// Drive-to-pose loop (obstacle constraints, when present, live in the
// planner's problem template): sense, plan, apply the first control, repeat
// until the error threshold or the tick cap. The returned log carries one
// row per applied control plus a final snapshot row of the terminal state
// with a zero command.
MissionLog run_mission(MpcPlanner& planner, Simulator& plant,
                       const State& target, const MissionOptions& options);

// Waypoint-tracking loop: each tick the target slides along the path ahead
// of the nearest waypoint. Open paths stop on the error threshold against
// the final waypoint; closed paths stop on lap completion.
MissionLog run_path_following(MpcPlanner& planner, Simulator& plant,
                              const WaypointPath& path,
                              const MissionOptions& options);

// Builds planner, plant and (for path missions) the waypoint path from the
// scenario and runs the matching loop.
MissionLog run_scenario(const Scenario& scenario);

// Runs and writes mission.csv, timing.csv, summary.txt and plots/ under
// out_dir. Returns 0 on mission success, 1 on timeout.
int run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir);

// Worst derivative error over `points` random in-bounds decision vectors for
// the scenario's transcription, each built by rolling out uniformly drawn
// controls (multiple shooting adds a small state perturbation so the defect
// rows are exercised away from zero).
DerivativeCheck check_scenario_derivatives(const Scenario& scenario,
                                           int points = 5);

}  // namespace ttmpc

#endif  // TTMPC_HARNESS_HPP_
