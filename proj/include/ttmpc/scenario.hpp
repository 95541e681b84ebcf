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

#ifndef TTMPC_SCENARIO_HPP_
#define TTMPC_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ttmpc/guidance.hpp"
#include "ttmpc/ocp.hpp"
#include "ttmpc/planner.hpp"
#include "ttmpc/sim.hpp"

namespace ttmpc {

enum class MissionKind { kDriveToPose, kPathFollow, kObstacleAvoid };

const char* to_string(MissionKind kind);

// A complete benchmark description: vehicle, horizon, weights, bounds,
// mission geometry and plant settings. Loaded from a sectioned key = value
// text file; see scenarios/ for the documented schema.
struct Scenario {
  std::string name;
  MissionKind kind = MissionKind::kDriveToPose;
  bool backward = false;

  State initial{};
  State target{};             // drive-to-pose / obstacle-avoid missions
  bool has_target = false;
  std::string waypoint_file;  // path-follow missions, relative to the file
  bool path_closed = false;
  GuidanceConfig guidance;

  double threshold = 0.05;  // stop once terminal_error falls below this
  int max_ticks = 0;        // 0 picks a default from the mission distance
  std::uint64_t seed = 0;

  VehicleParams params;
  int horizon = 60;
  double dt = 0.2;
  IntegratorKind prediction_integrator = IntegratorKind::kEuler;

  Weights weights = Weights::diagonal(Eigen::Vector4d(5, 5, 1, 1),
                                      Eigen::Vector2d(0.5, 0.05),
                                      Eigen::Vector4d(50, 50, 10, 10));
  Eigen::Vector4d state_lower;
  Eigen::Vector4d state_upper;
  Eigen::Vector2d control_lower;
  Eigen::Vector2d control_upper;
  StateConstraintMode state_mode = StateConstraintMode::kSoft;
  double state_slack_weight = 1e4;

  std::vector<Obstacle> obstacles;
  PlannerConfig planner;
  SimOptions plant;

  Scenario();

  // Assembles the per-tick OCP template this scenario describes.
  OcpProblem make_problem() const;
  void validate() const;

  bool operator==(const Scenario& other) const;
};

// Parses a scenario file. Schema violations raise std::runtime_error with
// "file:line: field: reason" messages. Relative waypoint paths are resolved
// against the scenario file's directory.
Scenario load_scenario(const std::string& filename);

// Parses scenario text; `origin` names the source in error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin);

// Emits text that load_scenario parses back to an equal structure.
std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& filename);

}  // namespace ttmpc

#endif  // TTMPC_SCENARIO_HPP_
