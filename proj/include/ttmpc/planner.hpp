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

#ifndef TTMPC_PLANNER_HPP_
#define TTMPC_PLANNER_HPP_

#include <vector>

#include "ttmpc/nlp.hpp"
#include "ttmpc/ocp.hpp"
#include "ttmpc/transcription.hpp"

namespace ttmpc {

struct PlannerConfig {
  SolverOptions solver;
  ShootingKind shooting = ShootingKind::kMultiple;
  bool warm_start = true;
  // Extra clearance requested from the optimizer on top of each obstacle's
  // own safety radius. Absorbs the gap between the prediction model and the
  // plant so the executed trajectory stays outside the true keep-out ring.
  double obstacle_margin = 0.02;
};

// One receding-horizon planning step.
struct PlanResult {
  Control applied{0.0, 0.0};
  Trajectory predicted;  // states are the solver's (or rolled out for single)
  SolveStatus status = SolveStatus::kMaxIterations;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;
  double max_defect = 0.0;  // worst dynamics gap in the returned plan
  int iterations = 0;
  int outer_iterations = 0;
  double solve_time_s = 0.0;
  bool fallback = false;  // solver output rejected, safe stop applied
};

// Stateful wrapper that re-solves the fixed-structure OCP each tick, shifting
// the previous primal and dual solution forward one interval as the warm
// start. The problem given at construction acts as the template: horizon,
// weights, bounds and obstacles stay fixed while x0, u_prev and the
// reference are refreshed per tick.
class MpcPlanner {
 public:
  MpcPlanner(const OcpProblem& problem, const PlannerConfig& config);

  // Plans from the measured state toward the template's reference.
  PlanResult plan(const State& current);
  // Same, but retargets the reference first (size 1 or horizon+1).
  PlanResult plan(const State& current, const std::vector<State>& reference);

  // Drops warm-start memory and the applied-control history.
  void reset();

  const OcpProblem& problem() const { return template_; }
  const PlannerConfig& config() const { return config_; }
  Control last_applied() const { return last_applied_; }

 private:
  PlanResult solve_once();

  OcpProblem template_;
  PlannerConfig config_;
  bool have_previous_ = false;
  Eigen::VectorXd previous_w_;
  Multipliers previous_duals_;
  Control last_applied_{0.0, 0.0};
};

}  // namespace ttmpc

#endif  // TTMPC_PLANNER_HPP_
