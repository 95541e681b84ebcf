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

#ifndef TTMPC_MISSION_LOG_HPP_
#define TTMPC_MISSION_LOG_HPP_

#include <string>
#include <vector>

#include "ttmpc/guidance.hpp"
#include "ttmpc/nlp.hpp"
#include "ttmpc/vehicle_model.hpp"

namespace ttmpc {

// One closed-loop tick: the state measured before planning, the command that
// was applied, and the solver diagnostics of that plan.
struct TickRecord {
  int tick = 0;
  double t = 0.0;
  State state{};
  Control command{0.0, 0.0};
  double error = 0.0;          // full-state distance to the stop target
  double path_error = 0.0;     // planar distance to the path; NaN if no path
  double min_clearance = 0.0;  // worst obstacle clearance; +inf if none
  const char* status = "optimal";
  bool fallback = false;
  int iterations = 0;
  int outer_iterations = 0;
  double kkt = 0.0;
  double max_defect = 0.0;
  double objective = 0.0;
  double solve_time_s = 0.0;  // wall clock; written to timing.csv only
};

struct MissionSummary {
  std::string scenario;
  std::string kind;
  bool completed = false;
  int ticks = 0;
  double final_error = 0.0;
  double max_path_error = 0.0;
  double rmse_path_error = 0.0;
  double min_clearance = 0.0;
  double max_abs_theta1 = 0.0;
  double mean_solve_time_s = 0.0;
  double max_solve_time_s = 0.0;
  double total_wall_time_s = 0.0;
  double sim_time_s = 0.0;
  double real_time_factor = 0.0;
  long total_iterations = 0;
  int fallback_ticks = 0;
};

struct MissionLog {
  std::string scenario_name;
  std::string kind;
  bool completed = false;
  std::vector<TickRecord> ticks;
  double wall_time_s = 0.0;
  double sim_time_s = 0.0;

  // Recomputed from the rows every time, so it can never drift from them.
  MissionSummary summary() const;
};

// Everything except wall-clock columns; two runs of the same scenario and
// seed produce byte-identical files.
void write_mission_csv(const MissionLog& log, const std::string& filename);
// Wall-clock per-tick solve times, kept apart so determinism checks can
// ignore them.
void write_timing_csv(const MissionLog& log, const std::string& filename);
void write_summary(const MissionSummary& summary, const std::string& filename);
// Plot-ready series (trajectory, controls, hitch angle, error vs tick) under
// dir; the reference path is included when given.
void write_plot_series(const MissionLog& log, const WaypointPath* path,
                       const std::string& dir);

// Writes all of the above under dir: mission.csv, timing.csv, summary.txt
// and plots/.
void write_mission_artifacts(const MissionLog& log, const WaypointPath* path,
                             const std::string& dir);

// Reads mission.csv + timing.csv + summary.txt back from an output
// directory, sufficient for comparisons (wall-clock fields come from
// timing.csv).
MissionLog read_mission_artifacts(const std::string& dir);

// Side-by-side metric report for two runs of the same scenario; throws
// std::invalid_argument when the scenario names differ.
std::string compare_report(const MissionLog& a, const MissionLog& b);

}  // namespace ttmpc

#endif  // TTMPC_MISSION_LOG_HPP_
