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

#ifndef TTMPC_GUIDANCE_HPP_
#define TTMPC_GUIDANCE_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttmpc/ocp.hpp"
#include "ttmpc/vehicle_model.hpp"

namespace ttmpc {

// Sampled reference path for waypoint tracking. Heading entries are stored
// unwrapped: consecutive samples never jump by more than pi, so a tracker
// integrating its heading continuously can difference against them directly.
struct WaypointPath {
  std::vector<State> states;
  std::vector<double> arclength;  // cumulative, arclength[0] == 0
  bool closed = false;

  int size() const { return static_cast<int>(states.size()); }
  const State& operator[](int i) const {
    return states[static_cast<size_t>(i)];
  }
  // Closed paths include the implicit closing segment.
  double total_length() const;
  void validate() const;
};

struct GuidanceConfig {
  double lookahead = 3.0;   // meters ahead of the nearest waypoint
  double min_error = 0.01;  // freeze the target once tracking is this tight

  void validate() const;
};

// Builds a path from planar points. Per-sample heading comes from the local
// tangent (reversed when the vehicle is to traverse the path in reverse, so
// the reference matches a trailer that leads while backing); the hitch-angle
// reference is zero throughout. Headings are unwrapped along the path and
// the first sample is placed in the 2*pi band nearest to theta2_hint.
WaypointPath path_from_points(const std::vector<Eigen::Vector2d>& points,
                              bool closed, bool backward,
                              double theta2_hint = 0.0);

// Loads `x,y[,theta2]` lines (comments with '#'). When the third column is
// present it is used verbatim (then unwrapped); otherwise headings are
// derived as in path_from_points.
WaypointPath load_waypoints(const std::string& filename, bool closed,
                            bool backward);

// Index of the planar-closest sample; ties go to the lower index.
int nearest_waypoint(const WaypointPath& path, const State& x);

// Distance advanced along the path ahead of the nearest waypoint, growing
// from 0 toward L as the tracking error grows.
double lookahead_lambda(double lookahead, double error);

// The path sample at arclength(nearest) + lambda(error): wraps on closed
// paths, clamps to the final sample on open ones. The overload without an
// explicit error measures it against the nearest sample itself; the mission
// loop instead feeds the distance to its current target, which keeps the
// target leading the vehicle while it tracks well.
State select_target(const WaypointPath& path, const State& x,
                    const GuidanceConfig& config, double error);
State select_target(const WaypointPath& path, const State& x,
                    const GuidanceConfig& config);

// Carries the current tracking target between ticks. Seeded with a pose
// (typically the mission goal); each update measures the error against the
// carried target, re-selects it unless tracking is within min_error, and
// returns the target to hand to the planner.
class TargetTracker {
 public:
  TargetTracker(const WaypointPath& path, const GuidanceConfig& config,
                const State& seed);

  State update(const State& x);

  double last_error() const { return last_error_; }
  double last_lambda() const { return last_lambda_; }
  const State& target() const { return target_; }

 private:
  const WaypointPath& path_;
  GuidanceConfig config_;
  State target_;
  double last_error_ = 0.0;
  double last_lambda_ = 0.0;
};

// Detects completion of one lap around a closed path: the nearest-waypoint
// index must return to within 5 samples of where it started after more than
// 90% of the total arclength has been traversed.
class LapTracker {
 public:
  explicit LapTracker(const WaypointPath& path);

  void update(int nearest_index);
  bool completed() const { return completed_; }
  double traversed() const { return traversed_; }

 private:
  const WaypointPath& path_;
  int start_index_ = -1;
  int previous_index_ = -1;
  double traversed_ = 0.0;
  bool completed_ = false;
};

}  // namespace ttmpc

#endif  // TTMPC_GUIDANCE_HPP_
