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

#include "ttmpc/guidance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ttmpc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Shifts `angle` by whole turns until it lies within pi of `anchor`.
double unwrap_near(double angle, double anchor) {
  return angle + kTwoPi * std::round((anchor - angle) / kTwoPi);
}

// Heading whose forward direction (sin, -cos) equals the given tangent.
double heading_from_tangent(const Eigen::Vector2d& tangent) {
  return std::atan2(tangent.x(), -tangent.y());
}

}  // namespace

double WaypointPath::total_length() const {
  if (arclength.empty()) return 0.0;
  double len = arclength.back();
  if (closed && states.size() >= 2) {
    const Eigen::Vector2d first(states.front().x2, states.front().y2);
    const Eigen::Vector2d last(states.back().x2, states.back().y2);
    len += (first - last).norm();
  }
  return len;
}

void WaypointPath::validate() const {
  if (states.size() < 2)
    throw std::invalid_argument("WaypointPath: need at least 2 samples");
  if (arclength.size() != states.size())
    throw std::invalid_argument(
        "WaypointPath: arclength and states must have equal length");
  if (arclength.front() != 0.0)
    throw std::invalid_argument("WaypointPath: arclength must start at 0");
  for (size_t i = 1; i < states.size(); ++i) {
    if (!(arclength[i] > arclength[i - 1]))
      throw std::invalid_argument(
          "WaypointPath: arclength must be strictly increasing");
  }
}

void GuidanceConfig::validate() const {
  if (!(lookahead > 0.0))
    throw std::invalid_argument("GuidanceConfig: lookahead must be > 0");
  if (min_error < 0.0)
    throw std::invalid_argument("GuidanceConfig: min_error must be >= 0");
}

WaypointPath path_from_points(const std::vector<Eigen::Vector2d>& points,
                              bool closed, bool backward, double theta2_hint) {
  const int n = static_cast<int>(points.size());
  if (n < 2)
    throw std::invalid_argument("path_from_points: need at least 2 points");

  WaypointPath path;
  path.closed = closed;
  path.states.resize(static_cast<size_t>(n));
  path.arclength.resize(static_cast<size_t>(n));

  path.arclength[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    const double ds =
        (points[static_cast<size_t>(i)] - points[static_cast<size_t>(i - 1)])
            .norm();
    if (!(ds > 0.0))
      throw std::invalid_argument(
          "path_from_points: consecutive points must be distinct");
    path.arclength[static_cast<size_t>(i)] =
        path.arclength[static_cast<size_t>(i - 1)] + ds;
  }

  auto point = [&](int i) {
    return points[static_cast<size_t>(((i % n) + n) % n)];
  };
  double previous = theta2_hint;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector2d tangent;
    if (closed) {
      tangent = point(i + 1) - point(i - 1);
    } else if (i == 0) {
      tangent = point(1) - point(0);
    } else if (i == n - 1) {
      tangent = point(n - 1) - point(n - 2);
    } else {
      tangent = point(i + 1) - point(i - 1);
    }
    if (tangent.norm() <= 0.0)
      throw std::invalid_argument("path_from_points: degenerate tangent");
    if (backward) tangent = -tangent;

    State s;
    s.x2 = point(i).x();
    s.y2 = point(i).y();
    s.theta1 = 0.0;
    s.theta2 = unwrap_near(heading_from_tangent(tangent), previous);
    previous = s.theta2;
    path.states[static_cast<size_t>(i)] = s;
  }
  path.validate();
  return path;
}

WaypointPath load_waypoints(const std::string& filename, bool closed,
                            bool backward) {
  std::ifstream in(filename);
  if (!in)
    throw std::runtime_error("load_waypoints: cannot open " + filename);

  std::vector<Eigen::Vector2d> points;
  std::vector<double> headings;
  bool any_heading = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Trim; blank lines are allowed anywhere.
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
    while (!line.empty() && is_space(line.back())) line.pop_back();
    size_t start = 0;
    while (start < line.size() && is_space(line[start])) ++start;
    if (start >= line.size()) continue;

    std::stringstream ss(line.substr(start));
    std::string field;
    std::vector<double> values;
    while (std::getline(ss, field, ',')) {
      try {
        size_t used = 0;
        values.push_back(std::stod(field, &used));
        while (used < field.size() && is_space(field[used])) ++used;
        if (used != field.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(filename + ":" + std::to_string(line_no) +
                                 ": not a number: '" + field + "'");
      }
    }
    if (values.size() != 2 && values.size() != 3)
      throw std::runtime_error(filename + ":" + std::to_string(line_no) +
                               ": expected x,y or x,y,theta2");
    if (!points.empty() && any_heading != (values.size() == 3))
      throw std::runtime_error(filename + ":" + std::to_string(line_no) +
                               ": mixed 2- and 3-column rows");
    any_heading = values.size() == 3;
    points.emplace_back(values[0], values[1]);
    if (any_heading) headings.push_back(values[2]);
  }
  if (points.size() < 2)
    throw std::runtime_error("load_waypoints: " + filename +
                             " has fewer than 2 waypoints");

  if (!any_heading) return path_from_points(points, closed, backward);

  WaypointPath path = path_from_points(points, closed, backward, headings[0]);
  // File headings win over the derived ones; unwrap along the sequence.
  double previous = headings[0];
  for (size_t i = 0; i < path.states.size(); ++i) {
    path.states[i].theta2 = unwrap_near(headings[i], previous);
    previous = path.states[i].theta2;
  }
  return path;
}

int nearest_waypoint(const WaypointPath& path, const State& x) {
  if (path.states.empty())
    throw std::invalid_argument("nearest_waypoint: empty path");
  const Eigen::Vector2d p(x.x2, x.y2);
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < path.size(); ++i) {
    const Eigen::Vector2d q(path[i].x2, path[i].y2);
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double lookahead_lambda(double lookahead, double error) {
  if (!(lookahead > 0.0))
    throw std::invalid_argument("lookahead_lambda: lookahead must be > 0");
  if (error < 0.0)
    throw std::invalid_argument("lookahead_lambda: error must be >= 0");
  return lookahead - lookahead / (1.0 + error);
}

State select_target(const WaypointPath& path, const State& x,
                    const GuidanceConfig& config, double error) {
  path.validate();
  config.validate();
  const int np = nearest_waypoint(path, x);
  const double lambda = lookahead_lambda(config.lookahead, error);
  double target_arc = path.arclength[static_cast<size_t>(np)] + lambda;

  if (path.closed) {
    const double total = path.total_length();
    target_arc = std::fmod(target_arc, total);
    // Offsets landing in the closing segment wrap to the path start.
    if (target_arc > path.arclength.back()) return path[0];
  } else if (target_arc >= path.arclength.back()) {
    return path[path.size() - 1];
  }

  const auto it = std::lower_bound(path.arclength.begin(),
                                   path.arclength.end(), target_arc);
  return path[static_cast<int>(it - path.arclength.begin())];
}

State select_target(const WaypointPath& path, const State& x,
                    const GuidanceConfig& config) {
  const int np = nearest_waypoint(path, x);
  return select_target(path, x, config, terminal_error(x, path[np]));
}

TargetTracker::TargetTracker(const WaypointPath& path,
                             const GuidanceConfig& config, const State& seed)
    : path_(path), config_(config), target_(seed) {
  path_.validate();
  config_.validate();
}

State TargetTracker::update(const State& x) {
  last_error_ = terminal_error(x, target_);
  if (last_error_ > config_.min_error) {
    last_lambda_ = lookahead_lambda(config_.lookahead, last_error_);
    target_ = select_target(path_, x, config_, last_error_);
  }
  return target_;
}

LapTracker::LapTracker(const WaypointPath& path) : path_(path) {
  path_.validate();
}

void LapTracker::update(int nearest_index) {
  if (nearest_index < 0 || nearest_index >= path_.size())
    throw std::invalid_argument("LapTracker: index out of range");
  if (start_index_ < 0) {
    start_index_ = nearest_index;
    previous_index_ = nearest_index;
    return;
  }
  const double total = path_.total_length();
  double delta = path_.arclength[static_cast<size_t>(nearest_index)] -
                 path_.arclength[static_cast<size_t>(previous_index_)];
  if (path_.closed) {
    // Signed wrap into (-total/2, total/2] so small backward jitter does not
    // register as nearly a full forward lap.
    while (delta > 0.5 * total) delta -= total;
    while (delta <= -0.5 * total) delta += total;
  }
  traversed_ += delta;
  previous_index_ = nearest_index;

  const int n = path_.size();
  const int gap = std::abs(nearest_index - start_index_);
  const int circular_gap = path_.closed ? std::min(gap, n - gap) : gap;
  if (traversed_ > 0.9 * total && circular_gap <= 5) completed_ = true;
}

}  // namespace ttmpc
