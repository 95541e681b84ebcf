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

#include "ttmpc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ttmpc/nlp.hpp"
#include "ttmpc/transcription.hpp"

namespace ttmpc {

namespace {

double clearance_at(const State& x, const OcpProblem& problem) {
  double worst = std::numeric_limits<double>::infinity();
  for (const Obstacle& obs : problem.obstacles)
    worst = std::min(worst, obstacle_violation(x, obs, problem.params));
  return worst;
}

int default_max_ticks(double distance, const OcpProblem& problem) {
  const double per_tick = problem.params.v_max * problem.dt;
  return std::max(1, static_cast<int>(std::ceil(4.0 * distance / per_tick)));
}

TickRecord make_record(int tick, double t, const State& x,
                       const PlanResult& res, double error, double path_error,
                       double clearance) {
  TickRecord r;
  r.tick = tick;
  r.t = t;
  r.state = x;
  r.command = res.applied;
  r.error = error;
  r.path_error = path_error;
  r.min_clearance = clearance;
  r.status = to_string(res.status);
  r.fallback = res.fallback;
  r.iterations = res.iterations;
  r.outer_iterations = res.outer_iterations;
  r.kkt = res.kkt_residual;
  r.max_defect = res.max_defect;
  r.objective = res.objective_value;
  r.solve_time_s = res.solve_time_s;
  return r;
}

TickRecord terminal_snapshot(int tick, double t, const State& x, double error,
                             double path_error, double clearance) {
  TickRecord r;
  r.tick = tick;
  r.t = t;
  r.state = x;
  r.command = Control{0.0, 0.0};
  r.error = error;
  r.path_error = path_error;
  r.min_clearance = clearance;
  r.status = to_string(SolveStatus::kOptimal);
  return r;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Path sample at a given arclength, wrapping on closed paths and clamping to
// the final sample on open ones (the same rule target selection uses).
const State& sample_at(const WaypointPath& path, double arc) {
  if (path.closed) {
    arc = std::fmod(arc, path.total_length());
    if (arc > path.arclength.back()) return path[0];
  } else if (arc >= path.arclength.back()) {
    return path[path.size() - 1];
  }
  const auto it =
      std::lower_bound(path.arclength.begin(), path.arclength.end(), arc);
  return path[static_cast<int>(it - path.arclength.begin())];
}

// Arclength speed the trailer axle can sustain at a given path curvature:
// cornering at trailer-path curvature kappa needs a steady hitch angle of
// atan(l2 * kappa), and the axle advances by cos(theta1) of the tractor
// speed. A reference marching faster than this runs away from the vehicle in
// corners and drags it off the path.
double sustainable_speed(const WaypointPath& path, double arc,
                         const OcpProblem& problem) {
  const auto it =
      std::lower_bound(path.arclength.begin(), path.arclength.end(), arc);
  int i = static_cast<int>(it - path.arclength.begin());
  i = std::min(std::max(i, 0), path.size() - 2);
  const double ds = path.arclength[static_cast<size_t>(i) + 1] -
                    path.arclength[static_cast<size_t>(i)];
  const double kappa =
      std::abs(path[i + 1].theta2 - path[i].theta2) / std::max(ds, 1e-12);
  const double theta1 = std::atan(problem.params.l2 * kappa);
  return problem.params.v_max * std::cos(theta1);
}

// Reference trajectory for one planning round: starts at the vehicle's
// nearest sample and marches along the path at the locally sustainable speed
// until it reaches the tracking target, where it stays for the remaining
// nodes. A single repeated target gives the stage cost no opinion about
// deviations from the path between the vehicle and that point; marching the
// intermediate references removes the lateral drift that allows.
std::vector<State> path_references(const WaypointPath& path, int np,
                                   const State& target, const State& x,
                                   const OcpProblem& problem) {
  double arc = path.arclength[static_cast<size_t>(np)];
  double arc_target =
      path.arclength[static_cast<size_t>(nearest_waypoint(path, target))];
  if (path.closed && arc_target < arc) arc_target += path.total_length();

  std::vector<State> refs(static_cast<size_t>(problem.horizon) + 1);
  double previous = x.theta2;
  for (size_t k = 0; k < refs.size(); ++k) {
    State r = sample_at(path, std::min(arc, arc_target));
    // Keep the reference headings continuous with the vehicle's own unwrapped
    // heading; the stage cost differences angles without wrapping.
    r.theta2 = previous + std::remainder(r.theta2 - previous, 2.0 * M_PI);
    previous = r.theta2;
    refs[k] = r;
    arc += sustainable_speed(path, arc, problem) * problem.dt;
  }
  return refs;
}

}  // namespace

MissionLog run_mission(MpcPlanner& planner, Simulator& plant,
                       const State& target, const MissionOptions& options) {
  if (!(options.threshold > 0.0))
    throw std::invalid_argument("run_mission: threshold must be > 0");
  const OcpProblem& problem = planner.problem();
  const double dt = problem.dt;
  const State initial = plant.state();
  const double distance =
      std::hypot(target.x2 - initial.x2, target.y2 - initial.y2);
  const int max_ticks = options.max_ticks > 0
                            ? options.max_ticks
                            : default_max_ticks(distance, problem);

  MissionLog log;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<State> reference = {target};
  double t = 0.0;
  for (int tick = 0; tick <= max_ticks; ++tick) {
    const State x = plant.state();
    const double error = terminal_error(x, target);
    const double clearance = clearance_at(x, problem);
    if (error <= options.threshold) {
      log.ticks.push_back(
          terminal_snapshot(tick, t, x, error, nan_value(), clearance));
      log.completed = true;
      break;
    }
    if (tick == max_ticks) break;  // cap reached without convergence

    const PlanResult res = planner.plan(x, reference);
    plant.apply(res.applied, dt);
    log.ticks.push_back(
        make_record(tick, t, x, res, error, nan_value(), clearance));
    t += dt;
  }
  log.sim_time_s = plant.sim_time();
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return log;
}

MissionLog run_path_following(MpcPlanner& planner, Simulator& plant,
                              const WaypointPath& path,
                              const MissionOptions& options) {
  if (!(options.threshold > 0.0))
    throw std::invalid_argument("run_path_following: threshold must be > 0");
  path.validate();
  const OcpProblem& problem = planner.problem();
  const double dt = problem.dt;
  const int max_ticks =
      options.max_ticks > 0
          ? options.max_ticks
          : default_max_ticks(path.total_length() +
                                  std::hypot(plant.state().x2 - path[0].x2,
                                             plant.state().y2 - path[0].y2),
                              problem);

  // Open paths converge on the final waypoint; the tracker is seeded with it
  // so the first tick already measures progress toward the mission's end.
  const State goal = path[path.size() - 1];
  TargetTracker tracker(path, options.guidance, goal);
  LapTracker laps(path);

  MissionLog log;
  const auto t0 = std::chrono::steady_clock::now();
  double t = 0.0;
  for (int tick = 0; tick <= max_ticks; ++tick) {
    const State x = plant.state();
    const int np = nearest_waypoint(path, x);
    const double path_error =
        std::hypot(x.x2 - path[np].x2, x.y2 - path[np].y2);
    const double clearance = clearance_at(x, problem);
    // Reaching the end of a path is a positional event. A curved path keeps
    // the hitch bent right up to its last waypoint, so a full-state norm
    // could never fall under a tight threshold there.
    const double goal_error = std::hypot(x.x2 - goal.x2, x.y2 - goal.y2);

    bool done = false;
    if (path.closed) {
      laps.update(np);
      done = laps.completed();
    } else {
      done = goal_error <= options.threshold;
    }
    if (done) {
      log.ticks.push_back(
          terminal_snapshot(tick, t, x, goal_error, path_error, clearance));
      log.completed = true;
      break;
    }
    if (tick == max_ticks) break;

    const State target = tracker.update(x);
    const PlanResult res =
        planner.plan(x, path_references(path, np, target, x, problem));
    plant.apply(res.applied, dt);
    log.ticks.push_back(
        make_record(tick, t, x, res, goal_error, path_error, clearance));
    t += dt;
  }
  log.sim_time_s = plant.sim_time();
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return log;
}

MissionLog run_scenario(const Scenario& scenario) {
  scenario.validate();
  MpcPlanner planner(scenario.make_problem(), scenario.planner);
  Simulator plant(scenario.params, scenario.initial, scenario.plant);

  MissionOptions options;
  options.threshold = scenario.threshold;
  options.max_ticks = scenario.max_ticks;
  options.guidance = scenario.guidance;

  MissionLog log;
  if (scenario.kind == MissionKind::kPathFollow) {
    const WaypointPath path = load_waypoints(
        scenario.waypoint_file, scenario.path_closed, scenario.backward);
    log = run_path_following(planner, plant, path, options);
  } else {
    log = run_mission(planner, plant, scenario.target, options);
  }
  log.scenario_name = scenario.name;
  log.kind = to_string(scenario.kind);
  return log;
}

int run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir) {
  const MissionLog log = run_scenario(scenario);
  if (scenario.kind == MissionKind::kPathFollow) {
    const WaypointPath path = load_waypoints(
        scenario.waypoint_file, scenario.path_closed, scenario.backward);
    write_mission_artifacts(log, &path, out_dir);
  } else {
    write_mission_artifacts(log, nullptr, out_dir);
  }
  return log.completed ? 0 : 1;
}

DerivativeCheck check_scenario_derivatives(const Scenario& scenario,
                                           int points) {
  if (points < 1)
    throw std::invalid_argument("check_scenario_derivatives: points >= 1");
  OcpProblem problem = scenario.make_problem();
  // The planner applies the same margin before transcribing; match it so the
  // checked functions are the ones the solver actually sees.
  for (Obstacle& obs : problem.obstacles)
    obs.r_safe += scenario.planner.obstacle_margin;
  const NlpProblem nlp = scenario.planner.shooting == ShootingKind::kMultiple
                             ? transcribe_multiple_shooting(problem)
                             : transcribe_single_shooting(problem);

  std::mt19937_64 rng(scenario.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DerivativeCheck worst;
  for (int p = 0; p < points; ++p) {
    Trajectory traj;
    traj.controls.resize(2, problem.horizon);
    for (int k = 0; k < problem.horizon; ++k) {
      const Eigen::Vector2d lo = k == 0
                                     ? nlp.lower.segment<2>(
                                           nlp.layout.control_offset(0))
                                     : Eigen::Vector2d(problem.control_lower);
      const Eigen::Vector2d hi = k == 0
                                     ? nlp.upper.segment<2>(
                                           nlp.layout.control_offset(0))
                                     : Eigen::Vector2d(problem.control_upper);
      for (int j = 0; j < 2; ++j)
        traj.controls(j, k) = lo(j) + (hi(j) - lo(j)) * unit(rng);
    }
    if (nlp.layout.kind == ShootingKind::kMultiple) {
      traj.states = rollout_states(problem, traj.controls);
      // Small perturbation so defect rows and their Jacobians are evaluated
      // off the manifold; stays well inside any active state box.
      for (int k = 1; k <= problem.horizon; ++k)
        for (int j = 0; j < 4; ++j)
          traj.states(j, k) += 0.01 * (unit(rng) - 0.5);
    }
    const Eigen::VectorXd w = pack(traj, nlp.layout);
    const DerivativeCheck check = check_derivatives(nlp, w);
    worst.objective_error = std::max(worst.objective_error, check.objective_error);
    worst.equality_error = std::max(worst.equality_error, check.equality_error);
    worst.inequality_error =
        std::max(worst.inequality_error, check.inequality_error);
  }
  return worst;
}

}  // namespace ttmpc
