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

#include "ttmpc/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ttmpc {

namespace {

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Advances the previous solution one interval: everything moves left one
// node, the freed tail repeats the last entry and the final state is
// re-integrated so the guess stays dynamically consistent.
Trajectory shift_trajectory(const Trajectory& prev, const OcpProblem& p) {
  const int n = static_cast<int>(prev.controls.cols());
  Trajectory out;
  out.controls.resize(2, n);
  out.controls.leftCols(n - 1) = prev.controls.rightCols(n - 1);
  out.controls.col(n - 1) = prev.controls.col(n - 1);
  if (prev.states.cols() == n + 1) {
    out.states.resize(4, n + 1);
    out.states.leftCols(n) = prev.states.rightCols(n);
    out.states.col(n) =
        step(State::from_vec(out.states.col(n - 1)),
             Control::from_vec(out.controls.col(n - 1)), p.params, p.dt,
             p.integrator)
            .vec();
  }
  return out;
}

// Shifts constraint multipliers in step with the primal shift so the solver
// resumes near the previous saddle point. Blocks are moved one node toward
// the front; exposed tail blocks repeat their predecessor.
Multipliers shift_duals(const Multipliers& prev, const NlpProblem& nlp) {
  const ConstraintMap& m = nlp.map;
  Multipliers out = prev;
  out.bound.setZero();  // bound duals are recovered fresh each solve

  if (m.num_defects > 1) {
    for (int i = 0; i + 1 < m.num_defects; ++i)
      out.equality.segment<4>(m.eq_defect_base + 4 * i) =
          prev.equality.segment<4>(m.eq_defect_base + 4 * (i + 1));
  }
  if (m.num_obstacles > 0 && m.num_obstacle_nodes > 1) {
    const int block = 2 * m.num_obstacles;
    for (int node = 1; node + 1 <= m.num_obstacle_nodes; ++node) {
      const int dst = m.obstacle_row(node, 0, 0);
      const int src = m.obstacle_row(node + 1, 0, 0);
      out.ineq_lower.segment(dst, block) = prev.ineq_lower.segment(src, block);
      out.ineq_upper.segment(dst, block) = prev.ineq_upper.segment(src, block);
    }
  }
  if (m.num_rate_pairs > 1) {
    for (int i = 1; i + 1 <= m.num_rate_pairs; ++i) {
      out.ineq_lower.segment<2>(m.rate_row(i)) =
          prev.ineq_lower.segment<2>(m.rate_row(i + 1));
      out.ineq_upper.segment<2>(m.rate_row(i)) =
          prev.ineq_upper.segment<2>(m.rate_row(i + 1));
    }
  }
  if (m.ineq_state_base >= 0 && m.num_state_nodes > 1) {
    for (int i = 1; i + 1 <= m.num_state_nodes; ++i) {
      const int dst = m.ineq_state_base + 4 * (i - 1);
      const int src = m.ineq_state_base + 4 * i;
      out.ineq_lower.segment<4>(dst) = prev.ineq_lower.segment<4>(src);
      out.ineq_upper.segment<4>(dst) = prev.ineq_upper.segment<4>(src);
    }
  }
  return out;
}

}  // namespace

MpcPlanner::MpcPlanner(const OcpProblem& problem, const PlannerConfig& config)
    : template_(problem), config_(config) {
  if (config_.obstacle_margin < 0.0)
    throw std::invalid_argument("MpcPlanner: obstacle_margin must be >= 0");
  config_.solver.validate();
  for (Obstacle& obs : template_.obstacles)
    obs.r_safe += config_.obstacle_margin;
  template_.validate();
  last_applied_ = template_.u_prev;
}

void MpcPlanner::reset() {
  have_previous_ = false;
  previous_w_.resize(0);
  last_applied_ = template_.u_prev;
}

PlanResult MpcPlanner::plan(const State& current) {
  template_.x0 = current;
  template_.u_prev = last_applied_;
  return solve_once();
}

PlanResult MpcPlanner::plan(const State& current,
                            const std::vector<State>& reference) {
  template_.reference = reference;
  return plan(current);
}

PlanResult MpcPlanner::solve_once() {
  const auto t0 = std::chrono::steady_clock::now();

  const NlpProblem nlp = (config_.shooting == ShootingKind::kMultiple)
                             ? transcribe_multiple_shooting(template_)
                             : transcribe_single_shooting(template_);

  // Cold start: hold the previous control and roll the model forward, which
  // satisfies the dynamics exactly. Warm start: shift last tick's solution.
  Eigen::VectorXd w0;
  const Multipliers* warm = nullptr;
  Multipliers shifted;
  if (config_.warm_start && have_previous_) {
    const Trajectory prev = unpack(previous_w_, nlp.layout);
    Trajectory guess = shift_trajectory(prev, template_);
    if (nlp.layout.kind == ShootingKind::kMultiple)
      guess.states.col(0) = template_.x0.vec();
    w0 = pack(guess, nlp.layout);
    shifted = shift_duals(previous_duals_, nlp);
    warm = &shifted;
  } else {
    Trajectory guess;
    guess.controls.resize(2, template_.horizon);
    const Eigen::Vector2d hold(
        clamp(last_applied_.v, template_.control_lower(0),
              template_.control_upper(0)),
        clamp(last_applied_.phi, template_.control_lower(1),
              template_.control_upper(1)));
    guess.controls.colwise() = hold;
    if (nlp.layout.kind == ShootingKind::kMultiple)
      guess.states = rollout_states(template_, guess.controls);
    w0 = pack(guess, nlp.layout);
  }

  const NlpSolution sol = solve(nlp, w0, config_.solver, warm);

  PlanResult result;
  result.status = sol.status;
  result.objective_value = sol.objective_value;
  result.kkt_residual = sol.kkt_residual;
  result.constraint_violation = sol.constraint_violation;
  result.iterations = sol.iterations;
  result.outer_iterations = sol.outer_iterations;

  result.predicted = unpack(sol.w, nlp.layout);
  if (nlp.layout.kind == ShootingKind::kSingle) {
    result.predicted.states = rollout_states(template_, result.predicted.controls);
    result.max_defect = 0.0;  // states come from the rollout itself
  } else {
    const Eigen::VectorXd b = nlp.eval_equality(sol.w);
    result.max_defect = b.segment(nlp.map.eq_defect_base, 4 * nlp.map.num_defects)
                            .lpNorm<Eigen::Infinity>();
  }

  // Accept the plan only when it is usable: feasible to tolerance and not
  // flagged infeasible. Otherwise command a rate-respecting stop that holds
  // the current steering angle.
  const bool usable =
      sol.status != SolveStatus::kInfeasible &&
      sol.constraint_violation <= 100.0 * config_.solver.constraint_tolerance;
  if (usable) {
    result.applied = Control::from_vec(result.predicted.controls.col(0));
    previous_w_ = sol.w;
    previous_duals_ = sol.multipliers;
    have_previous_ = true;
  } else {
    result.fallback = true;
    const double dv = template_.rate_upper(0);
    double v = last_applied_.v;
    if (v > 0.0)
      v = std::max(0.0, v - dv);
    else
      v = std::min(0.0, v + dv);
    result.applied = Control{v, last_applied_.phi};
    have_previous_ = false;  // stale saddle point, restart cold next tick
  }
  last_applied_ = result.applied;

  result.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace ttmpc
