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

#include "ttmpc/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace ttmpc {

namespace {

constexpr double kInf = 1e20;
constexpr double kDistFloor = 1e-12;

Eigen::Vector2d clamp2(const Eigen::Vector2d& v, const Eigen::Vector2d& lo,
                       const Eigen::Vector2d& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Quadratic penalty on state-box overruns (soft constraint mode). C1 smooth:
// value and gradient are both zero at the bound.
double soft_penalty(const Eigen::Vector4d& s, const OcpProblem& p) {
  const Eigen::Vector4d over_hi = (s - p.state_upper).cwiseMax(0.0);
  const Eigen::Vector4d over_lo = (p.state_lower - s).cwiseMax(0.0);
  return p.state_slack_weight *
         (over_hi.squaredNorm() + over_lo.squaredNorm());
}

Eigen::Vector4d soft_penalty_grad(const Eigen::Vector4d& s,
                                  const OcpProblem& p) {
  const Eigen::Vector4d over_hi = (s - p.state_upper).cwiseMax(0.0);
  const Eigen::Vector4d over_lo = (p.state_lower - s).cwiseMax(0.0);
  return 2.0 * p.state_slack_weight * (over_hi - over_lo);
}

bool soft_states(const OcpProblem& p) {
  return p.state_mode == StateConstraintMode::kSoft;
}

// Clearance of one body circle against one obstacle plus its gradient with
// respect to the owning state. circle 0 is the trailer axle, circle 1 the
// hitch point.
double circle_clearance(const Eigen::Vector4d& s, const Obstacle& obs,
                        const OcpProblem& p, int circle,
                        Eigen::Vector4d* grad) {
  Eigen::Vector2d center(s(0), s(1));
  Eigen::Vector2d dcenter_dtheta2 = Eigen::Vector2d::Zero();
  if (circle == 1) {
    const double l2 = p.params.l2;
    center += l2 * Eigen::Vector2d(std::sin(s(3)), -std::cos(s(3)));
    dcenter_dtheta2 = l2 * Eigen::Vector2d(std::cos(s(3)), std::sin(s(3)));
  }
  const Eigen::Vector2d diff = center - obs.center;
  const double dist = std::max(diff.norm(), kDistFloor);
  if (grad) {
    const Eigen::Vector2d unit = diff / dist;
    (*grad).setZero();
    (*grad)(0) = unit(0);
    (*grad)(1) = unit(1);
    (*grad)(3) = unit.dot(dcenter_dtheta2);
  }
  return dist - (obs.radius + p.params.r_body + obs.r_safe);
}

ConstraintMap build_map(const OcpProblem& p, ShootingKind kind) {
  const int n = p.horizon;
  const int n_obs = static_cast<int>(p.obstacles.size());
  ConstraintMap m;

  int eq = 0;
  if (kind == ShootingKind::kMultiple) {
    m.eq_initial = eq;
    eq += 4;
    m.eq_defect_base = eq;
    m.num_defects = n;
    eq += 4 * n;
  }
  if (p.terminal_mode == TerminalMode::kEquality) {
    m.eq_terminal = eq;
    eq += 4;
  }
  m.num_eq = eq;

  int ineq = 0;
  if (n_obs > 0) {
    m.ineq_obstacle_base = ineq;
    m.num_obstacle_nodes = n;
    m.num_obstacles = n_obs;
    ineq += 2 * n_obs * n;
  }
  m.ineq_rate_base = ineq;
  m.num_rate_pairs = n - 1;
  ineq += 2 * (n - 1);
  if (kind == ShootingKind::kSingle && !soft_states(p)) {
    m.ineq_state_base = ineq;
    m.num_state_nodes = n;
    ineq += 4 * n;
  }
  if (p.terminal_mode == TerminalMode::kBall) {
    m.ineq_terminal_ball = ineq;
    ineq += 1;
  }
  m.num_ineq = ineq;
  return m;
}

void fill_ineq_bounds(const OcpProblem& p, const ConstraintMap& m,
                      Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo.setConstant(m.num_ineq, -kInf);
  hi.setConstant(m.num_ineq, kInf);
  if (m.num_obstacles > 0) {
    lo.segment(m.ineq_obstacle_base,
               2 * m.num_obstacles * m.num_obstacle_nodes)
        .setZero();
  }
  for (int i = 1; i <= m.num_rate_pairs; ++i) {
    lo.segment<2>(m.rate_row(i)) = p.rate_lower;
    hi.segment<2>(m.rate_row(i)) = p.rate_upper;
  }
  if (m.ineq_state_base >= 0) {
    for (int i = 0; i < m.num_state_nodes; ++i) {
      lo.segment<4>(m.ineq_state_base + 4 * i) = p.state_lower;
      hi.segment<4>(m.ineq_state_base + 4 * i) = p.state_upper;
    }
  }
  if (m.ineq_terminal_ball >= 0) {
    hi(m.ineq_terminal_ball) =
        p.terminal_ball_radius * p.terminal_ball_radius;
  }
}

// First-sample control bounds: the slew limit against the previously applied
// control folds into q_0's box, which is exact and keeps the rate rows purely
// between adjacent horizon controls.
void first_control_bounds(const OcpProblem& p, Eigen::Vector2d& lo,
                          Eigen::Vector2d& hi) {
  const Eigen::Vector2d u_prev =
      clamp2(p.u_prev.vec(), p.control_lower, p.control_upper);
  lo = (u_prev + p.rate_lower).cwiseMax(p.control_lower);
  hi = (u_prev + p.rate_upper).cwiseMin(p.control_upper);
}

}  // namespace

Eigen::VectorXd pack(const Trajectory& traj, const DecisionLayout& layout) {
  const int n = layout.horizon;
  if (traj.controls.cols() != n)
    throw std::invalid_argument("pack: controls must have horizon cols");
  Eigen::VectorXd w(layout.dim());
  if (layout.kind == ShootingKind::kMultiple) {
    if (traj.states.cols() != n + 1)
      throw std::invalid_argument("pack: states must have horizon+1 cols");
    for (int k = 0; k < n; ++k) {
      w.segment<4>(layout.state_offset(k)) = traj.states.col(k);
      w.segment<2>(layout.control_offset(k)) = traj.controls.col(k);
    }
    w.segment<4>(layout.state_offset(n)) = traj.states.col(n);
  } else {
    for (int k = 0; k < n; ++k)
      w.segment<2>(layout.control_offset(k)) = traj.controls.col(k);
  }
  return w;
}

Trajectory unpack(const Eigen::VectorXd& w, const DecisionLayout& layout) {
  if (w.size() != layout.dim())
    throw std::invalid_argument("unpack: decision vector has wrong length");
  const int n = layout.horizon;
  Trajectory traj;
  traj.controls.resize(2, n);
  if (layout.kind == ShootingKind::kMultiple) {
    traj.states.resize(4, n + 1);
    for (int k = 0; k < n; ++k) {
      traj.states.col(k) = w.segment<4>(layout.state_offset(k));
      traj.controls.col(k) = w.segment<2>(layout.control_offset(k));
    }
    traj.states.col(n) = w.segment<4>(layout.state_offset(n));
  } else {
    traj.states.resize(4, 0);
    for (int k = 0; k < n; ++k)
      traj.controls.col(k) = w.segment<2>(layout.control_offset(k));
  }
  return traj;
}

Eigen::Matrix4Xd rollout_states(const OcpProblem& problem,
                                const Eigen::Matrix2Xd& controls) {
  problem.validate();
  if (controls.cols() != problem.horizon)
    throw std::invalid_argument("rollout_states: controls length mismatch");
  Eigen::Matrix4Xd states(4, problem.horizon + 1);
  states.col(0) = problem.x0.vec();
  for (int k = 0; k < problem.horizon; ++k) {
    const State x = State::from_vec(states.col(k));
    const Control u = Control::from_vec(controls.col(k));
    states.col(k + 1) =
        step(x, u, problem.params, problem.dt, problem.integrator).vec();
  }
  return states;
}

// ---------------------------------------------------------------------------
// Multiple shooting
// ---------------------------------------------------------------------------

NlpProblem transcribe_multiple_shooting(const OcpProblem& problem) {
  problem.validate();
  auto p = std::make_shared<const OcpProblem>(problem);
  const int n = p->horizon;

  NlpProblem nlp;
  nlp.layout = DecisionLayout{ShootingKind::kMultiple, n};
  nlp.map = build_map(*p, ShootingKind::kMultiple);
  nlp.num_vars = nlp.layout.dim();
  nlp.num_eq = nlp.map.num_eq;
  nlp.num_ineq = nlp.map.num_ineq;

  nlp.lower.setConstant(nlp.num_vars, -kInf);
  nlp.upper.setConstant(nlp.num_vars, kInf);
  const DecisionLayout layout = nlp.layout;
  for (int k = 0; k < n; ++k) {
    nlp.lower.segment<2>(layout.control_offset(k)) = p->control_lower;
    nlp.upper.segment<2>(layout.control_offset(k)) = p->control_upper;
  }
  {
    Eigen::Vector2d lo, hi;
    first_control_bounds(*p, lo, hi);
    nlp.lower.segment<2>(layout.control_offset(0)) = lo;
    nlp.upper.segment<2>(layout.control_offset(0)) = hi;
  }
  if (!soft_states(*p)) {
    // Hard state boxes ride on the shooting variables themselves; node 0 is
    // pinned to x0 by the initial-value rows and stays unbounded so a
    // measured state slightly outside the box cannot make the NLP infeasible.
    for (int k = 1; k <= n; ++k) {
      nlp.lower.segment<4>(layout.state_offset(k)) = p->state_lower;
      nlp.upper.segment<4>(layout.state_offset(k)) = p->state_upper;
    }
  }
  fill_ineq_bounds(*p, nlp.map, nlp.ineq_lower, nlp.ineq_upper);

  nlp.objective = [p, layout](const Eigen::VectorXd& w) {
    const int n = layout.horizon;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      total += running_cost(
          State::from_vec(w.segment<4>(layout.state_offset(k))),
          Control::from_vec(w.segment<2>(layout.control_offset(k))),
          p->reference_at(k), p->u_ref, p->weights);
    }
    total += terminal_cost(State::from_vec(w.segment<4>(layout.state_offset(n))),
                           p->reference_at(n), p->weights);
    if (soft_states(*p)) {
      for (int k = 1; k <= n; ++k)
        total += soft_penalty(w.segment<4>(layout.state_offset(k)), *p);
    }
    return total;
  };

  nlp.gradient = [p, layout](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
    const int n = layout.horizon;
    g.setZero(layout.dim());
    for (int k = 0; k < n; ++k) {
      const Eigen::Vector4d ds =
          w.segment<4>(layout.state_offset(k)) - p->reference_at(k).vec();
      const Eigen::Vector2d du =
          w.segment<2>(layout.control_offset(k)) - p->u_ref.vec();
      g.segment<4>(layout.state_offset(k)) = 2.0 * (p->weights.q * ds);
      g.segment<2>(layout.control_offset(k)) = 2.0 * (p->weights.r * du);
    }
    const Eigen::Vector4d dn =
        w.segment<4>(layout.state_offset(n)) - p->reference_at(n).vec();
    g.segment<4>(layout.state_offset(n)) = 2.0 * (p->weights.p * dn);
    if (soft_states(*p)) {
      for (int k = 1; k <= n; ++k)
        g.segment<4>(layout.state_offset(k)) +=
            soft_penalty_grad(w.segment<4>(layout.state_offset(k)), *p);
    }
  };

  // The objective is a separable quadratic (plus the piecewise-quadratic
  // slack terms), so this diagonal is its exact Hessian.
  nlp.cost_hessian_diag = [p, layout](const Eigen::VectorXd& w,
                                      Eigen::VectorXd& h) {
    const int n = layout.horizon;
    h.setZero(layout.dim());
    for (int k = 0; k < n; ++k) {
      h.segment<4>(layout.state_offset(k)) = 2.0 * p->weights.q.diagonal();
      h.segment<2>(layout.control_offset(k)) = 2.0 * p->weights.r.diagonal();
    }
    h.segment<4>(layout.state_offset(n)) = 2.0 * p->weights.p.diagonal();
    if (soft_states(*p)) {
      for (int k = 1; k <= n; ++k) {
        const Eigen::Vector4d s = w.segment<4>(layout.state_offset(k));
        for (int i = 0; i < 4; ++i) {
          if (s(i) > p->state_upper(i) || s(i) < p->state_lower(i))
            h(layout.state_offset(k) + i) += 2.0 * p->state_slack_weight;
        }
      }
    }
  };

  const ConstraintMap map = nlp.map;
  nlp.equality = [p, layout, map](const Eigen::VectorXd& w,
                                  Eigen::VectorXd& b) {
    const int n = layout.horizon;
    b.resize(map.num_eq);
    b.segment<4>(map.eq_initial) =
        w.segment<4>(layout.state_offset(0)) - p->x0.vec();
    for (int i = 0; i < n; ++i) {
      const State xi = State::from_vec(w.segment<4>(layout.state_offset(i)));
      const Control qi =
          Control::from_vec(w.segment<2>(layout.control_offset(i)));
      const State next = step(xi, qi, p->params, p->dt, p->integrator);
      b.segment<4>(map.eq_defect_base + 4 * i) =
          w.segment<4>(layout.state_offset(i + 1)) - next.vec();
    }
    if (map.eq_terminal >= 0) {
      b.segment<4>(map.eq_terminal) =
          w.segment<4>(layout.state_offset(n)) - p->reference_at(n).vec();
    }
  };

  nlp.equality_jacobian = [p, layout, map](const Eigen::VectorXd& w,
                                           Eigen::MatrixXd& jac) {
    const int n = layout.horizon;
    jac.setZero(map.num_eq, layout.dim());
    jac.block<4, 4>(map.eq_initial, layout.state_offset(0)).setIdentity();
    for (int i = 0; i < n; ++i) {
      const State xi = State::from_vec(w.segment<4>(layout.state_offset(i)));
      const Control qi =
          Control::from_vec(w.segment<2>(layout.control_offset(i)));
      const StepJacobian sj =
          step_with_jacobian(xi, qi, p->params, p->dt, p->integrator);
      const int row = map.eq_defect_base + 4 * i;
      jac.block<4, 4>(row, layout.state_offset(i)) = -sj.a;
      jac.block<4, 2>(row, layout.control_offset(i)) = -sj.b;
      jac.block<4, 4>(row, layout.state_offset(i + 1)).setIdentity();
    }
    if (map.eq_terminal >= 0)
      jac.block<4, 4>(map.eq_terminal, layout.state_offset(n)).setIdentity();
  };

  nlp.inequality = [p, layout, map](const Eigen::VectorXd& w,
                                    Eigen::VectorXd& c) {
    c.resize(map.num_ineq);
    if (map.num_obstacles > 0) {
      for (int i = 1; i <= map.num_obstacle_nodes; ++i) {
        const Eigen::Vector4d s = w.segment<4>(layout.state_offset(i));
        for (int o = 0; o < map.num_obstacles; ++o)
          for (int circle = 0; circle < 2; ++circle)
            c(map.obstacle_row(i, o, circle)) = circle_clearance(
                s, p->obstacles[static_cast<size_t>(o)], *p, circle, nullptr);
      }
    }
    for (int i = 1; i <= map.num_rate_pairs; ++i) {
      c.segment<2>(map.rate_row(i)) =
          w.segment<2>(layout.control_offset(i)) -
          w.segment<2>(layout.control_offset(i - 1));
    }
    if (map.ineq_terminal_ball >= 0) {
      const Eigen::Vector4d dn =
          w.segment<4>(layout.state_offset(layout.horizon)) -
          p->reference_at(layout.horizon).vec();
      c(map.ineq_terminal_ball) = dn.squaredNorm();
    }
  };

  nlp.inequality_jacobian = [p, layout, map](const Eigen::VectorXd& w,
                                             Eigen::MatrixXd& jac) {
    jac.setZero(map.num_ineq, layout.dim());
    if (map.num_obstacles > 0) {
      Eigen::Vector4d grad;
      for (int i = 1; i <= map.num_obstacle_nodes; ++i) {
        const Eigen::Vector4d s = w.segment<4>(layout.state_offset(i));
        for (int o = 0; o < map.num_obstacles; ++o)
          for (int circle = 0; circle < 2; ++circle) {
            circle_clearance(s, p->obstacles[static_cast<size_t>(o)], *p,
                             circle, &grad);
            jac.block<1, 4>(map.obstacle_row(i, o, circle),
                            layout.state_offset(i)) = grad.transpose();
          }
      }
    }
    for (int i = 1; i <= map.num_rate_pairs; ++i) {
      jac.block<2, 2>(map.rate_row(i), layout.control_offset(i))
          .setIdentity();
      jac.block<2, 2>(map.rate_row(i), layout.control_offset(i - 1)) =
          -Eigen::Matrix2d::Identity();
    }
    if (map.ineq_terminal_ball >= 0) {
      const int n = layout.horizon;
      const Eigen::Vector4d dn =
          w.segment<4>(layout.state_offset(n)) - p->reference_at(n).vec();
      jac.block<1, 4>(map.ineq_terminal_ball, layout.state_offset(n)) =
          2.0 * dn.transpose();
    }
  };

  return nlp;
}

// ---------------------------------------------------------------------------
// Single shooting
// ---------------------------------------------------------------------------

namespace {

struct SingleShootingWork {
  // Forward pass storing the rolled states and, optionally, the per-step
  // Jacobian factors needed to chain sensitivities.
  static void roll(const OcpProblem& p, const DecisionLayout& layout,
                   const Eigen::VectorXd& w, Eigen::Matrix4Xd& states,
                   std::vector<Eigen::Matrix4d>* a,
                   std::vector<Eigen::Matrix<double, 4, 2>>* b) {
    const int n = layout.horizon;
    states.resize(4, n + 1);
    states.col(0) = p.x0.vec();
    if (a) a->resize(static_cast<size_t>(n));
    if (b) b->resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      const State xk = State::from_vec(states.col(k));
      const Control qk =
          Control::from_vec(w.segment<2>(layout.control_offset(k)));
      if (a) {
        const StepJacobian sj =
            step_with_jacobian(xk, qk, p.params, p.dt, p.integrator);
        states.col(k + 1) = sj.next.vec();
        (*a)[static_cast<size_t>(k)] = sj.a;
        (*b)[static_cast<size_t>(k)] = sj.b;
      } else {
        states.col(k + 1) = step(xk, qk, p.params, p.dt, p.integrator).vec();
      }
    }
  }
};

}  // namespace

NlpProblem transcribe_single_shooting(const OcpProblem& problem) {
  problem.validate();
  auto p = std::make_shared<const OcpProblem>(problem);
  const int n = p->horizon;

  NlpProblem nlp;
  nlp.layout = DecisionLayout{ShootingKind::kSingle, n};
  nlp.map = build_map(*p, ShootingKind::kSingle);
  nlp.num_vars = nlp.layout.dim();
  nlp.num_eq = nlp.map.num_eq;
  nlp.num_ineq = nlp.map.num_ineq;

  const DecisionLayout layout = nlp.layout;
  nlp.lower.resize(nlp.num_vars);
  nlp.upper.resize(nlp.num_vars);
  for (int k = 0; k < n; ++k) {
    nlp.lower.segment<2>(layout.control_offset(k)) = p->control_lower;
    nlp.upper.segment<2>(layout.control_offset(k)) = p->control_upper;
  }
  {
    Eigen::Vector2d lo, hi;
    first_control_bounds(*p, lo, hi);
    nlp.lower.segment<2>(layout.control_offset(0)) = lo;
    nlp.upper.segment<2>(layout.control_offset(0)) = hi;
  }
  fill_ineq_bounds(*p, nlp.map, nlp.ineq_lower, nlp.ineq_upper);

  nlp.objective = [p, layout](const Eigen::VectorXd& w) {
    const int n = layout.horizon;
    Eigen::Matrix4Xd states;
    SingleShootingWork::roll(*p, layout, w, states, nullptr, nullptr);
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      total += running_cost(
          State::from_vec(states.col(k)),
          Control::from_vec(w.segment<2>(layout.control_offset(k))),
          p->reference_at(k), p->u_ref, p->weights);
    }
    total += terminal_cost(State::from_vec(states.col(n)), p->reference_at(n),
                           p->weights);
    if (soft_states(*p)) {
      for (int k = 1; k <= n; ++k) total += soft_penalty(states.col(k), *p);
    }
    return total;
  };

  nlp.gradient = [p, layout](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
    const int n = layout.horizon;
    Eigen::Matrix4Xd states;
    std::vector<Eigen::Matrix4d> a;
    std::vector<Eigen::Matrix<double, 4, 2>> b;
    SingleShootingWork::roll(*p, layout, w, states, &a, &b);

    g.setZero(layout.dim());
    // Sensitivity X_k = d x_k / d w, propagated forward while the state-cost
    // terms are folded in; control-cost terms land directly on their blocks.
    Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(4, layout.dim());
    for (int k = 0; k <= n; ++k) {
      Eigen::Vector4d dcost_dx;
      if (k < n) {
        dcost_dx = 2.0 * (p->weights.q *
                          (states.col(k) - p->reference_at(k).vec()));
        g.segment<2>(layout.control_offset(k)) =
            2.0 * (p->weights.r *
                   (w.segment<2>(layout.control_offset(k)) - p->u_ref.vec()));
      } else {
        dcost_dx = 2.0 * (p->weights.p *
                          (states.col(n) - p->reference_at(n).vec()));
      }
      if (soft_states(*p) && k >= 1)
        dcost_dx += soft_penalty_grad(states.col(k), *p);
      if (k >= 1) g.noalias() += sens.transpose() * dcost_dx;
      if (k < n) {
        sens = a[static_cast<size_t>(k)] * sens;
        sens.block<4, 2>(0, layout.control_offset(k)) +=
            b[static_cast<size_t>(k)];
      }
    }
  };

  const ConstraintMap map = nlp.map;
  nlp.equality = [p, layout, map](const Eigen::VectorXd& w,
                                  Eigen::VectorXd& bvec) {
    bvec.resize(map.num_eq);
    if (map.eq_terminal >= 0) {
      Eigen::Matrix4Xd states;
      SingleShootingWork::roll(*p, layout, w, states, nullptr, nullptr);
      bvec.segment<4>(map.eq_terminal) =
          states.col(layout.horizon) - p->reference_at(layout.horizon).vec();
    }
  };

  nlp.equality_jacobian = [p, layout, map](const Eigen::VectorXd& w,
                                           Eigen::MatrixXd& jac) {
    jac.setZero(map.num_eq, layout.dim());
    if (map.eq_terminal >= 0) {
      Eigen::Matrix4Xd states;
      std::vector<Eigen::Matrix4d> a;
      std::vector<Eigen::Matrix<double, 4, 2>> b;
      SingleShootingWork::roll(*p, layout, w, states, &a, &b);
      Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(4, layout.dim());
      for (int k = 0; k < layout.horizon; ++k) {
        sens = a[static_cast<size_t>(k)] * sens;
        sens.block<4, 2>(0, layout.control_offset(k)) +=
            b[static_cast<size_t>(k)];
      }
      jac.block(map.eq_terminal, 0, 4, layout.dim()) = sens;
    }
  };

  nlp.inequality = [p, layout, map](const Eigen::VectorXd& w,
                                    Eigen::VectorXd& c) {
    c.resize(map.num_ineq);
    Eigen::Matrix4Xd states;
    SingleShootingWork::roll(*p, layout, w, states, nullptr, nullptr);
    if (map.num_obstacles > 0) {
      for (int i = 1; i <= map.num_obstacle_nodes; ++i) {
        const Eigen::Vector4d s = states.col(i);
        for (int o = 0; o < map.num_obstacles; ++o)
          for (int circle = 0; circle < 2; ++circle)
            c(map.obstacle_row(i, o, circle)) = circle_clearance(
                s, p->obstacles[static_cast<size_t>(o)], *p, circle, nullptr);
      }
    }
    for (int i = 1; i <= map.num_rate_pairs; ++i) {
      c.segment<2>(map.rate_row(i)) =
          w.segment<2>(layout.control_offset(i)) -
          w.segment<2>(layout.control_offset(i - 1));
    }
    if (map.ineq_state_base >= 0) {
      for (int i = 1; i <= map.num_state_nodes; ++i)
        c.segment<4>(map.ineq_state_base + 4 * (i - 1)) = states.col(i);
    }
    if (map.ineq_terminal_ball >= 0) {
      const Eigen::Vector4d dn = states.col(layout.horizon) -
                                 p->reference_at(layout.horizon).vec();
      c(map.ineq_terminal_ball) = dn.squaredNorm();
    }
  };

  nlp.inequality_jacobian = [p, layout, map](const Eigen::VectorXd& w,
                                             Eigen::MatrixXd& jac) {
    jac.setZero(map.num_ineq, layout.dim());
    Eigen::Matrix4Xd states;
    std::vector<Eigen::Matrix4d> a;
    std::vector<Eigen::Matrix<double, 4, 2>> b;
    SingleShootingWork::roll(*p, layout, w, states, &a, &b);

    Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(4, layout.dim());
    Eigen::Vector4d grad;
    for (int i = 1; i <= layout.horizon; ++i) {
      sens = a[static_cast<size_t>(i - 1)] * sens;
      sens.block<4, 2>(0, layout.control_offset(i - 1)) +=
          b[static_cast<size_t>(i - 1)];
      if (map.num_obstacles > 0 && i <= map.num_obstacle_nodes) {
        for (int o = 0; o < map.num_obstacles; ++o)
          for (int circle = 0; circle < 2; ++circle) {
            circle_clearance(states.col(i),
                             p->obstacles[static_cast<size_t>(o)], *p, circle,
                             &grad);
            jac.row(map.obstacle_row(i, o, circle)).noalias() =
                grad.transpose() * sens;
          }
      }
      if (map.ineq_state_base >= 0 && i <= map.num_state_nodes)
        jac.block(map.ineq_state_base + 4 * (i - 1), 0, 4, layout.dim()) =
            sens;
      if (map.ineq_terminal_ball >= 0 && i == layout.horizon) {
        const Eigen::Vector4d dn =
            states.col(i) - p->reference_at(i).vec();
        jac.row(map.ineq_terminal_ball).noalias() =
            2.0 * dn.transpose() * sens;
      }
    }
    for (int i = 1; i <= map.num_rate_pairs; ++i) {
      jac.block<2, 2>(map.rate_row(i), layout.control_offset(i))
          .setIdentity();
      jac.block<2, 2>(map.rate_row(i), layout.control_offset(i - 1)) =
          -Eigen::Matrix2d::Identity();
    }
  };

  return nlp;
}

// ---------------------------------------------------------------------------
// Shared utilities
// ---------------------------------------------------------------------------

Eigen::VectorXd NlpProblem::eval_gradient(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g(num_vars);
  gradient(w, g);
  return g;
}
Eigen::VectorXd NlpProblem::eval_equality(const Eigen::VectorXd& w) const {
  Eigen::VectorXd b(num_eq);
  if (num_eq > 0) equality(w, b);
  return b;
}
Eigen::VectorXd NlpProblem::eval_inequality(const Eigen::VectorXd& w) const {
  Eigen::VectorXd c(num_ineq);
  if (num_ineq > 0) inequality(w, c);
  return c;
}
Eigen::MatrixXd NlpProblem::eval_equality_jacobian(
    const Eigen::VectorXd& w) const {
  Eigen::MatrixXd jac(num_eq, num_vars);
  if (num_eq > 0) equality_jacobian(w, jac);
  return jac;
}
Eigen::MatrixXd NlpProblem::eval_inequality_jacobian(
    const Eigen::VectorXd& w) const {
  Eigen::MatrixXd jac(num_ineq, num_vars);
  if (num_ineq > 0) inequality_jacobian(w, jac);
  return jac;
}

double DerivativeCheck::max_error() const {
  return std::max({objective_error, equality_error, inequality_error});
}

DerivativeCheck check_derivatives(const NlpProblem& nlp,
                                  const Eigen::VectorXd& w, double h) {
  if (w.size() != nlp.num_vars)
    throw std::invalid_argument("check_derivatives: point has wrong length");
  if (!(h > 0.0))
    throw std::invalid_argument("check_derivatives: step must be > 0");

  const auto rel = [](double analytic, double fd) {
    return std::abs(analytic - fd) /
           std::max({1.0, std::abs(analytic), std::abs(fd)});
  };

  DerivativeCheck out;
  Eigen::VectorXd wp = w, wm = w;

  const Eigen::VectorXd g = nlp.eval_gradient(w);
  const Eigen::MatrixXd jb = nlp.eval_equality_jacobian(w);
  const Eigen::MatrixXd jc = nlp.eval_inequality_jacobian(w);

  for (int j = 0; j < nlp.num_vars; ++j) {
    wp(j) = w(j) + h;
    wm(j) = w(j) - h;

    const double fd_obj =
        (nlp.objective(wp) - nlp.objective(wm)) / (2.0 * h);
    out.objective_error = std::max(out.objective_error, rel(g(j), fd_obj));

    if (nlp.num_eq > 0) {
      const Eigen::VectorXd col =
          (nlp.eval_equality(wp) - nlp.eval_equality(wm)) / (2.0 * h);
      for (int i = 0; i < nlp.num_eq; ++i)
        out.equality_error = std::max(out.equality_error, rel(jb(i, j), col(i)));
    }
    if (nlp.num_ineq > 0) {
      const Eigen::VectorXd col =
          (nlp.eval_inequality(wp) - nlp.eval_inequality(wm)) / (2.0 * h);
      for (int i = 0; i < nlp.num_ineq; ++i)
        out.inequality_error =
            std::max(out.inequality_error, rel(jc(i, j), col(i)));
    }

    wp(j) = w(j);
    wm(j) = w(j);
  }
  return out;
}

}  // namespace ttmpc
