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

#ifndef TTMPC_TRANSCRIPTION_HPP
#define TTMPC_TRANSCRIPTION_HPP

#include <functional>

#include <Eigen/Core>

#include "ttmpc/ocp.hpp"

namespace ttmpc {

enum class ShootingKind { kMultiple, kSingle };

// Decision-vector layout.
//
// Multiple shooting interleaves shooting states and controls,
//   w = [s_0, q_0, s_1, q_1, ..., q_{N-1}, s_N],
// giving 4(N+1) + 2N variables; single shooting keeps only the stacked
// controls [q_0, ..., q_{N-1}].
struct DecisionLayout {
  static constexpr int kStateDim = 4;
  static constexpr int kControlDim = 2;

  ShootingKind kind = ShootingKind::kMultiple;
  int horizon = 0;

  int dim() const {
    return kind == ShootingKind::kMultiple
               ? kStateDim * (horizon + 1) + kControlDim * horizon
               : kControlDim * horizon;
  }
  int state_offset(int k) const {
    return (kStateDim + kControlDim) * k;  // multiple shooting only
  }
  int control_offset(int k) const {
    return kind == ShootingKind::kMultiple
               ? (kStateDim + kControlDim) * k + kStateDim
               : kControlDim * k;
  }
};

struct Trajectory {
  Eigen::Matrix4Xd states;    // horizon+1 columns (empty for single shooting)
  Eigen::Matrix2Xd controls;  // horizon columns
};

Eigen::VectorXd pack(const Trajectory& traj, const DecisionLayout& layout);
Trajectory unpack(const Eigen::VectorXd& w, const DecisionLayout& layout);

// Row bookkeeping for the assembled constraint system, used for banded-
// structure tests and for shifting dual estimates between planner ticks.
struct ConstraintMap {
  int num_eq = 0;
  int num_ineq = 0;

  int eq_initial = -1;      // 4 rows pinning s_0 (multiple shooting)
  int eq_defect_base = -1;  // defect block i at eq_defect_base + 4*i
  int num_defects = 0;
  int eq_terminal = -1;  // 4 rows when terminal equality is requested

  int ineq_obstacle_base = -1;  // nodes 1..N, per obstacle, per body circle
  int num_obstacle_nodes = 0;
  int num_obstacles = 0;
  int ineq_rate_base = -1;  // pair i couples q_{i-1}, q_i (i = 1..N-1)
  int num_rate_pairs = 0;
  int ineq_state_base = -1;  // hard state rows (single shooting only)
  int num_state_nodes = 0;
  int ineq_terminal_ball = -1;  // single squared-norm row

  int obstacle_row(int node, int obstacle, int circle) const {
    return ineq_obstacle_base +
           ((node - 1) * num_obstacles + obstacle) * 2 + circle;
  }
  int rate_row(int pair) const { return ineq_rate_base + 2 * (pair - 1); }
};

// Nonlinear program in the canonical form
//   min f(w)  s.t.  lower <= w <= upper,  b(w) = 0,
//                   ineq_lower <= c(w) <= ineq_upper.
// Evaluators write into caller-provided storage and are pure and
// deterministic.
struct NlpProblem {
  int num_vars = 0;
  int num_eq = 0;
  int num_ineq = 0;

  Eigen::VectorXd lower, upper;            // variable box
  Eigen::VectorXd ineq_lower, ineq_upper;  // general inequality bounds

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> gradient;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> equality;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>
      equality_jacobian;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> inequality;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>
      inequality_jacobian;

  // Optional: diagonal of the objective's Hessian. When present the solver
  // takes projected Gauss-Newton steps on its subproblems (this diagonal plus
  // the penalty-weighted Jacobian outer products) instead of limited-memory
  // quasi-Newton ones. For shooting transcriptions, whose objectives are
  // separable quadratics, the diagonal is exact and the resulting model makes
  // long horizons converge in a handful of steps where first-order descent
  // needs thousands.
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>
      cost_hessian_diag;

  DecisionLayout layout;
  ConstraintMap map;

  // Allocating conveniences for tests and diagnostics.
  Eigen::VectorXd eval_gradient(const Eigen::VectorXd& w) const;
  Eigen::VectorXd eval_equality(const Eigen::VectorXd& w) const;
  Eigen::VectorXd eval_inequality(const Eigen::VectorXd& w) const;
  Eigen::MatrixXd eval_equality_jacobian(const Eigen::VectorXd& w) const;
  Eigen::MatrixXd eval_inequality_jacobian(const Eigen::VectorXd& w) const;
};

NlpProblem transcribe_multiple_shooting(const OcpProblem& problem);
NlpProblem transcribe_single_shooting(const OcpProblem& problem);

// Integrates the model under the packed controls starting from problem.x0,
// producing a defect-free state trajectory (used for warm starts, tests and
// the single-shooting evaluators).
Eigen::Matrix4Xd rollout_states(const OcpProblem& problem,
                                const Eigen::Matrix2Xd& controls);

// Central-difference verification of every supplied derivative. Returns the
// worst relative mismatch per group; relative means |a - fd| scaled by
// max(1, |a|, |fd|).
struct DerivativeCheck {
  double objective_error = 0.0;
  double equality_error = 0.0;
  double inequality_error = 0.0;
  double max_error() const;
};

DerivativeCheck check_derivatives(const NlpProblem& nlp,
                                  const Eigen::VectorXd& w, double h = 1e-5);

}  // namespace ttmpc

#endif  // TTMPC_TRANSCRIPTION_HPP
