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

#ifndef TTMPC_NLP_HPP_
#define TTMPC_NLP_HPP_

#include <vector>

#include <Eigen/Dense>

#include "ttmpc/transcription.hpp"

namespace ttmpc {

// Augmented-Lagrangian solver for the box-constrained NLPs produced by the
// transcriptions. Equalities and general inequalities are handled by
// first-order multiplier updates with penalty escalation; the variable box is
// enforced exactly by a projected limited-memory BFGS inner loop.
//
// The solver is deterministic: given the same problem, start point, warm
// multipliers and options (with the time budget disabled) it performs the
// same arithmetic and returns bitwise identical results.

struct SolverOptions {
  int max_iterations = 2000;         // total inner iterations across outers
  int max_outer_iterations = 60;
  double kkt_tolerance = 1e-4;
  double constraint_tolerance = 1e-6;
  double penalty_init = 100.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  int lbfgs_memory = 8;
  double time_budget_s = 0.0;        // 0 disables the wall-clock cutoff
  bool record_history = false;

  void validate() const;
};

// Lagrange multiplier estimates. Inequality rows are two-sided, so each row
// carries a nonnegative multiplier per side; the signed combination follows
// the convention L = f + bound.w + equality.b + (upper - lower).c, which
// makes an upper-side multiplier positive and a lower-side one negative in
// the combined view.
struct Multipliers {
  Eigen::VectorXd bound;       // one per decision variable
  Eigen::VectorXd equality;    // one per equality row, unrestricted sign
  Eigen::VectorXd ineq_lower;  // one per inequality row, >= 0
  Eigen::VectorXd ineq_upper;  // one per inequality row, >= 0

  Eigen::VectorXd inequality() const { return ineq_upper - ineq_lower; }

  static Multipliers zero(const NlpProblem& nlp);
  bool matches(const NlpProblem& nlp) const;
};

enum class SolveStatus { kOptimal, kMaxIterations, kInfeasible, kTimeBudget };

const char* to_string(SolveStatus status);

struct NlpSolution {
  Eigen::VectorXd w;
  double objective_value = 0.0;
  Multipliers multipliers;
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;        // inner iterations spent
  int outer_iterations = 0;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;
  std::vector<double> kkt_history;  // one entry per outer iteration
};

// Minimizes the problem starting from w_init. Warm multipliers, when given,
// must match the problem dimensions; they seed the outer loop and typically
// cut the iteration count substantially on receding-horizon resolves.
NlpSolution solve(const NlpProblem& nlp, const Eigen::VectorXd& w_init,
                  const SolverOptions& options = SolverOptions{},
                  const Multipliers* warm = nullptr);

// Lagrangian value under the sign convention documented on Multipliers.
double lagrangian(const NlpProblem& nlp, const Eigen::VectorXd& w,
                  const Multipliers& mult);

// Max of projected stationarity, equality violation and inequality
// complementarity, scaled by max(1, ||grad f||_inf) so the measure does not
// change when the objective is rescaled. Bound multipliers are implied by
// the projection, so the measure is meaningful even when mult.bound is zero.
double kkt_residual(const NlpProblem& nlp, const Eigen::VectorXd& w,
                    const Multipliers& mult);

// Worst violation across equality rows, inequality rows and the variable box.
double constraint_violation(const NlpProblem& nlp, const Eigen::VectorXd& w);

}  // namespace ttmpc

#endif  // TTMPC_NLP_HPP_
