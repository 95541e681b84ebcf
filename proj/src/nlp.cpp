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

#include "ttmpc/nlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace ttmpc {

namespace {

constexpr double kBoundInf = 1e19;

bool finite_lo(double v) { return v > -kBoundInf; }
bool finite_hi(double v) { return v < kBoundInf; }

Eigen::VectorXd project_box(const Eigen::VectorXd& w,
                            const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  return w.cwiseMax(lo).cwiseMin(hi);
}

// One-sided penalty piece for a constraint g >= 0 with multiplier estimate
// mu >= 0 and penalty rho. Smooth in g, matches the plain quadratic penalty
// when mu = 0 and leaves satisfied constraints with large slack untouched.
double penalty_value(double g, double mu, double rho) {
  const double t = std::max(0.0, mu - rho * g);
  return (t * t - mu * mu) / (2.0 * rho);
}

// d penalty / d g.
double penalty_slope(double g, double mu, double rho) {
  return -std::max(0.0, mu - rho * g);
}

struct AlState {
  Eigen::VectorXd eq_mult;
  Eigen::VectorXd lo_mult;
  Eigen::VectorXd hi_mult;
  double rho = 0.0;
};

class AlFunction {
 public:
  AlFunction(const NlpProblem& nlp, const AlState& st) : nlp_(nlp), st_(st) {}

  double value(const Eigen::VectorXd& w) const {
    double total = nlp_.objective(w);
    if (nlp_.num_eq > 0) {
      b_ = nlp_.eval_equality(w);
      total += st_.eq_mult.dot(b_) + 0.5 * st_.rho * b_.squaredNorm();
    }
    if (nlp_.num_ineq > 0) {
      c_ = nlp_.eval_inequality(w);
      for (int i = 0; i < nlp_.num_ineq; ++i) {
        if (finite_lo(nlp_.ineq_lower(i)))
          total += penalty_value(c_(i) - nlp_.ineq_lower(i), st_.lo_mult(i),
                                 st_.rho);
        if (finite_hi(nlp_.ineq_upper(i)))
          total += penalty_value(nlp_.ineq_upper(i) - c_(i), st_.hi_mult(i),
                                 st_.rho);
      }
    }
    return total;
  }

  // Value and gradient in one pass; reuses the constraint evaluations.
  double value_gradient(const Eigen::VectorXd& w, Eigen::VectorXd& g) const {
    double total = nlp_.objective(w);
    nlp_.gradient(w, g);
    if (nlp_.num_eq > 0) {
      b_ = nlp_.eval_equality(w);
      total += st_.eq_mult.dot(b_) + 0.5 * st_.rho * b_.squaredNorm();
      jb_ = nlp_.eval_equality_jacobian(w);
      g.noalias() += jb_.transpose() * (st_.eq_mult + st_.rho * b_);
    }
    if (nlp_.num_ineq > 0) {
      c_ = nlp_.eval_inequality(w);
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(nlp_.num_ineq);
      for (int i = 0; i < nlp_.num_ineq; ++i) {
        if (finite_lo(nlp_.ineq_lower(i))) {
          const double gi = c_(i) - nlp_.ineq_lower(i);
          total += penalty_value(gi, st_.lo_mult(i), st_.rho);
          coef(i) += penalty_slope(gi, st_.lo_mult(i), st_.rho);
        }
        if (finite_hi(nlp_.ineq_upper(i))) {
          const double gi = nlp_.ineq_upper(i) - c_(i);
          total += penalty_value(gi, st_.hi_mult(i), st_.rho);
          coef(i) -= penalty_slope(gi, st_.hi_mult(i), st_.rho);
        }
      }
      jc_ = nlp_.eval_inequality_jacobian(w);
      g.noalias() += jc_.transpose() * coef;
    }
    return total;
  }

 private:
  const NlpProblem& nlp_;
  const AlState& st_;
  mutable Eigen::VectorXd b_, c_;
  mutable Eigen::MatrixXd jb_, jc_;
};

struct LbfgsMemory {
  std::deque<Eigen::VectorXd> s;
  std::deque<Eigen::VectorXd> y;
  std::deque<double> rho;
  int capacity = 8;

  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }

  void push(const Eigen::VectorXd& si, const Eigen::VectorXd& yi) {
    const double sy = si.dot(yi);
    if (sy <= 1e-10 * si.norm() * yi.norm()) return;  // curvature too weak
    if (static_cast<int>(s.size()) == capacity) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
    s.push_back(si);
    y.push_back(yi);
    rho.push_back(1.0 / sy);
  }

  // Two-loop recursion, H0 = gamma * I with gamma from the newest pair.
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const {
    Eigen::VectorXd q = g;
    const int m = static_cast<int>(s.size());
    if (m == 0) return q;
    std::vector<double> alpha(static_cast<size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
      alpha[static_cast<size_t>(i)] =
          rho[static_cast<size_t>(i)] * s[static_cast<size_t>(i)].dot(q);
      q -= alpha[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    }
    const double gamma =
        s.back().dot(y.back()) / std::max(y.back().squaredNorm(), 1e-30);
    q *= gamma;
    for (int i = 0; i < m; ++i) {
      const double beta =
          rho[static_cast<size_t>(i)] * y[static_cast<size_t>(i)].dot(q);
      q += (alpha[static_cast<size_t>(i)] - beta) * s[static_cast<size_t>(i)];
    }
    return q;
  }
};

struct InnerResult {
  double value = 0.0;
  int iterations = 0;
  bool hit_time_budget = false;
};

// Projected L-BFGS descent on the augmented Lagrangian over the variable box.
// Stops when the projected gradient is below tol, progress stalls, or a
// budget runs out.
InnerResult minimize_inner(const NlpProblem& nlp, const AlFunction& fn,
                           Eigen::VectorXd& w, double tol, int max_iters,
                           int memory,
                           const std::chrono::steady_clock::time_point* deadline) {
  InnerResult res;
  LbfgsMemory mem;
  mem.capacity = memory;

  Eigen::VectorXd g(nlp.num_vars);
  double val = fn.value_gradient(w, g);
  res.value = val;

  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd pg = w - project_box(w - g, nlp.lower, nlp.upper);
    if (pg.lpNorm<Eigen::Infinity>() <= tol) break;
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      res.hit_time_budget = true;
      break;
    }

    Eigen::VectorXd d = -mem.apply(g);
    if (d.dot(g) > -1e-12 * d.norm() * g.norm()) {
      mem.clear();
      d = -g;
    }

    // Backtracking Armijo along the projected arc.
    const double armijo = 1e-4;
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd w_trial;
    double val_trial = val;
    for (int ls = 0; ls < 40; ++ls) {
      w_trial = project_box(w + alpha * d, nlp.lower, nlp.upper);
      const Eigen::VectorXd delta = w_trial - w;
      const double dirder = g.dot(delta);
      if (delta.lpNorm<Eigen::Infinity>() < 1e-16) break;
      val_trial = fn.value(w_trial);
      if (val_trial <= val + armijo * dirder && dirder < 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (mem.s.empty()) break;  // steepest descent already failed; stalled
      mem.clear();               // quasi-Newton model is bad, retry fresh
      continue;
    }

    Eigen::VectorXd g_new(nlp.num_vars);
    const double val_new = fn.value_gradient(w_trial, g_new);
    mem.push(w_trial - w, g_new - g);
    w = w_trial;
    g = g_new;
    val = val_new;
    res.value = val;
    ++res.iterations;
  }
  return res;
}

// Appends the outer product of one constraint row (times weight) over the
// free variables to the triplet list. Rows from shooting transcriptions have
// a handful of nonzeros, so scanning the dense row and expanding pairs stays
// cheap even when called once per row per step.
void add_row_outer_product(const Eigen::MatrixXd& jac, int row, double weight,
                           const std::vector<int>& free_of,
                           std::vector<Eigen::Triplet<double>>& triplets,
                           std::vector<int>& scratch) {
  scratch.clear();
  for (int j = 0; j < jac.cols(); ++j)
    if (jac(row, j) != 0.0 && free_of[static_cast<size_t>(j)] >= 0)
      scratch.push_back(j);
  for (int a : scratch) {
    const double va = weight * jac(row, a);
    const int fa = free_of[static_cast<size_t>(a)];
    for (int b : scratch)
      triplets.emplace_back(fa, free_of[static_cast<size_t>(b)],
                            va * jac(row, b));
  }
}

// Projected Gauss-Newton descent on the augmented Lagrangian. The model
// Hessian is the objective's diagonal plus rho-weighted outer products of the
// constraint rows whose penalty sits in its quadratic region at the current
// point; variables pinned by the box drop out of the linear solve. Each step
// costs one sparse factorization of a small system, and the quadratic model
// is exact for the shooting transcriptions, so subproblems converge in a
// handful of steps independent of the horizon length.
InnerResult minimize_inner_newton(
    const NlpProblem& nlp, const AlState& st, const AlFunction& fn,
    Eigen::VectorXd& w, double tol, int max_iters,
    const std::chrono::steady_clock::time_point* deadline) {
  InnerResult res;

  Eigen::VectorXd g(nlp.num_vars), hdiag(nlp.num_vars);
  Eigen::VectorXd b, c;
  Eigen::MatrixXd jb, jc;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> scratch;
  int stalled = 0;

  for (int it = 0; it < max_iters; ++it) {
    // One evaluation of everything per step; the pieces feed the gradient
    // and the Gauss-Newton model alike.
    double val = nlp.objective(w);
    nlp.gradient(w, g);
    if (nlp.num_eq > 0) {
      b = nlp.eval_equality(w);
      val += st.eq_mult.dot(b) + 0.5 * st.rho * b.squaredNorm();
      jb = nlp.eval_equality_jacobian(w);
      g.noalias() += jb.transpose() * (st.eq_mult + st.rho * b);
    }
    Eigen::VectorXd region_weight;
    if (nlp.num_ineq > 0) {
      c = nlp.eval_inequality(w);
      region_weight = Eigen::VectorXd::Zero(nlp.num_ineq);
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(nlp.num_ineq);
      for (int i = 0; i < nlp.num_ineq; ++i) {
        if (finite_lo(nlp.ineq_lower(i))) {
          const double gi = c(i) - nlp.ineq_lower(i);
          val += penalty_value(gi, st.lo_mult(i), st.rho);
          const double slope = penalty_slope(gi, st.lo_mult(i), st.rho);
          coef(i) += slope;
          if (slope < 0.0) region_weight(i) += st.rho;
        }
        if (finite_hi(nlp.ineq_upper(i))) {
          const double gi = nlp.ineq_upper(i) - c(i);
          val += penalty_value(gi, st.hi_mult(i), st.rho);
          const double slope = penalty_slope(gi, st.hi_mult(i), st.rho);
          coef(i) -= slope;
          if (slope < 0.0) region_weight(i) += st.rho;
        }
      }
      jc = nlp.eval_inequality_jacobian(w);
      g.noalias() += jc.transpose() * coef;
    }
    res.value = val;

    const Eigen::VectorXd pg = w - project_box(w - g, nlp.lower, nlp.upper);
    if (pg.lpNorm<Eigen::Infinity>() <= tol) break;
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      res.hit_time_budget = true;
      break;
    }

    // Variables held at a bound by the gradient leave the model; the step
    // keeps them put and the projection in the line search re-checks.
    std::vector<int> free_of(static_cast<size_t>(nlp.num_vars), -1);
    int num_free = 0;
    for (int j = 0; j < nlp.num_vars; ++j) {
      const double act = 1e-10 * std::max(1.0, std::abs(w(j)));
      const bool at_lo =
          finite_lo(nlp.lower(j)) && w(j) - nlp.lower(j) <= act && g(j) > 0.0;
      const bool at_hi =
          finite_hi(nlp.upper(j)) && nlp.upper(j) - w(j) <= act && g(j) < 0.0;
      if (!at_lo && !at_hi) free_of[static_cast<size_t>(j)] = num_free++;
    }
    if (num_free == 0) break;  // every variable pinned and pushing outward

    nlp.cost_hessian_diag(w, hdiag);

    Eigen::VectorXd d;
    double damping = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      triplets.clear();
      for (int j = 0; j < nlp.num_vars; ++j) {
        const int fj = free_of[static_cast<size_t>(j)];
        if (fj >= 0)
          triplets.emplace_back(fj, fj,
                                std::max(hdiag(j), 0.0) + 1e-10 + damping);
      }
      for (int i = 0; i < nlp.num_eq; ++i)
        add_row_outer_product(jb, i, st.rho, free_of, triplets, scratch);
      for (int i = 0; i < nlp.num_ineq; ++i)
        if (region_weight(i) > 0.0)
          add_row_outer_product(jc, i, region_weight(i), free_of, triplets,
                                scratch);

      Eigen::SparseMatrix<double> h(num_free, num_free);
      h.setFromTriplets(triplets.begin(), triplets.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
      if (ldlt.info() != Eigen::Success) {
        damping = damping == 0.0 ? 1e-6 : damping * 1e3;
        continue;
      }

      Eigen::VectorXd g_red(num_free);
      for (int j = 0; j < nlp.num_vars; ++j)
        if (free_of[static_cast<size_t>(j)] >= 0)
          g_red(free_of[static_cast<size_t>(j)]) = g(j);
      const Eigen::VectorXd d_red = ldlt.solve(-g_red);
      if (!d_red.allFinite() ||
          d_red.dot(g_red) > -1e-14 * d_red.norm() * g_red.norm()) {
        damping = damping == 0.0 ? 1e-6 : damping * 1e3;
        continue;
      }
      d = Eigen::VectorXd::Zero(nlp.num_vars);
      for (int j = 0; j < nlp.num_vars; ++j)
        if (free_of[static_cast<size_t>(j)] >= 0)
          d(j) = d_red(free_of[static_cast<size_t>(j)]);
      break;
    }
    if (d.size() == 0) d = -g;  // model irreparably bad this step

    // Backtracking Armijo along the projected arc, as in the first-order
    // inner loop.
    const double armijo = 1e-4;
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd w_trial;
    double val_trial = val;
    for (int ls = 0; ls < 40; ++ls) {
      w_trial = project_box(w + alpha * d, nlp.lower, nlp.upper);
      const Eigen::VectorXd delta = w_trial - w;
      const double dirder = g.dot(delta);
      if (delta.lpNorm<Eigen::Infinity>() < 1e-16) break;
      val_trial = fn.value(w_trial);
      if (val_trial <= val + armijo * dirder && dirder < 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no acceptable step along Newton or gradient

    // Steps that no longer move the value are noise, not progress; hand the
    // iterate back so the outer loop can escalate the penalty instead.
    if (val - val_trial <= 1e-14 * (1.0 + std::abs(val))) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }

    w = w_trial;
    ++res.iterations;
  }
  return res;
}

struct Violations {
  double equality = 0.0;
  double inequality = 0.0;
  double box = 0.0;
  double max() const { return std::max({equality, inequality, box}); }
};

Violations measure_violations(const NlpProblem& nlp, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c) {
  Violations v;
  if (nlp.num_eq > 0) v.equality = b.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < nlp.num_ineq; ++i) {
    if (finite_lo(nlp.ineq_lower(i)))
      v.inequality = std::max(v.inequality, nlp.ineq_lower(i) - c(i));
    if (finite_hi(nlp.ineq_upper(i)))
      v.inequality = std::max(v.inequality, c(i) - nlp.ineq_upper(i));
  }
  v.box = std::max((nlp.lower - w).maxCoeff(), (w - nlp.upper).maxCoeff());
  v.box = std::max(v.box, 0.0);
  v.inequality = std::max(v.inequality, 0.0);
  return v;
}

// Stationarity of the Lagrangian measured through the box projection plus
// complementarity of the inequality sides. Both are scaled by the objective
// gradient magnitude so the measure is invariant under scaling the cost;
// primal feasibility is checked separately in absolute terms.
double kkt_measure(const NlpProblem& nlp, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& eq_mult,
                   const Eigen::VectorXd& lo_mult,
                   const Eigen::VectorXd& hi_mult, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c) {
  Eigen::VectorXd r = nlp.eval_gradient(w);
  const double scale = std::max(1.0, r.lpNorm<Eigen::Infinity>());
  if (nlp.num_eq > 0)
    r.noalias() += nlp.eval_equality_jacobian(w).transpose() * eq_mult;
  if (nlp.num_ineq > 0)
    r.noalias() +=
        nlp.eval_inequality_jacobian(w).transpose() * (hi_mult - lo_mult);
  const double stationarity =
      (w - project_box(w - r, nlp.lower, nlp.upper)).lpNorm<Eigen::Infinity>();

  double comp = 0.0;
  if (nlp.num_eq > 0) comp = b.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < nlp.num_ineq; ++i) {
    if (finite_lo(nlp.ineq_lower(i)))
      comp = std::max(comp,
                      std::abs(std::min(lo_mult(i), c(i) - nlp.ineq_lower(i))));
    if (finite_hi(nlp.ineq_upper(i)))
      comp = std::max(comp,
                      std::abs(std::min(hi_mult(i), nlp.ineq_upper(i) - c(i))));
  }
  return std::max(stationarity, comp) / scale;
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iterations < 1 || max_outer_iterations < 1)
    throw std::invalid_argument("SolverOptions: iteration caps must be >= 1");
  if (!(kkt_tolerance > 0.0) || !(constraint_tolerance > 0.0))
    throw std::invalid_argument("SolverOptions: tolerances must be > 0");
  if (!(penalty_init > 0.0) || !(penalty_growth > 1.0))
    throw std::invalid_argument(
        "SolverOptions: penalty_init must be > 0 and penalty_growth > 1");
  if (lbfgs_memory < 1)
    throw std::invalid_argument("SolverOptions: lbfgs_memory must be >= 1");
  if (time_budget_s < 0.0)
    throw std::invalid_argument("SolverOptions: time budget must be >= 0");
}

Multipliers Multipliers::zero(const NlpProblem& nlp) {
  Multipliers m;
  m.bound = Eigen::VectorXd::Zero(nlp.num_vars);
  m.equality = Eigen::VectorXd::Zero(nlp.num_eq);
  m.ineq_lower = Eigen::VectorXd::Zero(nlp.num_ineq);
  m.ineq_upper = Eigen::VectorXd::Zero(nlp.num_ineq);
  return m;
}

bool Multipliers::matches(const NlpProblem& nlp) const {
  return bound.size() == nlp.num_vars && equality.size() == nlp.num_eq &&
         ineq_lower.size() == nlp.num_ineq &&
         ineq_upper.size() == nlp.num_ineq;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimeBudget:
      return "time_budget";
  }
  return "unknown";
}

NlpSolution solve(const NlpProblem& nlp, const Eigen::VectorXd& w_init,
                  const SolverOptions& options, const Multipliers* warm) {
  options.validate();
  if (w_init.size() != nlp.num_vars)
    throw std::invalid_argument("solve: start point has wrong length");
  if (warm && !warm->matches(nlp))
    throw std::invalid_argument("solve: warm multipliers have wrong shape");

  AlState st;
  st.rho = options.penalty_init;
  if (warm) {
    st.eq_mult = warm->equality;
    st.lo_mult = warm->ineq_lower.cwiseMax(0.0);
    st.hi_mult = warm->ineq_upper.cwiseMax(0.0);
  } else {
    st.eq_mult = Eigen::VectorXd::Zero(nlp.num_eq);
    st.lo_mult = Eigen::VectorXd::Zero(nlp.num_ineq);
    st.hi_mult = Eigen::VectorXd::Zero(nlp.num_ineq);
  }

  NlpSolution sol;
  sol.w = project_box(w_init, nlp.lower, nlp.upper);

  std::chrono::steady_clock::time_point deadline;
  const bool timed = options.time_budget_s > 0.0;
  if (timed) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(options.time_budget_s));
  }

  double prev_violation = std::numeric_limits<double>::infinity();
  int stagnant_outers = 0;
  int iters_left = options.max_iterations;
  // Inner tolerance tightens with the outers so early subproblems stay cheap.
  double inner_tol = std::max(1e-2, options.kkt_tolerance);
  // Feasibility gate for the multiplier updates. A first-order step taken at
  // a badly infeasible iterate drags the estimates away from the true duals
  // (the step is rho * b, and rho can be huge), after which every later
  // subproblem is poisoned. Updates are therefore committed only when the
  // violation is under the gate; otherwise the estimates stay frozen and the
  // penalty grows, which is what actually restores feasibility.
  double feas_gate = std::max(1e-2, 10.0 * options.constraint_tolerance);

  const bool newton = static_cast<bool>(nlp.cost_hessian_diag);
  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    const AlFunction fn(nlp, st);
    const InnerResult inner =
        newton ? minimize_inner_newton(nlp, st, fn, sol.w, inner_tol,
                                       iters_left, timed ? &deadline : nullptr)
               : minimize_inner(nlp, fn, sol.w, inner_tol, iters_left,
                                options.lbfgs_memory,
                                timed ? &deadline : nullptr);
    iters_left -= inner.iterations;
    sol.iterations += inner.iterations;
    sol.outer_iterations = outer + 1;

    const Eigen::VectorXd b = nlp.eval_equality(sol.w);
    const Eigen::VectorXd c = nlp.eval_inequality(sol.w);
    const Violations viol = measure_violations(nlp, sol.w, b, c);

    // Candidate first-order multiplier updates. The inner solve makes the
    // iterate stationary for f + eq_mult'b + rho/2 |b|^2, so these are the
    // estimates the current point actually certifies.
    Eigen::VectorXd eq_hat = st.eq_mult;
    Eigen::VectorXd lo_hat = st.lo_mult;
    Eigen::VectorXd hi_hat = st.hi_mult;
    if (nlp.num_eq > 0) eq_hat += st.rho * b;
    for (int i = 0; i < nlp.num_ineq; ++i) {
      if (finite_lo(nlp.ineq_lower(i)))
        lo_hat(i) = std::max(
            0.0, lo_hat(i) - st.rho * (c(i) - nlp.ineq_lower(i)));
      if (finite_hi(nlp.ineq_upper(i)))
        hi_hat(i) = std::max(
            0.0, hi_hat(i) - st.rho * (nlp.ineq_upper(i) - c(i)));
    }

    const double kkt = kkt_measure(nlp, sol.w, eq_hat, lo_hat, hi_hat, b, c);
    if (options.record_history) sol.kkt_history.push_back(kkt);
    sol.kkt_residual = kkt;
    sol.constraint_violation = viol.max();

    if (viol.max() <= options.constraint_tolerance &&
        kkt <= options.kkt_tolerance) {
      st.eq_mult = std::move(eq_hat);
      st.lo_mult = std::move(lo_hat);
      st.hi_mult = std::move(hi_hat);
      sol.status = SolveStatus::kOptimal;
      break;
    }
    if (inner.hit_time_budget) {
      sol.status = SolveStatus::kTimeBudget;
      break;
    }
    if (iters_left <= 0) {
      sol.status = SolveStatus::kMaxIterations;
      break;
    }

    if (viol.max() <= feas_gate) {
      st.eq_mult = std::move(eq_hat);
      st.lo_mult = std::move(lo_hat);
      st.hi_mult = std::move(hi_hat);
      feas_gate = std::max(0.1 * feas_gate, options.constraint_tolerance);
    } else {
      // Same multipliers and a bigger penalty. Never skip the growth here:
      // with both frozen the next subproblem would be identical and the
      // outer loop would spin in place.
      st.rho = std::min(st.rho * options.penalty_growth, options.penalty_max);
    }
    if (viol.max() > options.constraint_tolerance && st.rho >= 1e10 &&
        viol.max() > 0.9 * prev_violation) {
      if (++stagnant_outers >= 5) {
        sol.status = SolveStatus::kInfeasible;
        break;
      }
    } else {
      stagnant_outers = 0;
    }
    prev_violation = viol.max();
    inner_tol = std::max(0.1 * options.kkt_tolerance, 0.1 * inner_tol);
  }

  sol.objective_value = nlp.objective(sol.w);

  // Recover bound multipliers from stationarity at the final point; they are
  // only nonzero where a bound is active.
  Eigen::VectorXd r = nlp.eval_gradient(sol.w);
  if (nlp.num_eq > 0)
    r.noalias() += nlp.eval_equality_jacobian(sol.w).transpose() * st.eq_mult;
  if (nlp.num_ineq > 0)
    r.noalias() += nlp.eval_inequality_jacobian(sol.w).transpose() *
                   (st.hi_mult - st.lo_mult);
  sol.multipliers.bound = Eigen::VectorXd::Zero(nlp.num_vars);
  for (int j = 0; j < nlp.num_vars; ++j) {
    const double tol =
        1e-8 * std::max(1.0, std::abs(sol.w(j)));
    const bool at_lower =
        finite_lo(nlp.lower(j)) && sol.w(j) - nlp.lower(j) <= tol;
    const bool at_upper =
        finite_hi(nlp.upper(j)) && nlp.upper(j) - sol.w(j) <= tol;
    if (at_lower || at_upper) sol.multipliers.bound(j) = -r(j);
  }
  sol.multipliers.equality = st.eq_mult;
  sol.multipliers.ineq_lower = st.lo_mult;
  sol.multipliers.ineq_upper = st.hi_mult;

  return sol;
}

double lagrangian(const NlpProblem& nlp, const Eigen::VectorXd& w,
                  const Multipliers& mult) {
  if (!mult.matches(nlp))
    throw std::invalid_argument("lagrangian: multipliers have wrong shape");
  double total = nlp.objective(w) + mult.bound.dot(w);
  if (nlp.num_eq > 0) total += mult.equality.dot(nlp.eval_equality(w));
  if (nlp.num_ineq > 0)
    total += mult.inequality().dot(nlp.eval_inequality(w));
  return total;
}

double kkt_residual(const NlpProblem& nlp, const Eigen::VectorXd& w,
                    const Multipliers& mult) {
  if (!mult.matches(nlp))
    throw std::invalid_argument("kkt_residual: multipliers have wrong shape");
  const Eigen::VectorXd b = nlp.eval_equality(w);
  const Eigen::VectorXd c = nlp.eval_inequality(w);
  return kkt_measure(nlp, w, mult.equality, mult.ineq_lower, mult.ineq_upper,
                     b, c);
}

double constraint_violation(const NlpProblem& nlp, const Eigen::VectorXd& w) {
  const Eigen::VectorXd b = nlp.eval_equality(w);
  const Eigen::VectorXd c = nlp.eval_inequality(w);
  return measure_violations(nlp, w, b, c).max();
}

}  // namespace ttmpc
