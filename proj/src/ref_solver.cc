// Copyright 2026 The stepopt Authors
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

#include "stepopt/ref_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "stepopt/errors.h"
#include "stepopt/gradients.h"

namespace stepopt {
namespace {

// The smooth NLP seen by the interior-point iteration: free variables only,
// constraints that depend on them, plus the bound dt_0 >= 0.
class ReducedProblem {
 public:
  ReducedProblem(const ProblemSpec& spec, const FootstepPlan& base)
      : spec_(spec), base_(base) {
    const int n = spec.horizon;
    const Eigen::VectorXd mask = free_variable_mask(spec);
    for (int i = 0; i < mask.size(); ++i) {
      if (mask(i) > 0.0) free_.push_back(i);
    }
    const auto& layout = constraint_layout(n);
    for (size_t i = 0; i < layout.size(); ++i) {
      const bool timing = layout[i].kind == ConstraintKind::kStepTimeUpper ||
                          layout[i].kind == ConstraintKind::kStepTimeLower;
      if (spec.optimize_durations || !timing) rows_.push_back(static_cast<int>(i));
    }
    dt0_bound_ = spec.optimize_durations;
    dt0_col_ = spec.optimize_durations
                   ? static_cast<int>(std::find(free_.begin(), free_.end(),
                                                duration_index(n, 0)) -
                                      free_.begin())
                   : -1;
  }

  int num_vars() const { return static_cast<int>(free_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()) + (dt0_bound_ ? 1 : 0); }
  int dt0_col() const { return dt0_col_; }
  const std::vector<int>& rows() const { return rows_; }

  Eigen::VectorXd initial_point() const {
    const Eigen::VectorXd z = to_vector(base_);
    Eigen::VectorXd x(num_vars());
    for (int i = 0; i < num_vars(); ++i) x(i) = z(free_[i]);
    return x;
  }

  FootstepPlan plan_at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd z = to_vector(base_);
    for (int i = 0; i < num_vars(); ++i) z(free_[i]) = x(i);
    FootstepPlan plan = base_;
    assign_from_vector(z, &plan);
    return plan;
  }

  struct Eval {
    double f = 0.0;
    Eigen::VectorXd grad;
    Eigen::VectorXd g;
    Eigen::MatrixXd jac;
  };

  Eval evaluate(const Eigen::VectorXd& x) const {
    Eval e;
    if (!x.allFinite()) {
      // A singular Newton system; the line search rejects this point.
      const double nan = std::numeric_limits<double>::quiet_NaN();
      e.f = nan;
      e.grad = Eigen::VectorXd::Constant(num_vars(), nan);
      e.g = Eigen::VectorXd::Constant(num_rows(), nan);
      e.jac = Eigen::MatrixXd::Constant(num_rows(), num_vars(), nan);
      return e;
    }
    const Derivatives d = evaluate_derivatives(spec_, plan_at(x));
    e.f = d.cost;
    e.grad.resize(num_vars());
    e.g.resize(num_rows());
    e.jac = Eigen::MatrixXd::Zero(num_rows(), num_vars());
    for (int i = 0; i < num_vars(); ++i) e.grad(i) = d.cost_gradient(free_[i]);
    for (size_t r = 0; r < rows_.size(); ++r) {
      e.g(r) = d.constraints(rows_[r]);
      for (int i = 0; i < num_vars(); ++i) {
        e.jac(r, i) = d.constraint_jacobian(rows_[r], free_[i]);
      }
    }
    if (dt0_bound_) {
      e.g(num_rows() - 1) = -x(dt0_col_);
      e.jac(num_rows() - 1, dt0_col_) = -1.0;
    }
    return e;
  }

 private:
  const ProblemSpec& spec_;
  FootstepPlan base_;
  std::vector<int> free_;
  std::vector<int> rows_;
  bool dt0_bound_ = false;
  int dt0_col_ = -1;
};

double max_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                       double tau) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -tau * v(i) / dv(i));
  }
  return a;
}

}  // namespace

SolveResult ref_solve(const ProblemSpec& spec, const WarmStart& warm,
                      const RefConfig& cfg) {
  check_dimensions(spec, warm.plan);
  const int m_full = num_constraints(spec.horizon);
  const ReducedProblem prob(spec, warm.plan);
  const int n = prob.num_vars();
  const int m = prob.num_rows();

  Eigen::VectorXd x = prob.initial_point();
  if (prob.dt0_col() >= 0) x(prob.dt0_col()) = std::max(x(prob.dt0_col()), 1e-4);

  double mu = cfg.mu_init;
  ReducedProblem::Eval ev = prob.evaluate(x);
  Eigen::VectorXd s = (-ev.g).cwiseMax(1e-2);
  Eigen::VectorXd lam(m);
  for (int r = 0; r < m; ++r) {
    double warm_l = 0.0;
    if (r < static_cast<int>(prob.rows().size()) &&
        warm.mult.lambda.size() == m_full) {
      warm_l = warm.mult.lambda(prob.rows()[r]);
    }
    lam(r) = std::max(warm_l, mu / s(r));
  }

  auto lagrangian_grad = [&](const Eigen::VectorXd& xx,
                             const Eigen::VectorXd& ll) {
    const ReducedProblem::Eval e = prob.evaluate(xx);
    return Eigen::VectorXd(e.grad + e.jac.transpose() * ll);
  };

  std::vector<std::pair<double, double>> filter;
  double theta_max = 0.0;
  double delta_prev = 0.0;
  bool converged = false;
  int iter = 0;
  std::string diagnostic;
  for (; iter < cfg.max_iters; ++iter) {
    const Eigen::VectorXd r_d = ev.grad + ev.jac.transpose() * lam;
    const Eigen::VectorXd r_p = ev.g + s;
    const Eigen::VectorXd sl = s.cwiseProduct(lam);

    if (r_d.lpNorm<Eigen::Infinity>() <= cfg.tol_stationarity &&
        r_p.lpNorm<Eigen::Infinity>() <= cfg.tol_constraint &&
        sl.lpNorm<Eigen::Infinity>() <= cfg.tol_complementarity &&
        ev.g.maxCoeff() <= cfg.tol_constraint) {
      converged = true;
      break;
    }
    // Barrier update (possibly several reductions in one go).
    while (mu > cfg.mu_min) {
      const double err =
          std::max({r_d.lpNorm<Eigen::Infinity>(), r_p.lpNorm<Eigen::Infinity>(),
                    (sl.array() - mu).abs().maxCoeff()});
      if (err > 10.0 * mu) break;
      mu = std::max(cfg.mu_min, std::min(0.2 * mu, std::pow(mu, 1.5)));
      filter.clear();
    }
    const Eigen::VectorXd r_c = (sl.array() - mu).matrix();

    // Hessian of the Lagrangian by central differences of its gradient.
    Eigen::MatrixXd hess(n, n);
    for (int j = 0; j < n; ++j) {
      const double h = cfg.hessian_step * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      double span = 2.0 * h;
      if (j == prob.dt0_col() && xm(j) < 0.0) {  // stay on the smooth side
        xm(j) = x(j);
        span = h;
      }
      hess.col(j) = (lagrangian_grad(xp, lam) - lagrangian_grad(xm, lam)) / span;
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    const Eigen::VectorXd sigma = lam.cwiseQuotient(s);
    Eigen::MatrixXd w =
        hess + ev.jac.transpose() * sigma.asDiagonal() * ev.jac;
    const Eigen::VectorXd rhs =
        -r_d + ev.jac.transpose() *
                   (r_c - lam.cwiseProduct(r_p)).cwiseQuotient(s);

    // Inertia correction: regularize until the reduced matrix is PD.
    double delta = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(w);
    if (llt.info() != Eigen::Success) {
      delta = delta_prev > 0.0 ? std::max(1e-8, delta_prev / 3.0) : 1e-4;
      while (true) {
        llt.compute(w + delta * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) break;
        delta *= 8.0;
        if (delta > 1e10) break;
      }
    }
    delta_prev = delta;
    if (llt.info() != Eigen::Success) {
      diagnostic = "KKT factorization failed";
      break;
    }
    w.diagonal().array() += delta;
    const Eigen::VectorXd dx = llt.solve(rhs);
    const Eigen::VectorXd ds = -r_p - ev.jac * dx;
    const Eigen::VectorXd dl =
        (-r_c + lam.cwiseProduct(r_p) + lam.cwiseProduct(ev.jac * dx))
            .cwiseQuotient(s);

    const double tau = std::max(0.99, 1.0 - mu);
    const double a_s = max_to_boundary(s, ds, tau);
    const double a_l = max_to_boundary(lam, dl, tau);

    // Filter line search on (constraint violation, barrier objective).
    auto barrier_obj = [&](const ReducedProblem::Eval& e,
                           const Eigen::VectorXd& ss) {
      return e.f - mu * ss.array().log().sum();
    };
    const double theta = r_p.lpNorm<1>();
    const double phi = barrier_obj(ev, s);
    const double slope = ev.grad.dot(dx) - mu * ds.cwiseQuotient(s).sum();
    if (filter.empty()) theta_max = 1e4 * std::max(1.0, theta);
    double a = a_s;
    ReducedProblem::Eval trial;
    Eigen::VectorXd x_trial, s_trial;
    bool accepted = false;
    bool armijo_step = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_trial = x + a * dx;
      s_trial = s + a * ds;
      trial = prob.evaluate(x_trial);
      if (!trial.grad.allFinite() || !trial.jac.allFinite() ||
          !std::isfinite(trial.f)) {
        a *= 0.5;
        continue;
      }
      const double theta_t = (trial.g + s_trial).lpNorm<1>();
      const double phi_t = barrier_obj(trial, s_trial);
      bool in_filter = theta_t > theta_max;
      for (const auto& [ft, fp] : filter) {
        if (theta_t >= ft && phi_t >= fp) in_filter = true;
      }
      if (!in_filter) {
        const bool switching =
            slope < 0.0 &&
            a * std::pow(-slope, 2.3) > std::pow(theta, 1.1);
        if (switching && theta <= 1e-4 * std::max(1.0, theta_max)) {
          if (phi_t <= phi + 1e-4 * a * slope) {
            accepted = true;
            armijo_step = true;
          }
        } else if (theta_t <= (1.0 - 1e-5) * theta ||
                   phi_t <= phi - 1e-5 * theta) {
          accepted = true;
        }
      }
      if (accepted) break;
      a *= 0.5;
    }
    if (!accepted) {
      // Take the tiny step anyway; the regularization grows next iteration.
      delta_prev = std::max(1e-4, 10.0 * delta_prev);
      if (!trial.grad.allFinite()) {
        diagnostic = "non-finite derivatives";
        break;
      }
    } else if (!armijo_step) {
      filter.emplace_back((1.0 - 1e-5) * theta, phi - 1e-5 * theta);
    }
    x = x_trial;
    s = s_trial;
    ev = trial;
    lam += a_l * dl;
  }

  SolveResult result;
  result.plan = prob.plan_at(x);
  result.mult = Multipliers::zeros(spec.horizon, 1.0);
  for (size_t r = 0; r < prob.rows().size(); ++r) {
    result.mult.lambda(prob.rows()[r]) = std::max(0.0, lam(r));
  }
  result.mult.mu = warm.mult.mu > 0.0 ? warm.mult.mu : 1.0;
  const Derivatives d = evaluate_derivatives(spec, result.plan);
  result.cost = d.cost;
  result.max_residual = std::max(0.0, d.constraints.maxCoeff());
  result.iterations = iter;
  result.converged = converged;
  result.feasible = converged && result.max_residual <= 1e-6;
  result.grad_norm =
      (ev.grad + ev.jac.transpose() * lam).lpNorm<Eigen::Infinity>();
  result.diagnostic = converged ? "" : (diagnostic.empty()
                                            ? "iteration limit reached"
                                            : diagnostic);
  return result;
}

WarmStart shift_warm_start(const WarmStart& prev, double elapsed,
                           bool step_taken, const ProblemSpec& spec) {
  if (elapsed < 0.0) {
    throw InvalidInputError("shift_warm_start: negative elapsed time");
  }
  check_dimensions(spec, prev.plan);
  WarmStart next = prev;
  next.wall_time = prev.wall_time + elapsed;
  const int n = spec.horizon;
  if (!step_taken) {
    next.plan.durations[0] = prev.plan.durations[0] - elapsed;
    return next;
  }

  const FootstepPlan& old = prev.plan;
  // Feet: u_k <- u_{k+1}; the new last foot repeats the last displacement
  // mirrored in y: u_N = u_{N-1} + diag(1, -1) (u_N_old - u_{N-1}_old).
  auto old_foot = [&](int k) {
    return k == 0 ? prev.support : old.footholds[k - 1];
  };
  next.support = old.footholds[0];
  for (int k = 1; k < n; ++k) next.plan.footholds[k - 1] = old.footholds[k];
  const Eigen::Vector2d disp = old_foot(n).xy - old_foot(n - 1).xy;
  const Foothold& new_prev = n >= 2 ? next.plan.footholds[n - 2] : next.support;
  Foothold last = old_foot(n);
  last.xy = new_prev.xy + Eigen::Vector2d(disp.x(), -disp.y());
  next.plan.footholds[n - 1] = last;

  // Durations: dt_k <- dt_{k+1}, the time spent on the new support already
  // deducted from the new dt_0, and dt_N repeated.
  const double into_new_step = std::max(0.0, elapsed - old.durations[0]);
  for (int k = 0; k < n; ++k) next.plan.durations[k] = old.durations[k + 1];
  next.plan.durations[0] -= into_new_step;
  next.plan.durations[n] = old.durations[n];
  next.step_index = prev.step_index + 1;

  // Multipliers follow their constraint to the shifted index.
  const auto& layout = constraint_layout(n);
  if (prev.mult.lambda.size() == static_cast<Eigen::Index>(layout.size())) {
    Eigen::VectorXd lam = prev.mult.lambda;
    for (size_t i = 0; i < layout.size(); ++i) {
      for (size_t j = 0; j < layout.size(); ++j) {
        if (layout[j].kind == layout[i].kind &&
            layout[j].index == layout[i].index + 1) {
          lam(i) = prev.mult.lambda(j);
        }
      }
    }
    next.mult.lambda = lam;
  }
  return next;
}

}  // namespace stepopt
