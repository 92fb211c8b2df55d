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

#include "stepopt/al_solver.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "stepopt/errors.h"
#include "stepopt/gradients.h"

namespace stepopt {

void AlConfig::validate() const {
  if (!(alpha > 0.0) || !(phi > 1.0) || !(mu0 > 0.0) ||
      !(grad_norm_delta_tol > 0.0) || !(constraint_tol > 0.0) ||
      !(loop_rate > 0.0) || max_inner_iters < 1 || inner_per_outer < 1 ||
      max_backtracks < 0) {
    throw InvalidInputError("AlConfig: invalid parameter");
  }
}

FootstepPlan project_durations(const FootstepPlan& plan,
                               const ProblemSpec& spec, double loop_rate,
                               std::optional<double> previous_dt0) {
  if (!(loop_rate > 0.0)) {
    throw InvalidInputError("project_durations: loop rate must be positive");
  }
  FootstepPlan out = plan;
  if (!spec.optimize_durations) return out;
  const ConstraintLimits& lim = spec.limits;
  double& dt0 = out.durations[0];
  if (dt0 < 0.0) {
    dt0 = previous_dt0.value_or(dt0) - 1.0 / loop_rate;
  } else {
    dt0 = std::max(dt0, lim.t_lower - spec.step_elapsed);
  }
  dt0 = std::min(dt0, lim.t_upper - spec.step_elapsed);
  for (size_t k = 1; k < out.durations.size(); ++k) {
    out.durations[k] = std::clamp(out.durations[k], lim.t_lower, lim.t_upper);
  }
  return out;
}

namespace {


}  // namespace

FootstepPlan project_plan(const FootstepPlan& plan, const ProblemSpec& spec,
                          double loop_rate,
                          std::optional<double> previous_dt0) {
  check_dimensions(spec, plan);
  FootstepPlan out = project_durations(plan, spec, loop_rate, previous_dt0);
  const ConstraintLimits& lim = spec.limits;
  LipState s = spec.initial_state;
  for (int k = 1; k <= spec.horizon; ++k) {
    const Foothold prev = stance_foot(spec, out, k - 1);
    s = propagate(s, prev, effective_duration(out, k - 1), spec.params);
    // s.pos is the CoM at the touchdown of u_k; it does not depend on u_k.
    Foothold& foot = out.footholds[k - 1];
    const Eigen::Vector2d d = foot.xy - s.pos;
    if (d.norm() > lim.l_max) foot.xy = s.pos + d * (lim.l_max / d.norm());
  }
  return out;
}

Eigen::VectorXd projected_gradient(const FootstepPlan& plan,
                                   const Eigen::VectorXd& gradient,
                                   const ProblemSpec& spec,
                                   const AlConfig& cfg) {
  const Eigen::VectorXd z = to_vector(plan);
  FootstepPlan stepped = plan;
  assign_from_vector(z - cfg.alpha * gradient, &stepped);
  const FootstepPlan projected =
      project_plan(stepped, spec, cfg.loop_rate, plan.durations[0]);
  Eigen::VectorXd gp = (z - to_vector(projected)) / cfg.alpha;
  if (plan.durations[0] < 0.0) gp(duration_index(spec.horizon, 0)) = 0.0;
  return gp.cwiseProduct(free_variable_mask(spec));
}

AlSolver::AlSolver(AlConfig cfg) : cfg_(cfg) { cfg_.validate(); }

SolveResult AlSolver::solve(const ProblemSpec& spec, const FootstepPlan& init,
                            const Multipliers& init_mult) {
  check_dimensions(spec, init);
  const int m = num_constraints(spec.horizon);
  Multipliers mult = init_mult;
  if (mult.lambda.size() == 0) mult.lambda = Eigen::VectorXd::Zero(m);
  if (mult.lambda.size() != m) {
    throw DimensionMismatchError("al_solve: multiplier size");
  }
  mult.lambda = mult.lambda.cwiseMax(0.0);
  if (!(mult.mu > 0.0)) mult.mu = cfg_.mu0;
  const Eigen::VectorXd mask = free_variable_mask(spec);
  trace_.clear();

  FootstepPlan plan = project_plan(init, spec, cfg_.loop_rate);

  SolveResult best_feasible;
  double best_feasible_value = std::numeric_limits<double>::infinity();
  SolveResult least_violating;
  double least_violation = std::numeric_limits<double>::infinity();
  bool have_feasible = false;

  constexpr int kWindow = 5;
  std::deque<double> recent;
  double prev_grad_norm = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::string diagnostic;
  int it = 0;
  for (; it <= cfg_.max_inner_iters; ++it) {
    const Derivatives d = evaluate_derivatives(spec, plan);
    const Eigen::VectorXd g = lagrangian_gradient_vector(d, mult);
    if (!g.allFinite() || !d.constraints.allFinite()) {
      diagnostic = "non-finite gradient at iteration " + std::to_string(it);
      break;
    }
    const Eigen::VectorXd active = d.constraints.cwiseMax(0.0);
    const double max_res = active.maxCoeff();
    const double value =
        d.cost + mult.lambda.dot(active) + mult.mu * active.squaredNorm();
    const bool feasible = max_res <= cfg_.constraint_tol;
    const Eigen::VectorXd gp = projected_gradient(plan, g, spec, cfg_);
    const double grad_norm = gp.norm();

    if (cfg_.trace) {
      trace_.push_back({it, d.cost, grad_norm, max_res, mult.mu});
    }
    auto snapshot = [&](SolveResult* r) {
      r->plan = plan;
      r->mult = mult;
      r->iterations = it;
      r->grad_norm = grad_norm;
      r->cost = d.cost;
      r->max_residual = max_res;
    };
    if (feasible && value < best_feasible_value) {
      best_feasible_value = value;
      snapshot(&best_feasible);
      have_feasible = true;
    }
    if (max_res < least_violation) {
      least_violation = max_res;
      snapshot(&least_violating);
    }
    if (it > 0 && std::abs(grad_norm - prev_grad_norm) < cfg_.grad_norm_delta_tol &&
        feasible && grad_norm <= 10.0 * cfg_.grad_norm_delta_tol) {
      converged = true;
      snapshot(&best_feasible);
      break;
    }
    if (it == cfg_.max_inner_iters) break;
    prev_grad_norm = grad_norm;

    // Primal step on the free variables, then projection.
    // Non-monotone acceptance: compare against the worst recent value so
    // that zig-zagging across a max(0, c) kink is not mistaken for
    // divergence.
    recent.push_back(value);
    if (static_cast<int>(recent.size()) > kWindow) recent.pop_front();
    const double reference_value =
        *std::max_element(recent.begin(), recent.end());
    const Eigen::VectorXd z = to_vector(plan);
    const Eigen::VectorXd step = g.cwiseProduct(mask);
    double alpha = cfg_.alpha;
    FootstepPlan trial;
    for (int bt = 0;; ++bt) {
      FootstepPlan next = plan;
      assign_from_vector(z - alpha * step, &next);
      trial = project_plan(next, spec, cfg_.loop_rate, plan.durations[0]);
      if (bt >= cfg_.max_backtracks) break;
      const double trial_value = augmented_lagrangian(spec, trial, mult);
      if (std::isfinite(trial_value) && trial_value <= reference_value) break;
      alpha *= 0.5;
    }
    plan = std::move(trial);

    if ((it + 1) % cfg_.inner_per_outer == 0) {
      mult.lambda = (mult.lambda + mult.mu * d.constraints).cwiseMax(0.0);
      mult.mu *= cfg_.phi;
      recent.clear();
    }
  }

  SolveResult result = have_feasible ? best_feasible : least_violating;
  if (!have_feasible && result.plan.footholds.empty()) {
    result.plan = plan;
    result.mult = mult;
  }
  result.feasible = have_feasible && diagnostic.empty();
  result.converged = converged;
  result.iterations = std::min(it, cfg_.max_inner_iters);
  result.diagnostic = diagnostic;
  if (!result.feasible && result.diagnostic.empty()) {
    result.diagnostic = "max residual " + std::to_string(least_violation) +
                        " above tolerance";
  }
  if (cfg_.trace) result.trace = trace_;
  return result;
}

SolveResult al_solve(const ProblemSpec& spec, const FootstepPlan& init,
                     const Multipliers& init_mult, const AlConfig& cfg) {
  AlSolver solver(cfg);
  return solver.solve(spec, init, init_mult);
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os) {
  os << "iteration,cost,grad_norm,max_residual,mu\n";
  for (const TraceRow& r : trace) {
    os << r.iteration << ',' << r.cost << ',' << r.grad_norm << ','
       << r.max_residual << ',' << r.mu << '\n';
  }
}

}  // namespace stepopt
