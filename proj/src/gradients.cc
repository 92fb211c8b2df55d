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

#include "stepopt/gradients.h"

#include <cmath>

#include "stepopt/errors.h"

namespace stepopt {

PlanGradient PlanGradient::from_vector(const Eigen::VectorXd& g, int horizon) {
  PlanGradient out;
  for (int k = 1; k <= horizon; ++k) {
    out.d_footholds.emplace_back(g(foothold_index(k, 0)),
                                 g(foothold_index(k, 1)));
  }
  for (int k = 0; k <= horizon; ++k) {
    out.d_durations.push_back(g(duration_index(horizon, k)));
  }
  return out;
}

Eigen::VectorXd PlanGradient::to_vector() const {
  const int n = static_cast<int>(d_footholds.size());
  Eigen::VectorXd g(num_variables(n));
  for (int k = 1; k <= n; ++k) {
    g(foothold_index(k, 0)) = d_footholds[k - 1].x();
    g(foothold_index(k, 1)) = d_footholds[k - 1].y();
  }
  for (int k = 0; k <= n; ++k) g(duration_index(n, k)) = d_durations[k];
  return g;
}

namespace {

StateSensitivities sensitivities_from_states(
    const ProblemSpec& spec, const FootstepPlan& plan,
    const std::vector<LipState>& states) {
  const int n = spec.horizon;
  const int nv = num_variables(n);
  const double w = spec.params.omega();
  StateSensitivities sens;
  sens.pos.assign(n + 1, Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, nv));
  sens.vel.assign(n + 1, Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, nv));

  // ch[k], sh[k]: hyperbolic terms of step k.
  std::vector<double> ch(n + 1), sh(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = effective_duration(plan, k);
    ch[k] = std::cosh(w * t);
    sh[k] = std::sinh(w * t);
  }

  // Foothold u_k: zero for j <= k, base case at j = k + 1, then the
  // cosh/sinh recursion through the later steps.
  for (int k = 1; k <= n; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      const int col = foothold_index(k, axis);
      double dx = 1.0 - ch[k];
      double dv = -w * sh[k];
      sens.pos[k](axis, col) = dx;
      sens.vel[k](axis, col) = dv;
      for (int j = k + 2; j <= n + 1; ++j) {
        const double c = ch[j - 1], s = sh[j - 1];
        const double nx = c * dx + s / w * dv;
        const double nv_ = w * s * dx + c * dv;
        dx = nx;
        dv = nv_;
        sens.pos[j - 1](axis, col) = dx;
        sens.vel[j - 1](axis, col) = dv;
      }
    }
  }

  // Duration dt_k: zero for j <= k, base case at j = k + 1 is the state
  // derivative (xd, xdd) at that boundary, then the same recursion.
  for (int k = 0; k <= n; ++k) {
    const int col = duration_index(n, k);
    if (k == 0 && plan.durations[0] < 0.0) continue;  // clipped: flat
    const LipState& s_end = states[k];
    const Eigen::Vector2d foot = stance_foot(spec, plan, k).xy;
    Eigen::Vector2d dx = s_end.vel;
    Eigen::Vector2d dv = w * w * (s_end.pos - foot);
    sens.pos[k].col(col) = dx;
    sens.vel[k].col(col) = dv;
    for (int j = k + 2; j <= n + 1; ++j) {
      const double c = ch[j - 1], s = sh[j - 1];
      const Eigen::Vector2d nx = c * dx + s / w * dv;
      const Eigen::Vector2d nv_ = w * s * dx + c * dv;
      dx = nx;
      dv = nv_;
      sens.pos[j - 1].col(col) = dx;
      sens.vel[j - 1].col(col) = dv;
    }
  }
  return sens;
}

// d(u_k.xy)/dz as a 2 x nv selector; zero for the fixed current support.
Eigen::Matrix<double, 2, Eigen::Dynamic> foot_selector(int k, int nv) {
  Eigen::Matrix<double, 2, Eigen::Dynamic> sel =
      Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, nv);
  if (k >= 1) {
    sel(0, foothold_index(k, 0)) = 1.0;
    sel(1, foothold_index(k, 1)) = 1.0;
  }
  return sel;
}

}  // namespace

StateSensitivities state_sensitivities(const ProblemSpec& spec,
                                       const FootstepPlan& plan) {
  return sensitivities_from_states(spec, plan, rollout(spec, plan));
}

Derivatives evaluate_derivatives(const ProblemSpec& spec,
                                 const FootstepPlan& plan) {
  Derivatives d;
  d.states = rollout(spec, plan);
  const StateSensitivities sens = sensitivities_from_states(spec, plan, d.states);
  const int n = spec.horizon;
  const int nv = num_variables(n);
  const Eigen::Vector2d q(spec.weights.w_x, spec.weights.w_y);

  d.cost = 0.0;
  d.cost_gradient = Eigen::VectorXd::Zero(nv);
  for (int j = 1; j <= n + 1; ++j) {
    const Eigen::Vector2d e = d.states[j - 1].vel - spec.ref_velocity;
    const Eigen::Vector2d qe = q.cwiseProduct(e);
    d.cost += e.dot(qe);
    d.cost_gradient += 2.0 * sens.vel[j - 1].transpose() * qe;
  }

  d.constraints = constraint_values(spec, plan);
  const auto& layout = constraint_layout(n);
  d.constraint_jacobian = Eigen::MatrixXd::Zero(layout.size(), nv);
  for (size_t i = 0; i < layout.size(); ++i) {
    const int idx = layout[i].index;
    auto row = d.constraint_jacobian.row(i);
    switch (layout[i].kind) {
      case ConstraintKind::kCurrentStepLength: {
        const Eigen::Vector2d r =
            d.states[idx - 1].pos - stance_foot(spec, plan, idx - 1).xy;
        row = 2.0 * r.transpose() *
              (sens.pos[idx - 1] - foot_selector(idx - 1, nv));
        break;
      }
      case ConstraintKind::kNextStepLength: {
        const Eigen::Vector2d r =
            d.states[idx - 1].pos - stance_foot(spec, plan, idx).xy;
        row = 2.0 * r.transpose() * (sens.pos[idx - 1] - foot_selector(idx, nv));
        break;
      }
      case ConstraintKind::kVelocity:
        row = 2.0 * d.states[idx - 1].vel.transpose() * sens.vel[idx - 1];
        break;
      case ConstraintKind::kNoCrossing: {
        const double s = side_sign(stance_side(spec, idx - 1));
        if (idx - 1 >= 1) row(foothold_index(idx - 1, 1)) -= s;
        row(foothold_index(idx, 1)) += s;
        break;
      }
      case ConstraintKind::kStepTimeUpper:
        row(duration_index(n, idx)) = 1.0;
        break;
      case ConstraintKind::kStepTimeLower:
        row(duration_index(n, idx)) = -1.0;
        break;
    }
  }

  if (!spec.optimize_durations) {
    d.cost_gradient.tail(n + 1).setZero();
    d.constraint_jacobian.rightCols(n + 1).setZero();
  }
  return d;
}

Eigen::VectorXd lagrangian_gradient_vector(const Derivatives& d,
                                           const Multipliers& mult) {
  if (mult.lambda.size() != d.constraints.size()) {
    throw DimensionMismatchError("lagrangian_gradient: multiplier size");
  }
  // Active branch of max(0, c) includes c == 0.
  Eigen::VectorXd weight(d.constraints.size());
  for (Eigen::Index i = 0; i < d.constraints.size(); ++i) {
    const double c = d.constraints(i);
    weight(i) = c >= 0.0 ? mult.lambda(i) + 2.0 * mult.mu * c : 0.0;
  }
  return d.cost_gradient + d.constraint_jacobian.transpose() * weight;
}

Eigen::VectorXd lagrangian_gradient_vector(const ProblemSpec& spec,
                                           const FootstepPlan& plan,
                                           const Multipliers& mult) {
  return lagrangian_gradient_vector(evaluate_derivatives(spec, plan), mult);
}

PlanGradient lagrangian_gradient(const ProblemSpec& spec,
                                 const FootstepPlan& plan,
                                 const Multipliers& mult) {
  return PlanGradient::from_vector(lagrangian_gradient_vector(spec, plan, mult),
                                   spec.horizon);
}

}  // namespace stepopt
