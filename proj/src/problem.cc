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

#include "stepopt/problem.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "stepopt/errors.h"

namespace stepopt {

void ConstraintLimits::validate() const {
  if (!(l_max > 0.0 && v_max > 0.0 && r_foot > 0.0 && t_lower > 0.0 &&
        t_upper > 0.0)) {
    throw InvalidInputError("ConstraintLimits: all limits must be positive");
  }
  if (!(t_lower < t_upper)) {
    throw InvalidInputError("ConstraintLimits: t_lower must be < t_upper");
  }
}

void ProblemSpec::validate() const {
  limits.validate();
  if (horizon < 1) throw InvalidInputError("ProblemSpec: horizon must be >= 1");
  if (weights.w_x < 0.0 || weights.w_y < 0.0) {
    throw InvalidInputError("ProblemSpec: weights must be non-negative");
  }
  if (!is_finite(initial_state) || !current_support.xy.allFinite() ||
      !ref_velocity.allFinite() || !std::isfinite(step_elapsed)) {
    throw InvalidInputError("ProblemSpec: non-finite field");
  }
}

Multipliers Multipliers::zeros(int horizon, double mu) {
  Multipliers m;
  m.lambda = Eigen::VectorXd::Zero(num_constraints(horizon));
  m.mu = mu;
  return m;
}

int num_variables(int horizon) { return 3 * horizon + 1; }

Eigen::VectorXd to_vector(const FootstepPlan& plan) {
  const int n = plan.horizon();
  Eigen::VectorXd z(num_variables(n));
  for (int k = 1; k <= n; ++k) {
    z(foothold_index(k, 0)) = plan.footholds[k - 1].xy.x();
    z(foothold_index(k, 1)) = plan.footholds[k - 1].xy.y();
  }
  for (int k = 0; k <= n; ++k) z(duration_index(n, k)) = plan.durations[k];
  return z;
}

void assign_from_vector(const Eigen::VectorXd& z, FootstepPlan* plan) {
  const int n = plan->horizon();
  if (z.size() != num_variables(n) ||
      static_cast<int>(plan->durations.size()) != n + 1) {
    throw DimensionMismatchError("assign_from_vector: size mismatch");
  }
  for (int k = 1; k <= n; ++k) {
    plan->footholds[k - 1].xy = {z(foothold_index(k, 0)),
                                 z(foothold_index(k, 1))};
  }
  for (int k = 0; k <= n; ++k) plan->durations[k] = z(duration_index(n, k));
}

Eigen::VectorXd free_variable_mask(const ProblemSpec& spec) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(num_variables(spec.horizon));
  if (!spec.optimize_durations) {
    mask.tail(spec.horizon + 1).setZero();
  }
  return mask;
}

int num_constraints(int horizon) { return 6 * horizon + 4; }

const std::vector<ConstraintInfo>& constraint_layout(int horizon) {
  static std::mutex mutex;
  static std::map<int, std::vector<ConstraintInfo>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(horizon);
  if (it != cache.end()) return it->second;
  std::vector<ConstraintInfo> layout;
  layout.reserve(num_constraints(horizon));
  for (int j = 1; j <= horizon + 1; ++j)
    layout.push_back({ConstraintKind::kCurrentStepLength, j});
  for (int j = 1; j <= horizon; ++j)
    layout.push_back({ConstraintKind::kNextStepLength, j});
  for (int j = 1; j <= horizon + 1; ++j)
    layout.push_back({ConstraintKind::kVelocity, j});
  for (int k = 1; k <= horizon; ++k)
    layout.push_back({ConstraintKind::kNoCrossing, k});
  for (int k = 0; k <= horizon; ++k)
    layout.push_back({ConstraintKind::kStepTimeUpper, k});
  for (int k = 0; k <= horizon; ++k)
    layout.push_back({ConstraintKind::kStepTimeLower, k});
  return cache.emplace(horizon, std::move(layout)).first->second;
}

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kCurrentStepLength: return "current_step_length";
    case ConstraintKind::kNextStepLength: return "next_step_length";
    case ConstraintKind::kVelocity: return "velocity";
    case ConstraintKind::kNoCrossing: return "no_crossing";
    case ConstraintKind::kStepTimeUpper: return "step_time_upper";
    case ConstraintKind::kStepTimeLower: return "step_time_lower";
  }
  return "unknown";
}

void check_dimensions(const ProblemSpec& spec, const FootstepPlan& plan) {
  if (plan.horizon() != spec.horizon ||
      static_cast<int>(plan.durations.size()) != spec.horizon + 1) {
    throw DimensionMismatchError(
        "plan has " + std::to_string(plan.footholds.size()) + " footholds and " +
        std::to_string(plan.durations.size()) + " durations; horizon is " +
        std::to_string(spec.horizon));
  }
}

Foothold stance_foot(const ProblemSpec& spec, const FootstepPlan& plan, int k) {
  return k == 0 ? spec.current_support : plan.footholds[k - 1];
}

Side stance_side(const ProblemSpec& spec, int k) {
  return (k % 2 == 0) ? spec.support_side : opposite(spec.support_side);
}

double effective_duration(const FootstepPlan& plan, int k) {
  return k == 0 ? std::max(plan.durations[0], 0.0) : plan.durations[k];
}

std::vector<LipState> rollout(const ProblemSpec& spec,
                              const FootstepPlan& plan) {
  check_dimensions(spec, plan);
  std::vector<LipState> states;
  states.reserve(spec.horizon + 1);
  LipState s = spec.initial_state;
  for (int k = 0; k <= spec.horizon; ++k) {
    s = propagate(s, stance_foot(spec, plan, k), effective_duration(plan, k),
                  spec.params);
    states.push_back(s);
  }
  return states;
}

double cost(const ProblemSpec& spec, const FootstepPlan& plan) {
  double total = 0.0;
  for (const LipState& s : rollout(spec, plan)) {
    const Eigen::Vector2d e = s.vel - spec.ref_velocity;
    total += spec.weights.w_x * e.x() * e.x() + spec.weights.w_y * e.y() * e.y();
  }
  return total;
}

Eigen::VectorXd constraint_values(const ProblemSpec& spec,
                                  const FootstepPlan& plan) {
  const std::vector<LipState> states = rollout(spec, plan);
  const ConstraintLimits& lim = spec.limits;
  const int n = spec.horizon;
  const auto& layout = constraint_layout(n);
  Eigen::VectorXd c(layout.size());
  for (size_t i = 0; i < layout.size(); ++i) {
    const int idx = layout[i].index;
    switch (layout[i].kind) {
      case ConstraintKind::kCurrentStepLength: {
        const Eigen::Vector2d d =
            states[idx - 1].pos - stance_foot(spec, plan, idx - 1).xy;
        c(i) = d.squaredNorm() - lim.l_max * lim.l_max;
        break;
      }
      case ConstraintKind::kNextStepLength: {
        const Eigen::Vector2d d =
            states[idx - 1].pos - stance_foot(spec, plan, idx).xy;
        c(i) = d.squaredNorm() - lim.l_max * lim.l_max;
        break;
      }
      case ConstraintKind::kVelocity:
        c(i) = states[idx - 1].vel.squaredNorm() - lim.v_max * lim.v_max;
        break;
      case ConstraintKind::kNoCrossing: {
        const double s = side_sign(stance_side(spec, idx - 1));
        const double gap = stance_foot(spec, plan, idx - 1).xy.y() -
                           stance_foot(spec, plan, idx).xy.y();
        c(i) = lim.r_foot - s * gap;
        break;
      }
      case ConstraintKind::kStepTimeUpper:
        c(i) = plan.durations[idx] + (idx == 0 ? spec.step_elapsed : 0.0) -
               lim.t_upper;
        break;
      case ConstraintKind::kStepTimeLower:
        c(i) = lim.t_lower - plan.durations[idx] -
               (idx == 0 ? spec.step_elapsed : 0.0);
        break;
    }
  }
  return c;
}

double augmented_lagrangian(const ProblemSpec& spec, const FootstepPlan& plan,
                            const Multipliers& mult) {
  const Eigen::VectorXd c = constraint_values(spec, plan);
  if (mult.lambda.size() != c.size()) {
    throw DimensionMismatchError("augmented_lagrangian: multiplier size");
  }
  const Eigen::VectorXd active = c.cwiseMax(0.0);
  return cost(spec, plan) + mult.lambda.dot(active) +
         mult.mu * active.squaredNorm();
}

FootstepPlan nominal_plan(const ProblemSpec& spec, double step_width,
                          double step_duration) {
  FootstepPlan plan;
  const Eigen::Vector2d advance = spec.ref_velocity * step_duration;
  const double inward = -side_sign(spec.support_side) * step_width;
  for (int k = 1; k <= spec.horizon; ++k) {
    Foothold f = spec.current_support;
    f.xy += advance * k;
    if (k % 2 == 1) f.xy.y() += inward;
    plan.footholds.push_back(f);
  }
  plan.durations.assign(spec.horizon + 1, step_duration);
  plan.durations[0] = std::max(step_duration - spec.step_elapsed, 0.0);
  return plan;
}

ProblemSpec mirror_y(const ProblemSpec& spec) {
  ProblemSpec m = spec;
  m.initial_state.pos.y() *= -1.0;
  m.initial_state.vel.y() *= -1.0;
  m.current_support.xy.y() *= -1.0;
  m.ref_velocity.y() *= -1.0;
  m.support_side = opposite(spec.support_side);
  return m;
}

FootstepPlan mirror_y(const FootstepPlan& plan) {
  FootstepPlan m = plan;
  for (Foothold& f : m.footholds) f.xy.y() *= -1.0;
  return m;
}

}  // namespace stepopt
