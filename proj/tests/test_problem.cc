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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "stepopt/errors.h"
#include "stepopt/problem.h"

namespace stepopt {
namespace {

// Stepping in place on the periodic orbit: left support at y = +w/2, CoM
// at y = 0 heading towards it with speed omega w/2 tanh(omega T / 2).
struct Periodic {
  ProblemSpec spec;
  FootstepPlan plan;
  double v0 = 0.0;
};

Periodic periodic(int horizon, double width = 0.2, double period = 0.4) {
  Periodic p;
  ProblemSpec& s = p.spec;
  s.horizon = horizon;
  s.current_support.xy = {0.0, width / 2};
  const double w = s.params.omega();
  p.v0 = w * width / 2 * std::tanh(w * period / 2);
  s.initial_state.vel = {0.0, p.v0};
  double side = -1.0;
  for (int k = 1; k <= horizon; ++k) {
    Foothold f;
    f.xy = {0.0, side * width / 2};
    side = -side;
    p.plan.footholds.push_back(f);
  }
  p.plan.durations.assign(horizon + 1, period);
  return p;
}

TEST(Problem, Layout) {
  EXPECT_EQ(num_variables(2), 7);
  EXPECT_EQ(num_constraints(2), 16);
  EXPECT_EQ(foothold_index(2, 1), 3);
  EXPECT_EQ(duration_index(2, 0), 4);
  const auto& layout = constraint_layout(2);
  ASSERT_EQ(layout.size(), 16u);
  EXPECT_EQ(layout.front().kind, ConstraintKind::kCurrentStepLength);
  EXPECT_EQ(layout.back().kind, ConstraintKind::kStepTimeLower);
  EXPECT_EQ(layout.back().index, 2);
}

TEST(Problem, PeriodicRollout) {
  const Periodic p = periodic(3);
  const auto states = rollout(p.spec, p.plan);
  ASSERT_EQ(states.size(), 4u);
  for (std::size_t j = 0; j < states.size(); ++j) {
    EXPECT_NEAR(states[j].pos.x(), 0.0, 1e-15);
    EXPECT_NEAR(states[j].pos.y(), 0.0, 1e-12);
    const double expect = (j % 2 == 0 ? -1.0 : 1.0) * p.v0;
    EXPECT_NEAR(states[j].vel.y(), expect, 1e-12);
  }
}

TEST(Problem, ZeroDurationsKeepInitialState) {
  Periodic p = periodic(2);
  p.plan.durations.assign(3, 0.0);
  for (const LipState& s : rollout(p.spec, p.plan)) {
    EXPECT_EQ(s.pos, p.spec.initial_state.pos);
    EXPECT_EQ(s.vel, p.spec.initial_state.vel);
  }
}

TEST(Problem, SingleStepMatchesPropagate) {
  std::mt19937_64 rng(3);
  const ProblemSpec s = oracle::random_spec(rng, 1);
  const FootstepPlan plan = oracle::random_plan(s, rng);
  const auto states = rollout(s, plan);
  const LipState a =
      propagate(s.initial_state, s.current_support, plan.durations[0], s.params);
  EXPECT_EQ(states[0].pos, a.pos);
  const LipState b = propagate(a, plan.footholds[0], plan.durations[1], s.params);
  EXPECT_EQ(states[1].vel, b.vel);
}

TEST(Problem, CostZeroWhenTracking) {
  Periodic p = periodic(1);
  // Sagittal velocities are zero throughout; the lateral weight is off.
  p.spec.weights = {1.0, 0.0};
  EXPECT_EQ(cost(p.spec, p.plan), 0.0);
}

TEST(Problem, CostLinearInWeights) {
  std::mt19937_64 rng(5);
  ProblemSpec s = oracle::random_spec(rng, 2);
  const FootstepPlan plan = oracle::random_plan(s, rng);
  s.weights = {1.0, 0.0};
  const double cx = cost(s, plan);
  s.weights = {2.0, 0.0};
  EXPECT_NEAR(cost(s, plan), 2.0 * cx, 1e-14 * cx);
}

TEST(Problem, CostMatchesNaiveEvaluator) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const ProblemSpec s = oracle::random_spec(rng, 1 + i % 3);
    FootstepPlan plan = oracle::random_plan(s, rng);
    if (i % 5 == 0) plan.durations[0] = -0.01;
    const double c = cost(s, plan);
    EXPECT_NEAR(c, oracle::naive_cost(s, plan), 1e-12 * std::max(1.0, c));
    EXPECT_GE(c, 0.0);
  }
}

TEST(Problem, NominalStanceStrictlyFeasible) {
  const Periodic p = periodic(2);
  const Eigen::VectorXd c = constraint_values(p.spec, p.plan);
  EXPECT_LT(c.maxCoeff(), 0.0) << c.transpose();
}

TEST(Problem, StepLengthResidualZeroOnBoundary) {
  Periodic p = periodic(1);
  const auto states = rollout(p.spec, p.plan);
  // Move u_1 so that it is exactly l_max from the touchdown CoM.
  const double l = p.spec.limits.l_max;
  p.plan.footholds[0].xy = states[0].pos + Eigen::Vector2d(0.6 * l, -0.8 * l);
  const Eigen::VectorXd c = constraint_values(p.spec, p.plan);
  const auto& layout = constraint_layout(1);
  for (int i = 0; i < c.size(); ++i) {
    if (layout[i].kind == ConstraintKind::kNextStepLength) {
      EXPECT_NEAR(c[i], 0.0, 1e-15);
    }
  }
}

TEST(Problem, CrossingFootViolates) {
  Periodic p = periodic(1);
  // Left support at y = 0.1; swing (right) foot placed left of it.
  p.plan.footholds[0].xy.y() = 0.15;
  const Eigen::VectorXd c = constraint_values(p.spec, p.plan);
  const auto& layout = constraint_layout(1);
  for (int i = 0; i < c.size(); ++i) {
    if (layout[i].kind == ConstraintKind::kNoCrossing) {
      EXPECT_GT(c[i], 0.0);
      EXPECT_NEAR(c[i], p.spec.limits.r_foot + 0.05, 1e-15);
    }
  }
}

TEST(Problem, ElapsedCountsTowardsCurrentStep) {
  Periodic p = periodic(1);
  p.spec.step_elapsed = 0.3;
  p.plan.durations[0] = 0.6;
  const Eigen::VectorXd c = constraint_values(p.spec, p.plan);
  const auto& layout = constraint_layout(1);
  for (int i = 0; i < c.size(); ++i) {
    if (layout[i].index != 0) continue;
    if (layout[i].kind == ConstraintKind::kStepTimeUpper) {
      EXPECT_NEAR(c[i], 0.9 - p.spec.limits.t_upper, 1e-15);
    }
    if (layout[i].kind == ConstraintKind::kStepTimeLower) {
      EXPECT_NEAR(c[i], p.spec.limits.t_lower - 0.9, 1e-15);
    }
  }
}

TEST(Problem, MirrorSymmetry) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const ProblemSpec s = oracle::random_spec(rng, 2);
    const FootstepPlan plan = oracle::random_plan(s, rng);
    const ProblemSpec ms = mirror_y(s);
    const FootstepPlan mp = mirror_y(plan);
    EXPECT_NEAR(cost(ms, mp), cost(s, plan), 1e-12);
    EXPECT_NEAR((constraint_values(ms, mp) - constraint_values(s, plan))
                    .cwiseAbs()
                    .maxCoeff(),
                0.0, 1e-12);
  }
}

TEST(Problem, AugmentedLagrangianReducesToCost) {
  std::mt19937_64 rng(13);
  const ProblemSpec s = oracle::random_spec(rng, 2);
  const FootstepPlan plan = oracle::random_plan(s, rng);
  EXPECT_EQ(augmented_lagrangian(s, plan, Multipliers::zeros(2, 0.0)),
            cost(s, plan));
  const Eigen::VectorXd c = constraint_values(s, plan);
  Multipliers m = Multipliers::zeros(2, 2.0);
  m.lambda.setConstant(0.5);
  const Eigen::VectorXd pos = c.cwiseMax(0.0);
  EXPECT_NEAR(augmented_lagrangian(s, plan, m),
              cost(s, plan) + 0.5 * pos.sum() + 2.0 * pos.squaredNorm(),
              1e-12);
}

TEST(Problem, VectorRoundTrip) {
  std::mt19937_64 rng(17);
  const ProblemSpec s = oracle::random_spec(rng, 3);
  const FootstepPlan plan = oracle::random_plan(s, rng);
  FootstepPlan copy = plan;
  assign_from_vector(to_vector(plan) * 2.0, &copy);
  assign_from_vector(to_vector(copy) * 0.5, &copy);
  EXPECT_EQ(to_vector(copy), to_vector(plan));
  EXPECT_EQ(free_variable_mask(s).sum(), num_variables(3));
  ProblemSpec frozen = s;
  frozen.optimize_durations = false;
  EXPECT_EQ(free_variable_mask(frozen).sum(), 6);
}

TEST(Problem, DimensionChecks) {
  const Periodic p = periodic(2);
  FootstepPlan bad = p.plan;
  bad.durations.pop_back();
  EXPECT_THROW(check_dimensions(p.spec, bad), DimensionMismatchError);
  EXPECT_THROW(cost(p.spec, bad), DimensionMismatchError);
  ProblemSpec s = p.spec;
  s.limits.t_lower = 0.9;
  EXPECT_THROW(s.validate(), InvalidInputError);
}

}  // namespace
}  // namespace stepopt
