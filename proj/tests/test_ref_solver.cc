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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "stepopt/al_solver.h"
#include "stepopt/errors.h"
#include "stepopt/ref_solver.h"

namespace stepopt {
namespace {

WarmStart warm_from(const ProblemSpec& s, const FootstepPlan& p) {
  WarmStart w;
  w.plan = p;
  w.mult = Multipliers::zeros(s.horizon, 1.0);
  w.support = s.current_support;
  return w;
}

ProblemSpec drifting() {
  ProblemSpec s;
  s.horizon = 2;
  s.current_support.xy = {0.0, 0.1};
  s.initial_state.vel = {0.0, 0.2};
  s.ref_velocity = {0.0, 0.2};
  s.optimize_durations = false;
  return s;
}

TEST(RefSolver, UnconstrainedOptimumUnchanged) {
  const ProblemSpec s = drifting();
  const FootstepPlan opt =
      oracle::foothold_optimum(s, nominal_plan(s, 0.2, 0.4));
  const SolveResult r = ref_solve(s, warm_from(s, opt));
  ASSERT_TRUE(r.feasible);
  EXPECT_LE((to_vector(r.plan) - to_vector(opt)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(RefSolver, MatchesGridSearchSingleStep) {
  // N = 1 with fixed timing; the grid only admits feasible footholds.
  ProblemSpec s;
  s.horizon = 1;
  s.current_support.xy = {0.0, 0.1};
  s.initial_state.vel = {0.3, 0.1};
  s.ref_velocity = {0.3, 0.0};
  s.optimize_durations = false;
  FootstepPlan p = nominal_plan(s, 0.2, 0.4);
  auto objective = [&](const Eigen::Vector2d& u) {
    FootstepPlan q = p;
    q.footholds[0].xy = u;
    if (constraint_values(s, q).maxCoeff() > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    return cost(s, q);
  };
  Eigen::Vector2d best(0, 0);
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::Vector2d center(0.0, 0.0);
  for (double h : {0.01, 0.001, 0.0001}) {
    const Eigen::Vector2d c = best_value < INFINITY ? best : center;
    const double half = best_value < INFINITY ? 10 * h : 0.6;
    for (double x = c.x() - half; x <= c.x() + half; x += h) {
      for (double y = c.y() - half; y <= c.y() + half; y += h) {
        const double v = objective({x, y});
        if (v < best_value) {
          best_value = v;
          best = {x, y};
        }
      }
    }
  }
  const SolveResult r = ref_solve(s, warm_from(s, p));
  ASSERT_TRUE(r.feasible);
  EXPECT_LE((r.plan.footholds[0].xy - best).norm(), 1e-3)
      << r.plan.footholds[0].xy.transpose() << " vs " << best.transpose();
  EXPECT_LE(r.cost, best_value + 1e-9);
}

TEST(RefSolver, ResultsSatisfyConstraints) {
  std::mt19937_64 rng(5);
  int solved = 0;
  for (int i = 0; i < 30; ++i) {
    ProblemSpec s = oracle::random_spec(rng, 2);
    s.step_elapsed = 0.0;
    const SolveResult r =
        ref_solve(s, warm_from(s, nominal_plan(s, 0.2, 0.4)));
    if (!r.feasible) continue;
    ++solved;
    EXPECT_LE(constraint_values(s, r.plan).maxCoeff(), 1e-6);
    EXPECT_GE(r.mult.lambda.minCoeff(), 0.0);
  }
  EXPECT_GE(solved, 20);
}

TEST(RefSolver, NotWorseThanFastSolver) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    ProblemSpec s;
    s.horizon = 2;
    s.current_support.xy = {0.0, 0.1};
    const double w = s.params.omega();
    s.initial_state.vel = {oracle::uniform(rng, -0.3, 0.3),
                           w * 0.1 * std::tanh(w * 0.2) +
                               oracle::uniform(rng, -0.3, 0.3)};
    const FootstepPlan init = nominal_plan(s, 0.2, 0.4);
    const SolveResult ref = ref_solve(s, warm_from(s, init));
    const SolveResult al = al_solve(s, init, Multipliers::zeros(2, 1.0), {});
    ASSERT_TRUE(ref.feasible);
    // Compare only fast solutions that are feasible to the same tolerance.
    if (al.max_residual <= 1e-8) EXPECT_LE(ref.cost, al.cost + 1e-6);
  }
}

TEST(RefSolver, ExhaustionIsFlagged) {
  ProblemSpec s = drifting();
  s.optimize_durations = true;
  s.ref_velocity = {1.0, 0.0};
  RefConfig cfg;
  cfg.max_iters = 1;
  const SolveResult r =
      ref_solve(s, warm_from(s, nominal_plan(s, 0.2, 0.4)), cfg);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.diagnostic.empty());
}

WarmStart gait(const ProblemSpec& s) {
  WarmStart w = warm_from(s, nominal_plan(s, 0.2, 0.4));
  w.plan.footholds[0].xy = {0.2, 0.1};
  w.plan.footholds[1].xy = {0.4, -0.1};
  w.support.xy = {0.0, -0.1};
  w.plan.durations = {0.3, 0.35, 0.4};
  return w;
}

TEST(Shift, IdentityWithoutTime) {
  const ProblemSpec s = drifting();
  const WarmStart w = gait(s);
  const WarmStart n = shift_warm_start(w, 0.0, false, s);
  EXPECT_EQ(to_vector(n.plan), to_vector(w.plan));
  EXPECT_EQ(n.wall_time, w.wall_time);
}

TEST(Shift, ElapsedReducesRemainingTime) {
  const ProblemSpec s = drifting();
  const WarmStart w = gait(s);
  const WarmStart n = shift_warm_start(w, 0.05, false, s);
  EXPECT_EQ(n.plan.durations[0], w.plan.durations[0] - 0.05);
  EXPECT_EQ(n.plan.durations[1], w.plan.durations[1]);
  EXPECT_EQ(n.plan.footholds[1].xy, w.plan.footholds[1].xy);
  EXPECT_THROW(shift_warm_start(w, -0.01, false, s), InvalidInputError);
}

TEST(Shift, StepMirrorsLastDisplacement) {
  const ProblemSpec s = drifting();
  const WarmStart w = gait(s);
  const WarmStart n = shift_warm_start(w, 0.3, true, s);
  EXPECT_EQ(n.support.xy, Eigen::Vector2d(0.2, 0.1));
  EXPECT_EQ(n.plan.footholds[0].xy, Eigen::Vector2d(0.4, -0.1));
  EXPECT_NEAR((n.plan.footholds[1].xy - Eigen::Vector2d(0.6, 0.1)).norm(), 0.0,
              1e-15);
  EXPECT_EQ(n.plan.durations[0], 0.35);
  EXPECT_EQ(n.plan.durations[1], 0.4);
  EXPECT_EQ(n.plan.durations[2], 0.4);
  EXPECT_EQ(n.step_index, w.step_index + 1);
  EXPECT_EQ(n.plan.footholds.size(), w.plan.footholds.size());
}

TEST(Shift, TimeIntoNewStepDeducted) {
  const ProblemSpec s = drifting();
  const WarmStart w = gait(s);
  const WarmStart n = shift_warm_start(w, 0.32, true, s);
  EXPECT_NEAR(n.plan.durations[0], 0.35 - 0.02, 1e-15);
}

TEST(Shift, DoubleMirrorRestoresPattern) {
  ProblemSpec s = drifting();
  s.horizon = 3;
  WarmStart w = warm_from(s, nominal_plan(s, 0.2, 0.4));
  w.support.xy = {0.0, 0.1};
  w.plan.footholds[0].xy = {0.15, -0.1};
  w.plan.footholds[1].xy = {0.3, 0.1};
  w.plan.footholds[2].xy = {0.45, -0.1};
  WarmStart n = shift_warm_start(w, 0.4, true, s);
  n = shift_warm_start(n, 0.4, true, s);
  // Displacements of a symmetric gait come back after two shifts.
  auto disp = [](const WarmStart& x, int k) {
    const Eigen::Vector2d a = k == 0 ? x.support.xy : x.plan.footholds[k - 1].xy;
    return Eigen::Vector2d(x.plan.footholds[k].xy - a);
  };
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR((disp(n, k) - disp(w, k)).norm(), 0.0, 1e-15);
  }
  EXPECT_NEAR(n.plan.footholds[2].xy.x(), 0.75, 1e-15);
}

TEST(Shift, MultipliersFollowTheirConstraint) {
  const ProblemSpec s = drifting();
  WarmStart w = gait(s);
  const auto& layout = constraint_layout(2);
  for (int i = 0; i < w.mult.lambda.size(); ++i) {
    w.mult.lambda[i] = 10.0 * static_cast<int>(layout[i].kind) + layout[i].index;
  }
  const WarmStart n = shift_warm_start(w, 0.3, true, s);
  for (int i = 0; i < n.mult.lambda.size(); ++i) {
    const bool has_next = std::any_of(
        layout.begin(), layout.end(), [&](const ConstraintInfo& c) {
          return c.kind == layout[i].kind && c.index == layout[i].index + 1;
        });
    const double expect =
        10.0 * static_cast<int>(layout[i].kind) + layout[i].index +
        (has_next ? 1 : 0);
    EXPECT_EQ(n.mult.lambda[i], expect) << i;
  }
}

}  // namespace
}  // namespace stepopt
