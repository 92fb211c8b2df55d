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

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "stepopt/errors.h"
#include "stepopt/lip.h"
#include "stepopt/planner.h"

namespace stepopt {
namespace {

ProblemSpec in_place() {
  ProblemSpec s;
  s.horizon = 2;
  s.current_support.xy = {0.0, 0.1};
  const double w = s.params.omega();
  s.initial_state.vel = {0.0, w * 0.1 * std::tanh(w * 0.2)};
  return s;
}

PlannerInput input_at(const ProblemSpec& s, double t = 0.0, int step = 0) {
  PlannerInput in;
  in.spec = s;
  in.time = t;
  in.step_index = step;
  return in;
}

// Minimal closed loop: the CoM follows the pendulum on the commanded support
// and the foot switches when the commanded remaining time runs out.
struct Walker {
  ProblemSpec spec = in_place();
  double time = 0.0;
  int step = 0;

  void advance(const PlannerOutput& out, double dt) {
    double left = dt;
    const double remaining = std::max(0.0, out.plan.durations[0]);
    if (remaining < left) {
      spec.initial_state = propagate(spec.initial_state, spec.current_support,
                                     remaining, spec.params);
      spec.current_support = out.plan.footholds[0];
      spec.support_side = opposite(spec.support_side);
      spec.step_elapsed = 0.0;
      ++step;
      left -= remaining;
    }
    spec.initial_state = propagate(spec.initial_state, spec.current_support,
                                   left, spec.params);
    spec.step_elapsed += left;
    time += dt;
  }
};

TEST(Planner, ModeNames) {
  for (PlannerMode m : {PlannerMode::kArtoAl, PlannerMode::kAlOnly,
                        PlannerMode::kRefOnly, PlannerMode::kNoTimeAdp}) {
    EXPECT_EQ(parse_planner_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_planner_mode("fast"), InvalidInputError);
  PlannerConfig bad;
  bad.reference_rate = 500.0;
  EXPECT_THROW(AsyncPlanner{bad}, InvalidInputError);
}

TEST(Planner, SteadySteppingIsStable) {
  AsyncPlanner planner({});
  Walker w;
  std::optional<PlannerOutput> prev;
  // The foothold appended by a step shift is a mirrored guess; the first
  // ticks after a touchdown refine it.
  double worst = 0.0, worst_after_touchdown = 0.0;
  int compared = 0;
  for (int i = 0; i < 800; ++i) {
    const double elapsed = w.spec.step_elapsed;
    const auto out = planner.step(input_at(w.spec, w.time, w.step));
    ASSERT_TRUE(out.has_value());
    ASSERT_TRUE(out->feasible);
    if (w.time > 1.0 && prev && prev->step_index == out->step_index) {
      double d = 0.0;
      for (int k = 0; k < 2; ++k) {
        d = std::max(d, (out->plan.footholds[k].xy -
                         prev->plan.footholds[k].xy).norm());
      }
      double& slot = elapsed < 0.01 ? worst_after_touchdown : worst;
      slot = std::max(slot, d);
      ++compared;
    }
    prev = out;
    w.advance(*out, 0.005);
  }
  EXPECT_GT(w.step, 5);
  EXPECT_GT(compared, 400);
  EXPECT_LE(worst, 1e-3);
  EXPECT_LE(worst_after_touchdown, 2e-3);
}

TEST(Planner, FirstReferenceCallPopulatesMailbox) {
  AsyncPlanner planner({});
  EXPECT_EQ(planner.latest_reference(), nullptr);
  planner.tick_reference(input_at(in_place()));
  EXPECT_EQ(planner.reference_publishes(), 1u);
  ASSERT_NE(planner.latest_reference(), nullptr);
}

TEST(Planner, ForcedInfeasibleFallsBackToReference) {
  PlannerConfig cfg;
  cfg.force_fast_infeasible = true;
  cfg.reference_latency = 0.0;
  AsyncPlanner planner(cfg);
  const auto first = planner.tick_fast(input_at(in_place()));
  EXPECT_FALSE(first.has_value());  // nothing feasible yet
  planner.tick_reference(input_at(in_place()));
  const auto out = planner.tick_fast(input_at(in_place(), 0.0));
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->source, PlanSource::kReference);
  EXPECT_TRUE(out->feasible);
}

TEST(Planner, HandoffSetsMultipliers) {
  PlannerConfig cfg;
  cfg.reference_latency = 0.0;
  AsyncPlanner planner(cfg);
  ProblemSpec s = in_place();
  s.ref_velocity = {0.8, 0.0};  // some constraints become active
  planner.tick_fast(input_at(s));
  planner.tick_reference(input_at(s));
  const auto ref = planner.latest_reference();
  ASSERT_NE(ref, nullptr);
  planner.tick_fast(input_at(s));
  EXPECT_EQ(planner.fast_multipliers().lambda, ref->mult.lambda);
  EXPECT_EQ(to_vector(planner.fast_plan()), to_vector(ref->plan));
  ASSERT_FALSE(planner.log().empty());
  EXPECT_TRUE(planner.log().back().handoff);
  // Not consumed twice.
  planner.tick_fast(input_at(s));
  EXPECT_FALSE(planner.log().back().handoff);
}

TEST(Planner, ReferenceLatencyDelaysHandoff) {
  PlannerConfig cfg;  // one reference period by default
  AsyncPlanner planner(cfg);
  const ProblemSpec s = in_place();
  planner.tick_reference(input_at(s, 0.0));
  planner.tick_fast(input_at(s, 0.0));
  EXPECT_FALSE(planner.log().back().handoff);
  planner.tick_fast(input_at(s, 0.049));
  EXPECT_FALSE(planner.log().back().handoff);
  planner.tick_fast(input_at(s, 0.05));
  EXPECT_TRUE(planner.log().back().handoff);
}

TEST(Planner, StepBoundaryShiftsReferenceWarmStart) {
  const ProblemSpec s = in_place();
  AsyncPlanner planner({});
  planner.tick_reference(input_at(s, 0.0, 0));
  const auto first = planner.latest_reference();
  ASSERT_NE(first, nullptr);

  // The robot touched down on the planned foot and 20 ms have passed since.
  ProblemSpec after = s;
  after.current_support = first->plan.footholds[0];
  after.support_side = Side::kRight;
  after.step_elapsed = 0.02;
  after.initial_state = propagate(s.initial_state, s.current_support,
                                  first->plan.durations[0], s.params);
  after.initial_state = propagate(after.initial_state, after.current_support,
                                  0.02, s.params);
  const double t = first->plan.durations[0] + 0.02;

  // Oracle: the step-taken shift, then the known time into the new step.
  WarmStart expected = shift_warm_start(*first, 0.0, true, after);
  expected.plan.durations[0] = first->plan.durations[1] - 0.02;
  expected.support = after.current_support;
  const SolveResult oracle = ref_solve(after, expected, RefConfig{});
  ASSERT_TRUE(oracle.feasible);

  planner.tick_reference(input_at(after, t, 1));
  const auto second = planner.latest_reference();
  ASSERT_EQ(planner.reference_publishes(), 2u);
  EXPECT_EQ(second->step_index, 1);
  EXPECT_EQ(to_vector(second->plan), to_vector(oracle.plan));
  EXPECT_EQ(second->mult.lambda, oracle.mult.lambda);
}

TEST(Planner, StalledReferenceDoesNotBlockFastLoop) {
  PlannerConfig cfg;
  cfg.stall_reference = true;
  AsyncPlanner planner(cfg);
  Walker w;
  for (int i = 0; i < 200; ++i) {
    const auto out = planner.step(input_at(w.spec, w.time, w.step));
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(out->source, PlanSource::kFast);
    w.advance(*out, 0.005);
  }
  EXPECT_EQ(planner.reference_publishes(), 0u);
}

TEST(Planner, AlOnlyLiveness) {
  PlannerConfig cfg;
  cfg.mode = PlannerMode::kAlOnly;
  AsyncPlanner planner(cfg);
  Walker w;
  for (int i = 0; i < 400; ++i) {
    const auto out = planner.step(input_at(w.spec, w.time, w.step));
    ASSERT_TRUE(out.has_value());
    EXPECT_TRUE(out->feasible);
    EXPECT_EQ(out->source, PlanSource::kFast);
    w.advance(*out, 0.005);
  }
  EXPECT_EQ(planner.reference_publishes(), 0u);
  EXPECT_GT(w.step, 3);
}

TEST(Planner, NoTimeAdpFreezesDurations) {
  PlannerConfig cfg;
  cfg.mode = PlannerMode::kNoTimeAdp;
  AsyncPlanner planner(cfg);
  ProblemSpec s = in_place();
  s.initial_state =
      propagate(s.initial_state, s.current_support, 0.1, s.params);
  s.step_elapsed = 0.1;
  const auto out = planner.step(input_at(s));
  ASSERT_TRUE(out.has_value());
  EXPECT_DOUBLE_EQ(out->plan.durations[0], 0.3);
  EXPECT_DOUBLE_EQ(out->plan.durations[1], 0.4);
  EXPECT_DOUBLE_EQ(out->plan.durations[2], 0.4);
}

TEST(Planner, DeterministicInterleaving) {
  auto run = [] {
    AsyncPlanner planner({});
    Walker w;
    std::ostringstream os;
    for (int i = 0; i < 100; ++i) {
      const auto out = planner.step(input_at(w.spec, w.time, w.step));
      for (double v : to_vector(out->plan)) os << v << ' ';
      w.advance(*out, 0.005);
    }
    return std::make_pair(os.str(), planner.reference_publishes());
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, 10u);
}

TEST(Planner, ThreadedSmoke) {
  AsyncPlanner planner({});
  planner.start_worker();
  EXPECT_TRUE(planner.worker_running());
  Walker w;
  for (int i = 0; i < 60; ++i) {
    const auto out = planner.tick_fast(input_at(w.spec, w.time, w.step));
    ASSERT_TRUE(out.has_value());
    w.advance(*out, 0.005);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  planner.stop_worker();
  EXPECT_FALSE(planner.worker_running());
  EXPECT_GE(planner.reference_publishes(), 1u);
}

TEST(Planner, TickLogIsJsonLines) {
  std::ostringstream os;
  write_tick_log({{0.5, 1.25, PlanSource::kFast, 3, true, false},
                  {0.505, 0.5, std::nullopt, 0, false, false}}, os);
  EXPECT_EQ(os.str(),
            "{\"time\":0.5,\"latency_ms\":1.25,\"source\":\"fast\","
            "\"iterations\":3,\"fast_feasible\":true,\"handoff\":false}\n"
            "{\"time\":0.505,\"latency_ms\":0.5,\"source\":null,"
            "\"iterations\":0,\"fast_feasible\":false,\"handoff\":false}\n");
}

}  // namespace
}  // namespace stepopt
