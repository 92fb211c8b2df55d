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

#include <benchmark/benchmark.h>

#include "stepopt/al_solver.h"
#include "stepopt/planner.h"
#include "stepopt/ref_solver.h"
#include "stepopt/sim.h"

namespace stepopt {
namespace {

ProblemSpec in_place() {
  ProblemSpec s;
  s.current_support.xy = {0.0, 0.1};
  const double w = s.params.omega();
  s.initial_state.vel = {0.0, w * 0.1 * std::tanh(w * 0.2)};
  s.ref_velocity = {0.2, 0.0};
  return s;
}

void BM_AlInnerIterations(benchmark::State& state) {
  const ProblemSpec s = in_place();
  const FootstepPlan init = nominal_plan(s, 0.2, 0.4);
  AlConfig cfg;
  cfg.grad_norm_delta_tol = 1e-300;
  cfg.max_inner_iters = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        al_solve(s, init, Multipliers::zeros(2, cfg.mu0), cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AlInnerIterations)->Arg(1)->Arg(100);

void BM_RefSolve(benchmark::State& state) {
  const ProblemSpec s = in_place();
  WarmStart w;
  w.plan = nominal_plan(s, 0.2, 0.4);
  w.mult = Multipliers::zeros(2, 1.0);
  w.support = s.current_support;
  for (auto _ : state) benchmark::DoNotOptimize(ref_solve(s, w));
}
BENCHMARK(BM_RefSolve);

void BM_TickFast(benchmark::State& state) {
  AsyncPlanner planner({});
  PlannerInput in;
  in.spec = in_place();
  planner.tick_reference(in);
  for (auto _ : state) benchmark::DoNotOptimize(planner.tick_fast(in));
}
BENCHMARK(BM_TickFast);

Scenario sweep_base() {
  Scenario s;
  s.sim.max_time = 6.0;
  return s;
}

SweepConfig sweep_config() {
  SweepConfig cfg;
  cfg.directions = {0, 90, 180, 270};
  cfg.resolution = 20.0;
  return cfg;
}

void BM_PushSweepSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(push_sweep_serial(sweep_base(), sweep_config()));
  }
}
BENCHMARK(BM_PushSweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PushSweepParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(push_sweep(sweep_base(), sweep_config()));
  }
}
BENCHMARK(BM_PushSweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace stepopt

BENCHMARK_MAIN();
