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

#ifndef STEPOPT_REF_SOLVER_H_
#define STEPOPT_REF_SOLVER_H_

// Slow, accurate solver for the same problem: a dense primal-dual
// interior-point method with slack variables and a monotone barrier schedule.
// Also holds the warm-start rules used between its invocations.

#include "stepopt/al_solver.h"
#include "stepopt/problem.h"

namespace stepopt {

struct RefConfig {
  double tol_stationarity = 1e-6;
  double tol_constraint = 1e-8;
  double tol_complementarity = 1e-8;
  int max_iters = 200;
  double mu_init = 1e-2;
  double mu_min = 1e-11;
  // Step for differencing the analytic Lagrangian gradient into a Hessian.
  double hessian_step = 1e-6;
};

struct WarmStart {
  FootstepPlan plan;
  Multipliers mult;
  Foothold support;       // support foot the plan was computed for
  double wall_time = 0.0;  // time the solution refers to, s
  int step_index = 0;      // steps taken before that time
};

SolveResult ref_solve(const ProblemSpec& spec, const WarmStart& warm,
                      const RefConfig& cfg = {});

// Carries a previous solution forward by `elapsed` seconds. Without a step the
// remaining time shrinks; with a step the horizon shifts by one and the last
// foothold repeats the previous displacement mirrored in y.
WarmStart shift_warm_start(const WarmStart& prev, double elapsed,
                           bool step_taken, const ProblemSpec& spec);

}  // namespace stepopt

#endif  // STEPOPT_REF_SOLVER_H_
