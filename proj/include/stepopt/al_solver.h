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

#ifndef STEPOPT_AL_SOLVER_H_
#define STEPOPT_AL_SOLVER_H_

// Fast first-order solver: projected gradient descent on the augmented
// Lagrangian with multiplier and penalty updates between inner cycles.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stepopt/problem.h"

namespace stepopt {

struct AlConfig {
  double alpha = 0.005;              // primal step size
  double phi = 1.5;                  // penalty growth, > 1
  double mu0 = 1.0;                  // initial penalty
  double grad_norm_delta_tol = 0.05;
  int max_inner_iters = 100;         // per solve (one planner tick)
  int inner_per_outer = 10;          // primal steps between dual updates
  double constraint_tol = 1e-3;      // feasibility threshold on max(c)
  double loop_rate = 200.0;          // Hz; used by the dt_0 projection rule
  // Halve the step (at most this many times) while it fails to decrease the
  // augmented Lagrangian. 0 gives the plain fixed step.
  int max_backtracks = 0;
  bool trace = false;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double max_residual = 0.0;
  double mu = 0.0;
};

struct SolveResult {
  FootstepPlan plan;
  Multipliers mult;
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  double cost = 0.0;
  double max_residual = 0.0;
  std::string diagnostic;
  std::vector<TraceRow> trace;
};

// Clamps step times to [t_lower, t_upper]; for dt_0 the bounds are shifted
// by step_elapsed. A negative dt_0 is not clamped: it becomes
// previous_dt0 - 1 / loop_rate (previous_dt0 defaults to the value itself).
// Frozen durations are left alone.
FootstepPlan project_durations(const FootstepPlan& plan,
                               const ProblemSpec& spec, double loop_rate,
                               std::optional<double> previous_dt0 = {});

// project_durations() followed by a sequential projection of each foothold
// onto the disc of radius l_max around its predicted touchdown CoM position.
// The no-crossing rows are left to the penalty.
FootstepPlan project_plan(const FootstepPlan& plan, const ProblemSpec& spec,
                          double loop_rate,
                          std::optional<double> previous_dt0 = {});

// Projected gradient (z - P(z - alpha g)) / alpha; the dt_0 entry is zeroed
// while dt_0 < 0 since the rule above does not follow the gradient there.
Eigen::VectorXd projected_gradient(const FootstepPlan& plan,
                                   const Eigen::VectorXd& gradient,
                                   const ProblemSpec& spec,
                                   const AlConfig& cfg);

class AlSolver {
 public:
  explicit AlSolver(AlConfig cfg = {});

  SolveResult solve(const ProblemSpec& spec, const FootstepPlan& init,
                    const Multipliers& init_mult);

  const AlConfig& config() const { return cfg_; }
  AlConfig& mutable_config() { return cfg_; }
  // Trace of the most recent solve (empty unless cfg.trace).
  const std::vector<TraceRow>& last_trace() const { return trace_; }

 private:
  AlConfig cfg_;
  std::vector<TraceRow> trace_;
};

SolveResult al_solve(const ProblemSpec& spec, const FootstepPlan& init,
                     const Multipliers& init_mult, const AlConfig& cfg);

// iteration,cost,grad_norm,max_residual,mu
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os);

}  // namespace stepopt

#endif  // STEPOPT_AL_SOLVER_H_
