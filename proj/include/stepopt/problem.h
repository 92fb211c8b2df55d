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

#ifndef STEPOPT_PROBLEM_H_
#define STEPOPT_PROBLEM_H_

// The finite-horizon footstep location and timing problem.
//
// Decision variables are N future footholds u_1..u_N and N+1 step durations
// dt_0..dt_N, where dt_0 is the time left on the current support foot u_0.
// Boundary state j (j = 1..N+1) is the CoM state at the end of duration
// dt_{j-1}, i.e. at the touchdown of u_j (or the end of the horizon).

#include <vector>

#include <Eigen/Core>

#include "stepopt/lip.h"

namespace stepopt {

enum class Side { kLeft, kRight };

inline Side opposite(Side side) {
  return side == Side::kLeft ? Side::kRight : Side::kLeft;
}
// +1 for the left foot (positive y), -1 for the right foot.
inline double side_sign(Side side) { return side == Side::kLeft ? 1.0 : -1.0; }

struct ConstraintLimits {
  double l_max = 0.5;    // max horizontal CoM-to-foot distance at a switch, m
  double v_max = 1.0;    // max CoM speed at a switch, m/s
  double r_foot = 0.1;   // min lateral separation of consecutive feet, m
  double t_lower = 0.2;  // step duration bounds, s
  double t_upper = 0.8;

  void validate() const;
};

struct CostWeights {
  double w_x = 1.0;
  double w_y = 1.0;
};

struct ProblemSpec {
  LipState initial_state;
  Foothold current_support;
  Side support_side = Side::kLeft;
  Eigen::Vector2d ref_velocity = Eigen::Vector2d::Zero();
  CostWeights weights;
  ConstraintLimits limits;
  LipParams params;
  int horizon = 2;
  // Time already spent on the current support; it counts towards the step
  // time limits of dt_0.
  double step_elapsed = 0.0;
  // When false the durations are parameters, not decision variables.
  bool optimize_durations = true;

  void validate() const;
};

struct FootstepPlan {
  std::vector<Foothold> footholds;  // u_1..u_N
  std::vector<double> durations;    // dt_0..dt_N

  int horizon() const { return static_cast<int>(footholds.size()); }
};

struct Multipliers {
  Eigen::VectorXd lambda;
  double mu = 1.0;

  static Multipliers zeros(int horizon, double mu);
};

// Flat decision vector: [u_1x, u_1y, ..., u_Nx, u_Ny, dt_0, ..., dt_N].
int num_variables(int horizon);
inline int foothold_index(int k, int axis) { return 2 * (k - 1) + axis; }
inline int duration_index(int horizon, int k) { return 2 * horizon + k; }
Eigen::VectorXd to_vector(const FootstepPlan& plan);
// Overwrites footholds xy and durations of `plan` from `z`; keeps foot heights.
void assign_from_vector(const Eigen::VectorXd& z, FootstepPlan* plan);
// Mask of variables the solvers may move (durations frozen when requested).
Eigen::VectorXd free_variable_mask(const ProblemSpec& spec);

enum class ConstraintKind {
  kCurrentStepLength,  // |pos_j - u_{j-1}|^2 - l_max^2, j = 1..N+1
  kNextStepLength,     // |pos_j - u_j|^2 - l_max^2,     j = 1..N
  kVelocity,           // |vel_j|^2 - v_max^2,           j = 1..N+1
  kNoCrossing,         // r_foot - s_{k-1} (u_{k-1,y} - u_{k,y}), k = 1..N
  kStepTimeUpper,      // dt_k - t_upper (+ elapsed for k = 0), k = 0..N
  kStepTimeLower,      // t_lower - dt_k (- elapsed for k = 0), k = 0..N
};

struct ConstraintInfo {
  ConstraintKind kind;
  int index;  // boundary j or step k, per kind
};

int num_constraints(int horizon);
const std::vector<ConstraintInfo>& constraint_layout(int horizon);
const char* to_string(ConstraintKind kind);

// Throws DimensionMismatchError when the plan does not fit the spec.
void check_dimensions(const ProblemSpec& spec, const FootstepPlan& plan);

// Foot supporting step k (k = 0 is the current support).
Foothold stance_foot(const ProblemSpec& spec, const FootstepPlan& plan, int k);
Side stance_side(const ProblemSpec& spec, int k);
// Duration actually traversed in step k; dt_0 below zero means "switch now".
double effective_duration(const FootstepPlan& plan, int k);

// Boundary states 1..N+1.
std::vector<LipState> rollout(const ProblemSpec& spec, const FootstepPlan& plan);

// Sum over boundary states of the Q-weighted squared velocity error.
double cost(const ProblemSpec& spec, const FootstepPlan& plan);

// Residuals c(x) <= 0, ordered as constraint_layout().
Eigen::VectorXd constraint_values(const ProblemSpec& spec,
                                  const FootstepPlan& plan);

// f + sum lambda_j max(0, c_j) + mu sum max(0, c_j)^2.
double augmented_lagrangian(const ProblemSpec& spec, const FootstepPlan& plan,
                            const Multipliers& mult);

// Alternating stepping pattern that advances with the reference velocity;
// a reasonable cold start for either solver.
FootstepPlan nominal_plan(const ProblemSpec& spec, double step_width,
                          double step_duration);

// Reflection about the x-axis: y of states, feet and reference flipped and the
// support side swapped.
ProblemSpec mirror_y(const ProblemSpec& spec);
FootstepPlan mirror_y(const FootstepPlan& plan);

}  // namespace stepopt

#endif  // STEPOPT_PROBLEM_H_
