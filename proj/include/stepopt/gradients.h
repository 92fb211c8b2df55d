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

#ifndef STEPOPT_GRADIENTS_H_
#define STEPOPT_GRADIENTS_H_

// Analytical derivatives of the boundary states, cost and constraints with
// respect to the footholds and durations.

#include <vector>

#include <Eigen/Core>

#include "stepopt/problem.h"

namespace stepopt {

// Column i of pos[j-1] / vel[j-1] holds d(boundary j)/d(z_i) for the flat
// decision vector z (see to_vector()). Entries are exact zeros where the
// variable acts at or after the boundary.
struct StateSensitivities {
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> pos;
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> vel;
};

struct PlanGradient {
  std::vector<Eigen::Vector2d> d_footholds;
  std::vector<double> d_durations;

  static PlanGradient from_vector(const Eigen::VectorXd& g, int horizon);
  Eigen::VectorXd to_vector() const;
};

StateSensitivities state_sensitivities(const ProblemSpec& spec,
                                       const FootstepPlan& plan);

// Everything the solvers need from one rollout.
struct Derivatives {
  std::vector<LipState> states;
  double cost = 0.0;
  Eigen::VectorXd cost_gradient;
  Eigen::VectorXd constraints;
  Eigen::MatrixXd constraint_jacobian;  // rows follow constraint_layout()
};

// Columns of frozen variables (see free_variable_mask()) are zeroed.
Derivatives evaluate_derivatives(const ProblemSpec& spec,
                                 const FootstepPlan& plan);

// Gradient of augmented_lagrangian() as a flat vector.
Eigen::VectorXd lagrangian_gradient_vector(const ProblemSpec& spec,
                                           const FootstepPlan& plan,
                                           const Multipliers& mult);
// Same, from already evaluated derivatives.
Eigen::VectorXd lagrangian_gradient_vector(const Derivatives& d,
                                           const Multipliers& mult);

PlanGradient lagrangian_gradient(const ProblemSpec& spec,
                                 const FootstepPlan& plan,
                                 const Multipliers& mult);

}  // namespace stepopt

#endif  // STEPOPT_GRADIENTS_H_
