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

#ifndef STEPOPT_LIP_H_
#define STEPOPT_LIP_H_

// Closed-form Linear Inverted Pendulum dynamics.
//
// The sagittal and coronal axes are decoupled: each obeys
//   xdd = omega^2 (x - u),  omega = sqrt(g / h)
// while the foot u is fixed, so one support phase has the exact solution
//   x(t) = u + (x0 - u) cosh(omega t) + xd0 / omega sinh(omega t).

#include <Eigen/Core>

namespace stepopt {

class LipParams {
 public:
  // Throws InvalidInputError unless g > 0 and h > 0 (both finite).
  LipParams(double g, double h);
  LipParams() : LipParams(9.81, 0.81) {}

  double g() const { return g_; }
  double h() const { return h_; }
  double omega() const { return omega_; }

 private:
  double g_;
  double h_;
  double omega_;
};

struct LipState {
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
};

struct Foothold {
  Eigen::Vector2d xy = Eigen::Vector2d::Zero();
  double z = 0.0;  // terrain height under the foot
};

// Local terrain approximation z = alpha x + beta y + h0_anchor.
struct TerrainPlane {
  double alpha = 0.0;
  double beta = 0.0;
  double h0_anchor = 0.0;

  double height_at(const Eigen::Vector2d& xy) const {
    return alpha * xy.x() + beta * xy.y() + h0_anchor;
  }
  // Inclination of the plane against the horizontal, radians.
  double slope_angle() const;
};

// Sensitivities of one support phase. The cosh/sinh blocks are identical for
// both axes; the duration columns are per axis.
struct PropagationJacobian {
  double pos_pos = 1.0;   // d x' / d x
  double pos_vel = 0.0;   // d x' / d xd
  double pos_foot = 0.0;  // d x' / d u
  double vel_pos = 0.0;   // d xd' / d x
  double vel_vel = 1.0;   // d xd' / d xd
  double vel_foot = 0.0;  // d xd' / d u
  Eigen::Vector2d pos_dt = Eigen::Vector2d::Zero();  // d x' / d dt = xd'
  Eigen::Vector2d vel_dt = Eigen::Vector2d::Zero();  // d xd' / d dt = xdd'
};

// Exact state after `dt` seconds supported on `foot`. Requires dt >= 0 and
// finite inputs; throws InvalidInputError otherwise.
LipState propagate(const LipState& state, const Foothold& foot, double dt,
                   const LipParams& params);

PropagationJacobian propagate_derivatives(const LipState& state,
                                          const Foothold& foot, double dt,
                                          const LipParams& params);

// Pendulum parameters for a CoM constrained to a plane parallel to `plane` at
// vertical offset `nominal_h0`. With the robot heading along the steepest
// gradient the horizontal dynamics reduce to the flat-ground pendulum with
// h = nominal_h0, so omega does not depend on the slope.
LipParams effective_params_on_plane(const TerrainPlane& plane,
                                    double nominal_h0, double g);

// CoM height on the motion plane through `foot` at vertical offset h0.
double com_height_on_plane(const TerrainPlane& plane, const Foothold& foot,
                           const Eigen::Vector2d& com_xy, double h0);

// Orbital energy 1/2 xd^2 - 1/2 omega^2 (x - u)^2 of each axis; conserved
// during a support phase.
Eigen::Vector2d orbital_energy(const LipState& state, const Foothold& foot,
                               const LipParams& params);

bool is_finite(const LipState& state);

}  // namespace stepopt

#endif  // STEPOPT_LIP_H_
