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

#ifndef STEPOPT_SWING_H_
#define STEPOPT_SWING_H_

// Swing-foot trajectories built from quintic polynomials. The horizontal
// axes use one quintic over the whole swing; the vertical axis uses two,
// joined at mid-swing at the apex with zero velocity and acceleration.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace stepopt {

// Quintic p(t) = sum c_i t^i on [0, duration].
class QuinticSegment {
 public:
  QuinticSegment() = default;
  // Matches position, velocity and acceleration at both ends. A zero
  // duration gives the constant p1.
  QuinticSegment(double duration, double p0, double v0, double a0, double p1,
                 double v1, double a1);

  double duration() const { return duration_; }
  const std::array<double, 6>& coefficients() const { return c_; }

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;

 private:
  std::array<std::array<double, 6>, 3> basis(double t) const;
  double evaluate(double t, int order) const;

  double duration_ = 0.0;
  double p0_ = 0.0, v0_ = 0.0, a0_ = 0.0, p1_ = 0.0, v1_ = 0.0, a1_ = 0.0;
  std::array<double, 6> c_{};  // monomial coefficients, for export
};

struct SwingBoundary {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
};

struct SwingSample {
  double t = 0.0;
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
};

class SwingTrajectory {
 public:
  SwingTrajectory() = default;
  // z_first covers [0, z_first.duration()], z_second the rest of the swing.
  SwingTrajectory(const QuinticSegment& x, const QuinticSegment& y,
                  const QuinticSegment& z_first,
                  const QuinticSegment& z_second);

  double duration() const { return x_.duration(); }
  // t is clamped to [0, duration].
  SwingSample sample(double t) const;

  const QuinticSegment& x() const { return x_; }
  const QuinticSegment& y() const { return y_; }
  const QuinticSegment& z_first() const { return z_first_; }
  const QuinticSegment& z_second() const { return z_second_; }

 private:
  QuinticSegment x_, y_, z_first_, z_second_;
};

// Goal velocity and acceleration are zero. Throws InvalidInputError if
// duration <= 0 or apex_height is below either endpoint height.
SwingTrajectory plan_swing(const SwingBoundary& start,
                           const Eigen::Vector3d& goal, double duration,
                           double apex_height);

// Apex default: clearance above the higher endpoint.
double default_apex(const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                    double clearance = 0.05);

// New trajectory starting from the state of `current` at time t and ending at
// `goal` after `remaining` seconds (default: the rest of the old swing). If
// the apex is still ahead it is kept, at the same fraction of the remaining
// time; otherwise z descends directly. The result starts at its own t = 0.
SwingTrajectory retarget(const SwingTrajectory& current, double t,
                         const Eigen::Vector3d& goal, double apex_height,
                         std::optional<double> remaining = {});

// Samples at spacing duration / (count - 1), count = floor(duration rate) + 1,
// so both endpoints are included. Throws InvalidInputError if rate <= 0.
std::vector<SwingSample> resample(const SwingTrajectory& traj, double rate);

}  // namespace stepopt

#endif  // STEPOPT_SWING_H_
