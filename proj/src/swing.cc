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

#include "stepopt/swing.h"

#include <algorithm>
#include <cmath>

#include "stepopt/errors.h"

namespace stepopt {

QuinticSegment::QuinticSegment(double duration, double p0, double v0,
                               double a0, double p1, double v1, double a1)
    : duration_(duration), p0_(p0), v0_(v0), a0_(a0), p1_(p1), v1_(v1),
      a1_(a1) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidInputError("quintic: negative duration");
  }
  if (duration == 0.0) {
    c_ = {p1, 0, 0, 0, 0, 0};
    return;
  }
  const double T = duration;
  const double T2 = T * T;
  const double h = p1 - (p0 + v0 * T + 0.5 * a0 * T2);
  const double dv = v1 - (v0 + a0 * T);
  const double da = a1 - a0;
  c_[0] = p0;
  c_[1] = v0;
  c_[2] = 0.5 * a0;
  c_[3] = (10.0 * h - 4.0 * dv * T + 0.5 * da * T2) / (T2 * T);
  c_[4] = (-15.0 * h + 7.0 * dv * T - da * T2) / (T2 * T2);
  c_[5] = (6.0 * h - 3.0 * dv * T + 0.5 * da * T2) / (T2 * T2 * T);
}

// Quintic Hermite basis on s in [0, 1], in the order p0, v0, a0, a1, v1, p1,
// with its first and second derivatives. The integer coefficients make the
// basis exact at both ends.
std::array<std::array<double, 6>, 3> QuinticSegment::basis(double t) const {
  const double s = t / duration_;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  std::array<std::array<double, 6>, 3> b;
  b[0] = {1 - 10 * s3 + 15 * s4 - 6 * s5,
          s - 6 * s3 + 8 * s4 - 3 * s5,
          0.5 * (s2 - 3 * s3 + 3 * s4 - s5),
          0.5 * (s3 - 2 * s4 + s5),
          -4 * s3 + 7 * s4 - 3 * s5,
          10 * s3 - 15 * s4 + 6 * s5};
  b[1] = {-30 * s2 + 60 * s3 - 30 * s4,
          1 - 18 * s2 + 32 * s3 - 15 * s4,
          0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4),
          0.5 * (3 * s2 - 8 * s3 + 5 * s4),
          -12 * s2 + 28 * s3 - 15 * s4,
          30 * s2 - 60 * s3 + 30 * s4};
  b[2] = {-60 * s + 180 * s2 - 120 * s3,
          -36 * s + 96 * s2 - 60 * s3,
          0.5 * (2 - 18 * s + 36 * s2 - 20 * s3),
          0.5 * (6 * s - 24 * s2 + 20 * s3),
          -24 * s + 84 * s2 - 60 * s3,
          60 * s - 180 * s2 + 120 * s3};
  return b;
}

double QuinticSegment::evaluate(double t, int order) const {
  if (duration_ == 0.0) return order == 0 ? p1_ : 0.0;
  const auto b = basis(t)[order];
  const double T = duration_;
  // Basis weights in normalized time; divide by T per derivative order.
  const double w[6] = {p0_, v0_ * T, a0_ * T * T, a1_ * T * T, v1_ * T, p1_};
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) sum += b[i] * w[i];
  for (int i = 0; i < order; ++i) sum /= T;
  return sum;
}

double QuinticSegment::position(double t) const { return evaluate(t, 0); }

double QuinticSegment::velocity(double t) const { return evaluate(t, 1); }

double QuinticSegment::acceleration(double t) const { return evaluate(t, 2); }

SwingTrajectory::SwingTrajectory(const QuinticSegment& x,
                                 const QuinticSegment& y,
                                 const QuinticSegment& z_first,
                                 const QuinticSegment& z_second)
    : x_(x), y_(y), z_first_(z_first), z_second_(z_second) {}

SwingSample SwingTrajectory::sample(double t) const {
  t = std::clamp(t, 0.0, duration());
  SwingSample s;
  s.t = t;
  s.pos.x() = x_.position(t);
  s.pos.y() = y_.position(t);
  s.vel.x() = x_.velocity(t);
  s.vel.y() = y_.velocity(t);
  s.acc.x() = x_.acceleration(t);
  s.acc.y() = y_.acceleration(t);
  const double tj = z_first_.duration();
  const QuinticSegment& z = t <= tj ? z_first_ : z_second_;
  const double tz = t <= tj ? t : t - tj;
  s.pos.z() = z.position(tz);
  s.vel.z() = z.velocity(tz);
  s.acc.z() = z.acceleration(tz);
  return s;
}

double default_apex(const Eigen::Vector3d& start, const Eigen::Vector3d& goal,
                    double clearance) {
  return std::max(start.z(), goal.z()) + clearance;
}

SwingTrajectory plan_swing(const SwingBoundary& start,
                           const Eigen::Vector3d& goal, double duration,
                           double apex_height) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidInputError("plan_swing: duration must be positive");
  }
  if (!(apex_height >= start.pos.z()) || !(apex_height >= goal.z())) {
    throw InvalidInputError("plan_swing: apex below an endpoint");
  }
  const double half = 0.5 * duration;
  const QuinticSegment x(duration, start.pos.x(), start.vel.x(),
                         start.acc.x(), goal.x(), 0.0, 0.0);
  const QuinticSegment y(duration, start.pos.y(), start.vel.y(),
                         start.acc.y(), goal.y(), 0.0, 0.0);
  const QuinticSegment z1(half, start.pos.z(), start.vel.z(), start.acc.z(),
                          apex_height, 0.0, 0.0);
  const QuinticSegment z2(duration - half, apex_height, 0.0, 0.0, goal.z(),
                          0.0, 0.0);
  return SwingTrajectory(x, y, z1, z2);
}

SwingTrajectory retarget(const SwingTrajectory& current, double t,
                         const Eigen::Vector3d& goal, double apex_height,
                         std::optional<double> remaining) {
  const double T = current.duration();
  if (!(t >= 0.0) || !(t < T)) {
    throw InvalidInputError("retarget: time outside the swing");
  }
  const double rest = remaining.value_or(T - t);
  if (!(rest > 0.0) || !std::isfinite(rest)) {
    throw InvalidInputError("retarget: remaining time must be positive");
  }
  const SwingSample s = current.sample(t);
  const QuinticSegment x(rest, s.pos.x(), s.vel.x(), s.acc.x(), goal.x(), 0.0,
                         0.0);
  const QuinticSegment y(rest, s.pos.y(), s.vel.y(), s.acc.y(), goal.y(), 0.0,
                         0.0);
  const double tj = current.z_first().duration();
  if (t < tj) {
    const double apex = std::max({apex_height, s.pos.z(), goal.z()});
    const double to_apex = (tj - t) / (T - t) * rest;
    const QuinticSegment z1(to_apex, s.pos.z(), s.vel.z(), s.acc.z(), apex,
                            0.0, 0.0);
    const QuinticSegment z2(rest - to_apex, apex, 0.0, 0.0, goal.z(), 0.0,
                            0.0);
    return SwingTrajectory(x, y, z1, z2);
  }
  const QuinticSegment z1(rest, s.pos.z(), s.vel.z(), s.acc.z(), goal.z(), 0.0,
                          0.0);
  return SwingTrajectory(x, y, z1, QuinticSegment(0.0, 0, 0, 0, goal.z(), 0, 0));
}

std::vector<SwingSample> resample(const SwingTrajectory& traj, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInputError("resample: rate must be positive");
  }
  const double T = traj.duration();
  const auto count =
      static_cast<std::size_t>(std::floor(T * rate + 1e-9)) + 1;
  std::vector<SwingSample> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(traj.sample(0.0));
    return out;
  }
  const double dt = T / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = i + 1 == count ? T : dt * static_cast<double>(i);
    out.push_back(traj.sample(t));
  }
  return out;
}

}  // namespace stepopt
