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

#include "stepopt/lip.h"

#include <cmath>

#include "stepopt/errors.h"

namespace stepopt {

LipParams::LipParams(double g, double h) : g_(g), h_(h) {
  if (!std::isfinite(g) || !std::isfinite(h) || g <= 0.0 || h <= 0.0) {
    throw InvalidInputError("LipParams: g and h must be finite and positive");
  }
  omega_ = std::sqrt(g / h);
}

double TerrainPlane::slope_angle() const {
  return std::atan(std::hypot(alpha, beta));
}

bool is_finite(const LipState& state) {
  return state.pos.allFinite() && state.vel.allFinite();
}

namespace {

void check_inputs(const LipState& state, const Foothold& foot, double dt) {
  if (!is_finite(state) || !foot.xy.allFinite() || !std::isfinite(foot.z) ||
      !std::isfinite(dt)) {
    throw InvalidInputError("propagate: non-finite input");
  }
  if (dt < 0.0) {
    throw InvalidInputError("propagate: negative duration");
  }
}

}  // namespace

LipState propagate(const LipState& state, const Foothold& foot, double dt,
                   const LipParams& params) {
  check_inputs(state, foot, dt);
  if (dt == 0.0) return state;
  const double w = params.omega();
  const double ep = std::exp(w * dt);
  const double em = std::exp(-w * dt);
  // x' = a e^{w dt} + b e^{-w dt} + u
  const Eigen::Vector2d rel = state.pos - foot.xy;
  const Eigen::Vector2d a = 0.5 * (rel + state.vel / w);
  const Eigen::Vector2d b = 0.5 * (rel - state.vel / w);
  LipState out;
  out.pos = a * ep + b * em + foot.xy;
  out.vel = w * (a * ep - b * em);
  return out;
}

PropagationJacobian propagate_derivatives(const LipState& state,
                                          const Foothold& foot, double dt,
                                          const LipParams& params) {
  check_inputs(state, foot, dt);
  const double w = params.omega();
  const double c = std::cosh(w * dt);
  const double s = std::sinh(w * dt);
  const LipState next = propagate(state, foot, dt, params);
  PropagationJacobian jac;
  jac.pos_pos = c;
  jac.pos_vel = s / w;
  jac.pos_foot = 1.0 - c;
  jac.vel_pos = w * s;
  jac.vel_vel = c;
  jac.vel_foot = -w * s;
  jac.pos_dt = next.vel;
  jac.vel_dt = w * w * (next.pos - foot.xy);
  return jac;
}

LipParams effective_params_on_plane(const TerrainPlane& plane,
                                    double nominal_h0, double g) {
  if (!std::isfinite(plane.alpha) || !std::isfinite(plane.beta) ||
      !std::isfinite(plane.h0_anchor)) {
    throw InvalidInputError("effective_params_on_plane: non-finite plane");
  }
  return LipParams(g, nominal_h0);
}

double com_height_on_plane(const TerrainPlane& plane, const Foothold& foot,
                           const Eigen::Vector2d& com_xy, double h0) {
  const Eigen::Vector2d rel = com_xy - foot.xy;
  return foot.z + plane.alpha * rel.x() + plane.beta * rel.y() + h0;
}

Eigen::Vector2d orbital_energy(const LipState& state, const Foothold& foot,
                               const LipParams& params) {
  const double w2 = params.omega() * params.omega();
  const Eigen::Vector2d rel = state.pos - foot.xy;
  return 0.5 * state.vel.cwiseProduct(state.vel) -
         0.5 * w2 * rel.cwiseProduct(rel);
}

}  // namespace stepopt
