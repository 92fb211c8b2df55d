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

#ifndef STEPOPT_SIM_H_
#define STEPOPT_SIM_H_

// Closed-loop walking simulator on the pendulum model. The CoM follows the
// closed-form solution exactly between events; support switches happen at
// the commanded touchdown times (or on contact, for terrain-blind runs).

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stepopt/planner.h"
#include "stepopt/problem.h"
#include "stepopt/terrain.h"

namespace stepopt {

// Impulse applied as an instantaneous CoM velocity change F duration / mass.
struct PushEvent {
  double force = 0.0;           // N
  double direction_deg = 270.0;  // 0 forward (+x), 90 left (+y)
  double duration = 0.1;        // s
  Side trigger_side = Side::kLeft;  // push at this foot's touchdown...
  int after_steps = 4;              // ...once this many steps are done

  void validate() const;
  Eigen::Vector2d delta_v(double mass) const;
};

enum class TerrainMode {
  kAware,  // foot heights and CoM plane from the height map
  kBlind,  // flat-ground assumption: fixed CoM height, swing to stance height
};
const char* to_string(TerrainMode mode);
TerrainMode parse_terrain_mode(const std::string& name);

struct SimConfig {
  double sim_rate = 1000.0;  // Hz
  double total_mass = 14.0;  // kg
  double max_time = 10.0;    // s
  int recovery_window = 6;   // consecutive steps...
  double recovery_tol = 0.05;  // ...with |mean step velocity - ref| below this
  int settle_steps = 4;        // without a push, the window starts here
  bool stop_on_recovery = true;
  double not_ready_grace = 0.2;  // s without any plan before giving up
  TerrainMode terrain_mode = TerrainMode::kAware;
  double footprint_half_width = 0.09;
  double plane_rate = 5.0;       // Hz
  double swing_clearance = 0.05;
  double blind_descent_speed = 0.5;  // m/s, after a late contact
  // Failure thresholds.
  double leg_margin = 1.1;  // x sqrt(l_max^2 + h0^2), 3D stance leg
  double height_ratio_min = 0.75;
  double height_ratio_max = 1.25;
  double max_speed = 3.0;
  double violation_margin = 0.1;  // relative slack on switch constraints
  // Random initial perturbation (uniform in a ball), off by default.
  double init_pos_radius = 0.0;
  double init_vel_radius = 0.0;
  std::uint64_t seed = 0;
  bool threaded = false;  // planner worker thread, wall-clock pacing
  bool record = true;     // keep per-tick logs

  void validate() const;
};

struct Scenario {
  ProblemSpec spec;  // limits, weights, params, ref velocity, horizon
  PlannerConfig planner;
  SimConfig sim;
  std::optional<PushEvent> push;
  std::shared_ptr<const HeightMap> terrain;  // flat ground at z = 0 if null
  // Stepping-in-place start: feet this far apart, CoM on the periodic orbit
  // of this step duration, left foot just touched down.
  double initial_width = 0.2;
  double initial_period = 0.4;
};

struct TickLog {
  double time = 0.0;
  LipState com;
  Side side = Side::kLeft;
  Foothold support;
  int step_index = 0;
  std::vector<double> durations;  // commanded plan, empty if none
  std::optional<PlanSource> source;
};

struct StepLog {
  int index = 0;  // 0 = the initial support phase
  Side side = Side::kLeft;
  Foothold foot;
  double start = 0.0;
  double end = 0.0;
  Eigen::Vector2d mean_velocity = Eigen::Vector2d::Zero();
  double pendulum_height = 0.0;
};

struct PlaneLog {
  double time = 0.0;
  TerrainPlane estimate;
  double support_height = 0.0;    // ground under the support foot
  double estimate_height = 0.0;   // plane at the support foot
};

struct EpisodeResult {
  bool success = false;
  bool recovered = false;
  bool fell = false;
  int steps_to_recover = -1;  // steps completed before the stable window
  int steps_taken = 0;
  double push_time = -1.0;
  int push_step = -1;
  double end_time = 0.0;
  std::string diagnostic;
  std::vector<TickLog> ticks;
  std::vector<StepLog> steps;
  std::vector<PlaneLog> planes;
};

// Initial CoM state of the stepping-in-place orbit used by run_episode().
LipState periodic_initial_state(const Scenario& scenario);

EpisodeResult run_episode(const Scenario& scenario);

// time,x,y,vx,vy,side,support_x,support_y,support_z,step,dt0,dt1,...,source
void write_episode_csv(const EpisodeResult& result, std::ostream& os);
// index,side,foot_x,foot_y,foot_z,start,end,mean_vx,mean_vy,pendulum_height
void write_steps_csv(const EpisodeResult& result, std::ostream& os);
// time,alpha,beta,h0,slope_deg,support_height,estimate_height
void write_planes_csv(const EpisodeResult& result, std::ostream& os);
std::string episode_summary_json(const EpisodeResult& result);

struct SweepConfig {
  std::vector<PlannerMode> modes = {PlannerMode::kArtoAl};
  std::vector<double> directions = {0, 45, 90, 135, 180, 225, 270, 315};
  double ceiling = 200.0;   // N, assumed to fail (checked)
  double resolution = 5.0;  // N
};

struct SweepRow {
  PlannerMode mode = PlannerMode::kArtoAl;
  double direction_deg = 0.0;
  double max_force = 0.0;  // largest force found to succeed
  int episodes = 0;
};

// Bisection on the force per (mode, direction) between 0 N and the ceiling.
// Cells run in parallel; push_sweep_serial() is the reference ordering.
std::vector<SweepRow> push_sweep(const Scenario& base, const SweepConfig& cfg);
std::vector<SweepRow> push_sweep_serial(const Scenario& base,
                                        const SweepConfig& cfg);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

enum class TerrainFamily { kSlope, kSteps };

struct Condition {
  PlannerMode planner = PlannerMode::kArtoAl;
  TerrainMode terrain = TerrainMode::kAware;
};

struct SuccessSweepConfig {
  TerrainFamily family = TerrainFamily::kSlope;
  std::vector<double> parameters = {0.0, 2.5, 5.0, 7.5, 10.0};  // deg or m
  std::vector<Condition> conditions = {{}};
  int trials = 10;
  double step_length = 0.3;  // for kSteps
  double init_pos_radius = 0.02;
  double init_vel_radius = 0.05;
  std::uint64_t seed = 1;
};

struct SuccessRow {
  Condition condition;
  double parameter = 0.0;
  int trials = 0;
  int successes = 0;
  double rate() const { return trials ? double(successes) / trials : 0.0; }
};

HeightMap make_family_map(TerrainFamily family, double parameter,
                          double step_length);

std::vector<SuccessRow> success_rate_sweep(const Scenario& base,
                                           const SuccessSweepConfig& cfg);
std::vector<SuccessRow> success_rate_sweep_serial(
    const Scenario& base, const SuccessSweepConfig& cfg);
void write_success_csv(const std::vector<SuccessRow>& rows, std::ostream& os);

}  // namespace stepopt

#endif  // STEPOPT_SIM_H_
