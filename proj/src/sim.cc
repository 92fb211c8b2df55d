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

#include "stepopt/sim.h"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stepopt/errors.h"
#include "stepopt/swing.h"

namespace stepopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegToRad = M_PI / 180.0;

// Random point in the d-ball (d = 2) of the given radius.
Eigen::Vector2d uniform_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double a = 2.0 * M_PI * u(rng);
  return Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
}

class Episode {
 public:
  explicit Episode(const Scenario& sc)
      : sc_(sc),
        cfg_(sc.sim),
        h0_(sc.spec.params.h()),
        planner_(sc.planner) {}

  EpisodeResult run();

 private:
  double ground(const Eigen::Vector2d& xy) const {
    if (!sc_.terrain) return 0.0;
    return query_footprint_height(*sc_.terrain, xy, cfg_.footprint_half_width);
  }
  bool aware() const {
    return cfg_.terrain_mode == TerrainMode::kAware || !sc_.terrain;
  }
  double stance_height(const Foothold& f) const {
    if (!sc_.terrain) return h0_;
    if (aware()) return com_plane_.height_at(f.xy) + h0_ - f.z;
    return blind_com_z_ - f.z;
  }
  void advance(double t_to) {
    if (t_to > t_) {
      com_ = propagate(com_, support_, t_to - t_,
                       LipParams(sc_.spec.params.g(), hp_));
      t_ = t_to;
    }
  }
  void fail(const std::string& why) {
    if (res_.fell) return;
    res_.fell = true;
    res_.diagnostic = why;
  }
  Eigen::Vector3d foot3(const Foothold& f) const {
    return Eigen::Vector3d(f.xy.x(), f.xy.y(), f.z);
  }
  void start_or_retarget_swing(double remaining);
  void touchdown(const Foothold& foot);
  void update_recovery();
  void check_state();
  void update_plane();

  const Scenario& sc_;
  const SimConfig& cfg_;
  double h0_;
  AsyncPlanner planner_;
  EpisodeResult res_;

  double t_ = 0.0;
  LipState com_;
  Foothold support_;
  Side side_ = Side::kLeft;
  int step_index_ = 0;
  double step_start_ = 0.0;
  Eigen::Vector2d step_start_pos_ = Eigen::Vector2d::Zero();
  double hp_ = 0.0;

  Foothold swing_from_;
  std::optional<SwingTrajectory> swing_;
  double swing_t0_ = 0.0;
  double touchdown_at_ = kInf;
  std::optional<Foothold> goal_;
  bool late_contact_ = false;

  std::optional<PlannerOutput> cmd_;
  int cmd_step_ = 0;

  TerrainPlane com_plane_;  // aware: estimated ground plane
  SnapshotMailbox<TerrainPlane> plane_box_;
  double blind_com_z_ = 0.0;

  bool push_applied_ = false;
  int first_eval_step_ = 0;
  int run_start_ = -1;
  int run_length_ = 0;
};

void Episode::start_or_retarget_swing(double remaining) {
  if (!goal_ || !(remaining > 1e-3) || !std::isfinite(remaining)) return;
  const Eigen::Vector3d goal = foot3(*goal_);
  const double apex =
      default_apex(foot3(swing_from_), goal, cfg_.swing_clearance);
  if (!swing_) {
    SwingBoundary b;
    b.pos = foot3(swing_from_);
    swing_ = plan_swing(b, goal, remaining, apex);
  } else {
    const double ts = std::max(0.0, t_ - swing_t0_);
    if (ts >= swing_->duration()) {
      SwingBoundary b;
      b.pos = swing_->sample(swing_->duration()).pos;
      swing_ = plan_swing(b, goal, remaining,
                          std::max(apex, b.pos.z()));
    } else {
      swing_ = retarget(*swing_, ts, goal, apex, remaining);
    }
  }
  swing_t0_ = t_;
}

void Episode::update_plane() {
  if (!sc_.terrain || cfg_.terrain_mode != TerrainMode::kAware) return;
  try {
    std::vector<Foothold> planned;
    if (cmd_) planned = cmd_->plan.footholds;
    const TerrainPlane p = fit_plane(*sc_.terrain, support_, planned,
                                     cfg_.footprint_half_width);
    plane_box_.publish(p);
    if (cfg_.record) {
      PlaneLog log;
      log.time = t_;
      log.estimate = p;
      log.support_height = support_.z;
      log.estimate_height = p.height_at(support_.xy);
      res_.planes.push_back(log);
    }
  } catch (const DegenerateFitError&) {
  } catch (const NoDataError&) {
  }
}

void Episode::check_state() {
  if (!is_finite(com_)) return fail("non-finite CoM state");
  if (com_.vel.norm() > cfg_.max_speed) return fail("CoM speed limit");
  const double l = sc_.spec.limits.l_max;
  const double leg = (com_.pos - support_.xy).squaredNorm() + hp_ * hp_;
  if (std::sqrt(leg) > cfg_.leg_margin * std::sqrt(l * l + h0_ * h0_)) {
    return fail("stance leg over-extended");
  }
}

void Episode::update_recovery() {
  const StepLog& s = res_.steps.back();
  if (s.index < first_eval_step_) return;
  if (sc_.push && !push_applied_) return;
  const double err = (s.mean_velocity - sc_.spec.ref_velocity).norm();
  if (err < cfg_.recovery_tol) {
    if (run_length_ == 0) run_start_ = s.index;
    ++run_length_;
  } else {
    run_length_ = 0;
  }
  if (!res_.recovered && run_length_ >= cfg_.recovery_window) {
    res_.recovered = true;
    res_.steps_to_recover = run_start_ - first_eval_step_;
  }
}

void Episode::touchdown(const Foothold& foot) {
  StepLog s;
  s.index = step_index_;
  s.side = side_;
  s.foot = support_;
  s.start = step_start_;
  s.end = t_;
  if (t_ > step_start_) {
    s.mean_velocity = (com_.pos - step_start_pos_) / (t_ - step_start_);
  }
  s.pendulum_height = hp_;
  res_.steps.push_back(s);

  const ConstraintLimits& lim = sc_.spec.limits;
  const double slack = 1.0 + cfg_.violation_margin;
  if (side_sign(side_) * (support_.xy.y() - foot.xy.y()) < -1e-9) {
    fail("feet crossed");
  } else if ((com_.pos - support_.xy).norm() > lim.l_max * slack ||
             (com_.pos - foot.xy).norm() > lim.l_max * slack) {
    fail("step length limit exceeded");
  } else if (com_.vel.norm() > lim.v_max * slack) {
    fail("velocity limit exceeded at touchdown");
  }

  swing_from_ = support_;
  support_ = foot;
  side_ = opposite(side_);
  ++step_index_;
  ++res_.steps_taken;
  step_start_ = t_;
  step_start_pos_ = com_.pos;
  late_contact_ = false;
  swing_.reset();
  if (auto p = plane_box_.read()) com_plane_ = *p;
  hp_ = stance_height(support_);
  if (hp_ < cfg_.height_ratio_min * h0_ || hp_ > cfg_.height_ratio_max * h0_) {
    fail("pendulum height out of range");
  }

  if (sc_.push && !push_applied_ && step_index_ >= sc_.push->after_steps &&
      side_ == sc_.push->trigger_side) {
    com_.vel += sc_.push->delta_v(cfg_.total_mass);
    push_applied_ = true;
    res_.push_time = t_;
    res_.push_step = step_index_;
    first_eval_step_ = step_index_;
  }
  update_recovery();

  // Continue along the commanded plan until the next planner output.
  touchdown_at_ = kInf;
  goal_.reset();
  if (cmd_) {
    const int k = step_index_ - cmd_step_;
    const int n = cmd_->plan.horizon();
    if (k >= 1 && k <= n) {
      touchdown_at_ = t_ + cmd_->plan.durations[k];
      if (k < n) {
        Foothold g = cmd_->plan.footholds[k];
        g.z = aware() ? ground(g.xy) : support_.z;
        goal_ = g;
      } else {
        touchdown_at_ = kInf;
      }
    }
    if (goal_) start_or_retarget_swing(touchdown_at_ - t_);
  }
}

EpisodeResult Episode::run() {
  cfg_.validate();
  sc_.spec.validate();
  if (sc_.push) sc_.push->validate();

  const double w = sc_.initial_width;
  support_.xy = Eigen::Vector2d(0.0, 0.5 * w);
  swing_from_.xy = Eigen::Vector2d(0.0, -0.5 * w);
  com_ = periodic_initial_state(sc_);
  if (cfg_.init_pos_radius > 0.0 || cfg_.init_vel_radius > 0.0) {
    std::mt19937_64 rng(cfg_.seed);
    com_.pos += uniform_disc(rng, cfg_.init_pos_radius);
    com_.vel += uniform_disc(rng, cfg_.init_vel_radius);
  }
  try {
    support_.z = ground(support_.xy);
    swing_from_.z = ground(swing_from_.xy);
  } catch (const NoDataError&) {
    fail("start position off the height map");
    return res_;
  }
  com_plane_ = TerrainPlane{0.0, 0.0, support_.z};
  if (sc_.terrain && cfg_.terrain_mode == TerrainMode::kAware) {
    try {
      com_plane_ = fit_patch_plane(*sc_.terrain, support_.xy,
                                   cfg_.footprint_half_width);
    } catch (const Error&) {
    }
  }
  blind_com_z_ = support_.z + h0_;
  hp_ = stance_height(support_);
  step_start_pos_ = com_.pos;
  first_eval_step_ = sc_.push ? 0 : cfg_.settle_steps;

  const double fast_rate = sc_.planner.fast_rate;
  const int substeps =
      std::max(1, static_cast<int>(std::lround(cfg_.sim_rate / fast_rate)));
  const int plane_every =
      std::max(1, static_cast<int>(std::lround(fast_rate / cfg_.plane_rate)));
  double not_ready = 0.0;

  const auto wall0 = std::chrono::steady_clock::now();
  if (cfg_.threaded) planner_.start_worker();

  for (long tick = 0;; ++tick) {
    const double t_tick = static_cast<double>(tick) / fast_rate;
    if (t_tick >= cfg_.max_time - 1e-12) break;
    if (cfg_.threaded) {
      std::this_thread::sleep_until(
          wall0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(t_tick)));
    }
    t_ = t_tick;
    if (tick % plane_every == 0) update_plane();

    PlannerInput in;
    in.spec = sc_.spec;
    in.spec.initial_state = com_;
    in.spec.current_support = support_;
    in.spec.support_side = side_;
    in.spec.step_elapsed = t_ - step_start_;
    in.spec.params = effective_params_on_plane(com_plane_, h0_,
                                               sc_.spec.params.g());
    in.step_index = step_index_;
    in.time = t_;
    std::optional<PlannerOutput> out;
    try {
      out = cfg_.threaded ? planner_.tick_fast(in) : planner_.step(in);
    } catch (const Error& e) {
      fail(std::string("planner error: ") + e.what());
      break;
    }

    if (out) {
      cmd_ = out;
      cmd_step_ = step_index_;
      not_ready = 0.0;
      if (!late_contact_) {
        touchdown_at_ = t_ + std::max(0.0, out->plan.durations[0]);
        Foothold g = out->plan.footholds[0];
        try {
          g.z = aware() ? ground(g.xy) : support_.z;
        } catch (const NoDataError&) {
          fail("foothold off the height map");
          break;
        }
        goal_ = g;
        start_or_retarget_swing(touchdown_at_ - t_);
      }
    } else if (!cmd_) {
      not_ready += 1.0 / fast_rate;
      if (not_ready > cfg_.not_ready_grace) {
        fail("planner not ready");
        break;
      }
    }

    if (cfg_.record) {
      TickLog log;
      log.time = t_;
      log.com = com_;
      log.side = side_;
      log.support = support_;
      log.step_index = step_index_;
      if (cmd_) log.durations = cmd_->plan.durations;
      if (out) log.source = out->source;
      res_.ticks.push_back(log);
    }

    try {
      for (int k = 1; k <= substeps && !res_.fell; ++k) {
        const double ts =
            t_tick + static_cast<double>(k) / cfg_.sim_rate;
        // Terrain-blind swing hits the ground before its planned end.
        if (sc_.terrain && !aware() && swing_ && !late_contact_) {
          const double s = ts - swing_t0_;
          if (s > 0.1 * swing_->duration() && s < swing_->duration()) {
            const SwingSample p = swing_->sample(s);
            const Eigen::Vector2d xy = p.pos.head<2>();
            const double gz = ground(xy);
            if (p.pos.z() <= gz) {
              advance(ts);
              Foothold f;
              f.xy = xy;
              f.z = gz;
              touchdown(f);
              continue;
            }
          }
        }
        while (touchdown_at_ <= ts + 1e-12 && goal_ && !res_.fell) {
          advance(std::max(t_, touchdown_at_));
          Foothold f = *goal_;
          if (sc_.terrain && !aware() && !late_contact_) {
            const double gz = ground(f.xy);
            if (f.z > gz + 1e-9) {
              // Ground is lower than assumed: keep descending.
              late_contact_ = true;
              touchdown_at_ += (f.z - gz) / cfg_.blind_descent_speed;
              f.z = gz;
              goal_ = f;
              continue;
            }
            f.z = gz;
          }
          touchdown(f);
        }
        advance(ts);
        check_state();
      }
    } catch (const NoDataError&) {
      fail("walked off the height map");
    }
    if (res_.fell) break;
    if (res_.recovered && cfg_.stop_on_recovery) break;
  }
  if (cfg_.threaded) planner_.stop_worker();
  res_.end_time = t_;

  if (!res_.fell && sc_.push && !push_applied_) {
    res_.diagnostic = "push never triggered";
  } else if (!res_.fell && !res_.recovered) {
    res_.diagnostic = "no stable window";
  }
  res_.success = !res_.fell && res_.recovered;
  return res_;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

}  // namespace

void PushEvent::validate() const {
  if (!(force >= 0.0) || !std::isfinite(force)) {
    throw InvalidInputError("push: force must be >= 0");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidInputError("push: duration must be > 0");
  }
  if (!std::isfinite(direction_deg)) {
    throw InvalidInputError("push: bad direction");
  }
  if (after_steps < 0) throw InvalidInputError("push: negative step count");
}

Eigen::Vector2d PushEvent::delta_v(double mass) const {
  const double a = direction_deg * kDegToRad;
  return force * duration / mass * Eigen::Vector2d(std::cos(a), std::sin(a));
}

const char* to_string(TerrainMode mode) {
  return mode == TerrainMode::kAware ? "aware" : "blind";
}

TerrainMode parse_terrain_mode(const std::string& name) {
  if (name == "aware") return TerrainMode::kAware;
  if (name == "blind") return TerrainMode::kBlind;
  throw InvalidInputError("unknown terrain mode '" + name + "'");
}

void SimConfig::validate() const {
  if (!(sim_rate > 0.0) || !(total_mass > 0.0) || !(max_time > 0.0) ||
      recovery_window < 1 || !(recovery_tol > 0.0) || settle_steps < 0 ||
      !(footprint_half_width > 0.0) || !(plane_rate > 0.0) ||
      !(blind_descent_speed > 0.0) || !(leg_margin > 0.0) ||
      !(height_ratio_min < height_ratio_max) || !(max_speed > 0.0) ||
      !(violation_margin >= 0.0) || !(init_pos_radius >= 0.0) ||
      !(init_vel_radius >= 0.0) || !(not_ready_grace >= 0.0)) {
    throw InvalidInputError("sim: invalid configuration");
  }
}

LipState periodic_initial_state(const Scenario& sc) {
  const double w = sc.spec.params.omega();
  LipState s;
  s.vel.y() = w * 0.5 * sc.initial_width *
              std::tanh(0.5 * w * sc.initial_period);
  return s;
}

EpisodeResult run_episode(const Scenario& scenario) {
  Episode ep(scenario);
  return ep.run();
}

void write_episode_csv(const EpisodeResult& r, std::ostream& os) {
  size_t nd = 0;
  for (const auto& t : r.ticks) nd = std::max(nd, t.durations.size());
  os << "time,x,y,vx,vy,side,support_x,support_y,support_z,step";
  for (size_t k = 0; k < nd; ++k) os << ",dt" << k;
  os << ",source\n";
  for (const auto& t : r.ticks) {
    os << fmt(t.time) << ',' << fmt(t.com.pos.x()) << ',' << fmt(t.com.pos.y())
       << ',' << fmt(t.com.vel.x()) << ',' << fmt(t.com.vel.y()) << ','
       << (t.side == Side::kLeft ? "L" : "R") << ','
       << fmt(t.support.xy.x()) << ',' << fmt(t.support.xy.y()) << ','
       << fmt(t.support.z) << ',' << t.step_index;
    for (size_t k = 0; k < nd; ++k) {
      os << ',';
      if (k < t.durations.size()) os << fmt(t.durations[k]);
    }
    os << ',' << (t.source ? to_string(*t.source) : "none") << '\n';
  }
}

void write_steps_csv(const EpisodeResult& r, std::ostream& os) {
  os << "index,side,foot_x,foot_y,foot_z,start,end,mean_vx,mean_vy,"
        "pendulum_height\n";
  for (const auto& s : r.steps) {
    os << s.index << ',' << (s.side == Side::kLeft ? "L" : "R") << ','
       << fmt(s.foot.xy.x()) << ',' << fmt(s.foot.xy.y()) << ','
       << fmt(s.foot.z) << ',' << fmt(s.start) << ',' << fmt(s.end) << ','
       << fmt(s.mean_velocity.x()) << ',' << fmt(s.mean_velocity.y()) << ','
       << fmt(s.pendulum_height) << '\n';
  }
}

void write_planes_csv(const EpisodeResult& r, std::ostream& os) {
  os << "time,alpha,beta,h0,slope_deg,support_height,estimate_height\n";
  for (const auto& p : r.planes) {
    os << fmt(p.time) << ',' << fmt(p.estimate.alpha) << ','
       << fmt(p.estimate.beta) << ',' << fmt(p.estimate.h0_anchor) << ','
       << fmt(p.estimate.slope_angle() / kDegToRad) << ','
       << fmt(p.support_height) << ',' << fmt(p.estimate_height) << '\n';
  }
}

std::string episode_summary_json(const EpisodeResult& r) {
  nlohmann::ordered_json j;
  j["success"] = r.success;
  j["recovered"] = r.recovered;
  j["fell"] = r.fell;
  j["steps_to_recover"] = r.steps_to_recover;
  j["steps_taken"] = r.steps_taken;
  j["push_time_s"] = r.push_time;
  j["push_step"] = r.push_step;
  j["end_time_s"] = r.end_time;
  j["diagnostic"] = r.diagnostic;
  return j.dump(2);
}

namespace {

struct Cell {
  PlannerMode mode;
  double direction;
};

SweepRow sweep_cell(const Scenario& base, const SweepConfig& cfg,
                    const Cell& cell) {
  SweepRow row;
  row.mode = cell.mode;
  row.direction_deg = cell.direction;
  auto succeeds = [&](double force) {
    Scenario s = base;
    s.planner.mode = cell.mode;
    s.sim.record = false;
    s.sim.threaded = false;
    s.sim.stop_on_recovery = true;
    PushEvent p = base.push.value_or(PushEvent{});
    p.force = force;
    p.direction_deg = cell.direction;
    s.push = p;
    ++row.episodes;
    return run_episode(s).success;
  };
  const long top = std::lround(std::ceil(cfg.ceiling / cfg.resolution));
  long lo = 0;
  long hi = top;
  if (!succeeds(0.0)) return row;
  if (succeeds(top * cfg.resolution)) {
    row.max_force = top * cfg.resolution;
    return row;
  }
  while (hi - lo > 1) {
    const long mid = (lo + hi) / 2;
    if (succeeds(mid * cfg.resolution)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  row.max_force = lo * cfg.resolution;
  return row;
}

std::vector<Cell> sweep_cells(const SweepConfig& cfg) {
  if (!(cfg.resolution > 0.0) || !(cfg.ceiling > 0.0)) {
    throw InvalidInputError("push_sweep: bad force range");
  }
  std::vector<Cell> cells;
  for (PlannerMode m : cfg.modes) {
    for (double d : cfg.directions) cells.push_back({m, d});
  }
  return cells;
}

}  // namespace

std::vector<SweepRow> push_sweep(const Scenario& base, const SweepConfig& cfg) {
  const std::vector<Cell> cells = sweep_cells(cfg);
  std::vector<SweepRow> rows(cells.size());
  const long n = static_cast<long>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) rows[i] = sweep_cell(base, cfg, cells[i]);
  return rows;
}

std::vector<SweepRow> push_sweep_serial(const Scenario& base,
                                        const SweepConfig& cfg) {
  const std::vector<Cell> cells = sweep_cells(cfg);
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const Cell& c : cells) rows.push_back(sweep_cell(base, cfg, c));
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "direction_deg,mode,max_force_n\n";
  for (const auto& r : rows) {
    os << fmt(r.direction_deg) << ',' << to_string(r.mode) << ','
       << fmt(r.max_force) << '\n';
  }
}

HeightMap make_family_map(TerrainFamily family, double parameter,
                          double step_length) {
  MapExtent e;
  e.x_min = -1.0;
  e.x_max = 4.0;
  e.y_min = -1.0;
  e.y_max = 1.0;
  e.resolution = 0.02;
  if (family == TerrainFamily::kSlope) return make_ramp(e, parameter);
  return make_steps(e, parameter, step_length);
}

namespace {

struct Trial {
  size_t condition;
  size_t parameter;
  int trial;
};

bool run_trial(const Scenario& base, const SuccessSweepConfig& cfg,
               const std::vector<std::shared_ptr<const HeightMap>>& maps,
               const Trial& t) {
  Scenario s = base;
  s.planner.mode = cfg.conditions[t.condition].planner;
  s.sim.terrain_mode = cfg.conditions[t.condition].terrain;
  s.sim.record = false;
  s.sim.threaded = false;
  s.sim.stop_on_recovery = false;
  s.sim.init_pos_radius = cfg.init_pos_radius;
  s.sim.init_vel_radius = cfg.init_vel_radius;
  // Same initial perturbation for every condition at a given trial.
  s.sim.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(t.trial);
  s.terrain = maps[t.parameter];
  s.push.reset();
  return run_episode(s).success;
}

std::vector<SuccessRow> success_sweep_impl(const Scenario& base,
                                           const SuccessSweepConfig& cfg,
                                           bool parallel) {
  if (cfg.trials < 1) throw InvalidInputError("success sweep: trials < 1");
  std::vector<std::shared_ptr<const HeightMap>> maps;
  for (double p : cfg.parameters) {
    maps.push_back(std::make_shared<const HeightMap>(
        make_family_map(cfg.family, p, cfg.step_length)));
  }
  std::vector<Trial> trials;
  for (size_t c = 0; c < cfg.conditions.size(); ++c) {
    for (size_t p = 0; p < cfg.parameters.size(); ++p) {
      for (int k = 0; k < cfg.trials; ++k) trials.push_back({c, p, k});
    }
  }
  std::vector<char> ok(trials.size(), 0);
  const long n = static_cast<long>(trials.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) ok[i] = run_trial(base, cfg, maps, trials[i]);
  } else {
    for (long i = 0; i < n; ++i) ok[i] = run_trial(base, cfg, maps, trials[i]);
  }
  std::vector<SuccessRow> rows;
  for (size_t c = 0; c < cfg.conditions.size(); ++c) {
    for (size_t p = 0; p < cfg.parameters.size(); ++p) {
      SuccessRow row;
      row.condition = cfg.conditions[c];
      row.parameter = cfg.parameters[p];
      rows.push_back(row);
    }
  }
  for (size_t i = 0; i < trials.size(); ++i) {
    SuccessRow& row =
        rows[trials[i].condition * cfg.parameters.size() + trials[i].parameter];
    ++row.trials;
    row.successes += ok[i];
  }
  return rows;
}

}  // namespace

std::vector<SuccessRow> success_rate_sweep(const Scenario& base,
                                           const SuccessSweepConfig& cfg) {
  return success_sweep_impl(base, cfg, true);
}

std::vector<SuccessRow> success_rate_sweep_serial(
    const Scenario& base, const SuccessSweepConfig& cfg) {
  return success_sweep_impl(base, cfg, false);
}

void write_success_csv(const std::vector<SuccessRow>& rows, std::ostream& os) {
  os << "planner,terrain_mode,parameter,trials,successes,rate\n";
  for (const auto& r : rows) {
    os << to_string(r.condition.planner) << ','
       << to_string(r.condition.terrain) << ',' << fmt(r.parameter) << ','
       << r.trials << ',' << r.successes << ',' << fmt(r.rate()) << '\n';
  }
}

}  // namespace stepopt
