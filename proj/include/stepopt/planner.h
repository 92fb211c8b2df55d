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

#ifndef STEPOPT_PLANNER_H_
#define STEPOPT_PLANNER_H_

// Two-rate planner: a fast augmented-Lagrangian loop and a slow
// interior-point loop that hands its solutions and multipliers to the fast
// one through a snapshot mailbox.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "stepopt/al_solver.h"
#include "stepopt/mailbox.h"
#include "stepopt/problem.h"
#include "stepopt/ref_solver.h"

namespace stepopt {

enum class PlannerMode {
  kArtoAl,     // both loops, reference warm starts the fast solver
  kAlOnly,     // fast loop alone
  kRefOnly,    // reference loop alone; its latest solution is the output
  kNoTimeAdp,  // both loops, durations frozen at the nominal value
};

const char* to_string(PlannerMode mode);
// Accepts arto-al, al-only, ref-only, no-time-adp. Throws InvalidInputError.
PlannerMode parse_planner_mode(const std::string& name);

enum class PlanSource { kFast, kReference, kStale };
const char* to_string(PlanSource source);

struct PlannerConfig {
  PlannerMode mode = PlannerMode::kArtoAl;
  double fast_rate = 200.0;       // Hz
  double reference_rate = 20.0;   // Hz
  AlConfig al;
  RefConfig ref;
  double nominal_duration = 0.4;  // initial guess, frozen value for kNoTimeAdp
  double nominal_width = 0.2;     // lateral foot spacing of the initial guess
  // Deterministic mode only: a reference solution becomes visible to the
  // fast loop this long after the state it was computed from. Negative means
  // one reference period.
  double reference_latency = -1.0;
  // Fault injection.
  bool force_fast_infeasible = false;
  bool stall_reference = false;

  void validate() const;
  int fast_per_reference() const;
};

// Everything a tick needs. spec.initial_state, current_support, support_side
// and step_elapsed describe the robot now.
struct PlannerInput {
  ProblemSpec spec;
  int step_index = 0;  // touchdowns since the start
  double time = 0.0;   // s
};

struct PlannerOutput {
  FootstepPlan plan;
  PlanSource source = PlanSource::kFast;
  double timestamp = 0.0;
  bool feasible = false;
  int step_index = 0;
};

struct TickRecord {
  double time = 0.0;
  double latency_ms = 0.0;
  std::optional<PlanSource> source;  // empty when not ready
  int iterations = 0;
  bool fast_feasible = false;
  bool handoff = false;
};

// Writes one JSON object per line.
void write_tick_log(const std::vector<TickRecord>& log, std::ostream& os);

class AsyncPlanner {
 public:
  explicit AsyncPlanner(PlannerConfig cfg);
  ~AsyncPlanner();

  AsyncPlanner(const AsyncPlanner&) = delete;
  AsyncPlanner& operator=(const AsyncPlanner&) = delete;

  // Threaded operation: spawns the reference worker, which solves on the
  // newest input posted by tick_fast() at reference_rate (wall clock).
  void start_worker();
  void stop_worker();
  bool worker_running() const { return worker_.joinable(); }

  // One fast-loop tick. Returns nullopt while no feasible plan exists yet.
  std::optional<PlannerOutput> tick_fast(const PlannerInput& in);

  // One reference-loop tick. Publishes to the mailbox when feasible.
  void tick_reference(const PlannerInput& in);

  // Deterministic interleaving: tick_fast(), then tick_reference() on every
  // fast_per_reference()-th call (starting with the first).
  std::optional<PlannerOutput> step(const PlannerInput& in);

  const PlannerConfig& config() const { return cfg_; }
  PlannerConfig& mutable_config() { return cfg_; }

  // Multipliers the fast solver will start from on its next tick.
  const Multipliers& fast_multipliers() const { return fast_mult_; }
  const FootstepPlan& fast_plan() const { return fast_plan_; }
  std::shared_ptr<const WarmStart> latest_reference() const;
  std::uint64_t reference_publishes() const { return mailbox_.version(); }
  const std::vector<TickRecord>& log() const { return log_; }

 private:
  struct RefSolution {
    WarmStart warm;
    std::uint64_t serial = 0;
  };

  bool uses_reference() const;
  bool uses_fast() const;
  ProblemSpec prepare_spec(const ProblemSpec& spec) const;
  void freeze_durations(const ProblemSpec& spec, FootstepPlan* plan) const;
  WarmStart carry_forward(const WarmStart& w, const PlannerInput& in) const;
  void worker_loop();

  PlannerConfig cfg_;
  AlSolver al_;

  // Fast-loop state.
  bool have_fast_ = false;
  WarmStart fast_;  // plan and multipliers the next fast solve starts from
  FootstepPlan fast_plan_;
  Multipliers fast_mult_;
  std::uint64_t consumed_serial_ = 0;
  std::optional<WarmStart> last_output_;
  PlanSource last_source_ = PlanSource::kFast;
  std::vector<TickRecord> log_;
  std::int64_t tick_count_ = 0;

  // Reference-loop state (owned by whichever thread runs tick_reference).
  std::optional<WarmStart> ref_warm_;
  std::uint64_t ref_serial_ = 0;
  SnapshotMailbox<RefSolution> mailbox_;

  // Threaded mode.
  SnapshotMailbox<PlannerInput> input_box_;
  std::thread worker_;
  std::atomic<bool> stop_{false};
  std::mutex wake_mutex_;
  std::condition_variable wake_;
};

}  // namespace stepopt

#endif  // STEPOPT_PLANNER_H_
