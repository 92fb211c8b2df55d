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

#include "stepopt/planner.h"

#include <chrono>
#include <cmath>
#include <iomanip>

#include "stepopt/errors.h"

namespace stepopt {

namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

const char* to_string(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kArtoAl: return "arto-al";
    case PlannerMode::kAlOnly: return "al-only";
    case PlannerMode::kRefOnly: return "ref-only";
    case PlannerMode::kNoTimeAdp: return "no-time-adp";
  }
  return "?";
}

PlannerMode parse_planner_mode(const std::string& name) {
  for (PlannerMode m : {PlannerMode::kArtoAl, PlannerMode::kAlOnly,
                        PlannerMode::kRefOnly, PlannerMode::kNoTimeAdp}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidInputError("unknown planner mode '" + name + "'");
}

const char* to_string(PlanSource source) {
  switch (source) {
    case PlanSource::kFast: return "fast";
    case PlanSource::kReference: return "reference";
    case PlanSource::kStale: return "stale";
  }
  return "?";
}

void PlannerConfig::validate() const {
  if (!(fast_rate > 0.0) || !(reference_rate > 0.0) ||
      !std::isfinite(fast_rate) || !std::isfinite(reference_rate)) {
    throw InvalidInputError("planner: loop rates must be positive");
  }
  if (reference_rate > fast_rate) {
    throw InvalidInputError("planner: reference rate above fast rate");
  }
  if (!(nominal_duration > 0.0) || !(nominal_width >= 0.0)) {
    throw InvalidInputError("planner: bad nominal gait");
  }
  al.validate();
}

int PlannerConfig::fast_per_reference() const {
  return std::max(1, static_cast<int>(std::lround(fast_rate / reference_rate)));
}

void write_tick_log(const std::vector<TickRecord>& log, std::ostream& os) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(9);
  for (const TickRecord& r : log) {
    os << "{\"time\":" << r.time << ",\"latency_ms\":" << r.latency_ms
       << ",\"source\":";
    if (r.source) {
      os << '"' << to_string(*r.source) << '"';
    } else {
      os << "null";
    }
    os << ",\"iterations\":" << r.iterations
       << ",\"fast_feasible\":" << (r.fast_feasible ? "true" : "false")
       << ",\"handoff\":" << (r.handoff ? "true" : "false") << "}\n";
  }
  os.flags(flags);
  os.precision(prec);
}

AsyncPlanner::AsyncPlanner(PlannerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  cfg_.al.loop_rate = cfg_.fast_rate;
  al_ = AlSolver(cfg_.al);
}

AsyncPlanner::~AsyncPlanner() { stop_worker(); }

bool AsyncPlanner::uses_reference() const {
  return cfg_.mode != PlannerMode::kAlOnly;
}

bool AsyncPlanner::uses_fast() const {
  return cfg_.mode != PlannerMode::kRefOnly;
}

ProblemSpec AsyncPlanner::prepare_spec(const ProblemSpec& spec) const {
  ProblemSpec out = spec;
  if (cfg_.mode == PlannerMode::kNoTimeAdp) out.optimize_durations = false;
  return out;
}

void AsyncPlanner::freeze_durations(const ProblemSpec& spec,
                                    FootstepPlan* plan) const {
  if (spec.optimize_durations) return;
  plan->durations.assign(spec.horizon + 1, cfg_.nominal_duration);
  plan->durations[0] = cfg_.nominal_duration - spec.step_elapsed;
}

WarmStart AsyncPlanner::carry_forward(const WarmStart& w,
                                      const PlannerInput& in) const {
  const int steps = in.step_index - w.step_index;
  const double elapsed = std::max(0.0, in.time - w.wall_time);
  WarmStart out = w;
  if (steps <= 0) {
    out = shift_warm_start(w, elapsed, false, in.spec);
  } else {
    double planned = w.plan.durations.size() > 1 ? w.plan.durations[1] : 0.0;
    for (int i = 0; i < steps; ++i) {
      planned = out.plan.durations.size() > 1 ? out.plan.durations[1] : 0.0;
      out = shift_warm_start(out, 0.0, true, in.spec);
    }
    // The touchdown time is known exactly, so the remaining time of the new
    // step is its planned length minus what has already passed.
    out.plan.durations[0] = planned - in.spec.step_elapsed;
  }
  out.support = in.spec.current_support;
  out.wall_time = in.time;
  out.step_index = in.step_index;
  return out;
}

std::shared_ptr<const WarmStart> AsyncPlanner::latest_reference() const {
  auto sol = mailbox_.read();
  if (!sol) return nullptr;
  return std::shared_ptr<const WarmStart>(sol, &sol->warm);
}

std::optional<PlannerOutput> AsyncPlanner::tick_fast(const PlannerInput& in) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec spec = prepare_spec(in.spec);
  spec.validate();
  if (worker_running()) input_box_.publish(in);
  al_.mutable_config() = cfg_.al;
  al_.mutable_config().loop_rate = cfg_.fast_rate;
  ++tick_count_;

  TickRecord rec;
  rec.time = in.time;

  // Warm start: the previous fast iterate carried forward to now.
  if (have_fast_) {
    fast_ = carry_forward(fast_, in);
  } else {
    fast_.plan = nominal_plan(spec, cfg_.nominal_width, cfg_.nominal_duration);
    fast_.mult = Multipliers::zeros(spec.horizon, cfg_.al.mu0);
    fast_.support = spec.current_support;
    fast_.wall_time = in.time;
    fast_.step_index = in.step_index;
    have_fast_ = true;
  }

  // Reference handoff.
  std::optional<WarmStart> reference;
  if (uses_reference()) {
    auto sol = mailbox_.read();
    const double latency = cfg_.reference_latency < 0.0
                               ? 1.0 / cfg_.reference_rate
                               : cfg_.reference_latency;
    const bool visible =
        sol && (worker_running() ||
                sol->warm.wall_time + latency <= in.time + kTimeEps);
    if (visible && sol->warm.step_index <= in.step_index &&
        sol->warm.wall_time <= in.time + kTimeEps) {
      reference = carry_forward(sol->warm, in);
      if (sol->serial > consumed_serial_) {
        consumed_serial_ = sol->serial;
        fast_.plan = reference->plan;
        fast_.mult.lambda = reference->mult.lambda;
        rec.handoff = true;
      }
    }
  }
  freeze_durations(spec, &fast_.plan);
  if (reference) freeze_durations(spec, &reference->plan);

  std::optional<PlannerOutput> out;
  auto emit = [&](const WarmStart& w, PlanSource src) {
    PlannerOutput o;
    o.plan = w.plan;
    o.source = src;
    o.timestamp = in.time;
    o.feasible = src != PlanSource::kStale;
    o.step_index = in.step_index;
    out = o;
  };

  if (uses_fast()) {
    fast_mult_ = Multipliers{fast_.mult.lambda, cfg_.al.mu0};
    fast_plan_ = fast_.plan;
    SolveResult res = al_.solve(spec, fast_.plan, fast_mult_);
    rec.iterations = res.iterations;
    const bool feasible = res.feasible && !cfg_.force_fast_infeasible;
    rec.fast_feasible = feasible;
    // Keep iterating from the solver's best point either way.
    fast_.plan = res.plan;
    fast_.mult.lambda = res.mult.lambda;
    if (feasible) {
      emit(fast_, PlanSource::kFast);
    } else if (reference) {
      emit(*reference, PlanSource::kReference);
    }
  } else if (reference) {
    emit(*reference, PlanSource::kReference);
  }

  if (!out && last_output_) {
    emit(carry_forward(*last_output_, in), PlanSource::kStale);
  }
  if (out) {
    WarmStart w;
    w.plan = out->plan;
    w.support = spec.current_support;
    w.wall_time = in.time;
    w.step_index = in.step_index;
    w.mult = Multipliers::zeros(spec.horizon, cfg_.al.mu0);
    last_output_ = w;
    rec.source = out->source;
  }
  rec.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  log_.push_back(rec);
  return out;
}

void AsyncPlanner::tick_reference(const PlannerInput& in) {
  if (!uses_reference() || cfg_.stall_reference) return;
  const ProblemSpec spec = prepare_spec(in.spec);
  spec.validate();

  WarmStart warm;
  if (ref_warm_) {
    warm = carry_forward(*ref_warm_, in);
  } else {
    warm.plan = nominal_plan(spec, cfg_.nominal_width, cfg_.nominal_duration);
    warm.mult = Multipliers::zeros(spec.horizon, cfg_.al.mu0);
    warm.support = spec.current_support;
    warm.wall_time = in.time;
    warm.step_index = in.step_index;
  }
  freeze_durations(spec, &warm.plan);

  const SolveResult res = ref_solve(spec, warm, cfg_.ref);
  if (!res.feasible) {
    // Keep the previous published solution; still track time for next call.
    ref_warm_ = warm;
    return;
  }
  warm.plan = res.plan;
  warm.mult = res.mult;
  ref_warm_ = warm;
  RefSolution sol;
  sol.warm = warm;
  sol.serial = ++ref_serial_;
  mailbox_.publish(std::move(sol));
}

std::optional<PlannerOutput> AsyncPlanner::step(const PlannerInput& in) {
  const bool ref_tick = tick_count_ % cfg_.fast_per_reference() == 0;
  auto out = tick_fast(in);
  if (ref_tick) tick_reference(in);
  return out;
}

void AsyncPlanner::start_worker() {
  if (worker_running()) return;
  stop_ = false;
  worker_ = std::thread([this] { worker_loop(); });
}

void AsyncPlanner::stop_worker() {
  if (!worker_running()) return;
  {
    std::lock_guard<std::mutex> lock(wake_mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  worker_.join();
}

void AsyncPlanner::worker_loop() {
  const auto period = std::chrono::duration<double>(1.0 / cfg_.reference_rate);
  auto next = std::chrono::steady_clock::now();
  std::shared_ptr<const PlannerInput> last;
  while (!stop_) {
    auto in = input_box_.read();
    if (in && in != last) {
      last = in;
      tick_reference(*in);
    }
    next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        period);
    std::unique_lock<std::mutex> lock(wake_mutex_);
    wake_.wait_until(lock, next, [this] { return stop_.load(); });
  }
}

}  // namespace stepopt
