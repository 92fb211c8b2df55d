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

#include "stepopt/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "stepopt/errors.h"

namespace stepopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    throw InvalidInputError("'" + key + "': not a number: '" + v + "'");
  }
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw InvalidInputError("'" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidInputError("'" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

Side to_side(const std::string& key, const std::string& v) {
  if (v == "left") return Side::kLeft;
  if (v == "right") return Side::kRight;
  throw InvalidInputError("'" + key + "': expected left or right");
}

using Setter = std::function<void(const std::string& key, const std::string&)>;

void add_spec_setters(ProblemSpec* s, std::map<std::string, Setter>* m) {
  auto d = [](double* field) {
    return [field](const std::string& k, const std::string& v) {
      *field = to_double(k, v);
    };
  };
  auto& t = *m;
  t["spec.x"] = d(&s->initial_state.pos.x());
  t["spec.y"] = d(&s->initial_state.pos.y());
  t["spec.vx"] = d(&s->initial_state.vel.x());
  t["spec.vy"] = d(&s->initial_state.vel.y());
  t["spec.support_x"] = d(&s->current_support.xy.x());
  t["spec.support_y"] = d(&s->current_support.xy.y());
  t["spec.support_z"] = d(&s->current_support.z);
  t["spec.support_side"] = [s](const std::string& k, const std::string& v) {
    s->support_side = to_side(k, v);
  };
  t["spec.ref_vx"] = d(&s->ref_velocity.x());
  t["spec.ref_vy"] = d(&s->ref_velocity.y());
  t["spec.w_x"] = d(&s->weights.w_x);
  t["spec.w_y"] = d(&s->weights.w_y);
  t["spec.l_max"] = d(&s->limits.l_max);
  t["spec.v_max"] = d(&s->limits.v_max);
  t["spec.r_foot"] = d(&s->limits.r_foot);
  t["spec.t_lower"] = d(&s->limits.t_lower);
  t["spec.t_upper"] = d(&s->limits.t_upper);
  t["spec.g"] = [s](const std::string& k, const std::string& v) {
    s->params = LipParams(to_double(k, v), s->params.h());
  };
  t["spec.h"] = [s](const std::string& k, const std::string& v) {
    s->params = LipParams(s->params.g(), to_double(k, v));
  };
  t["spec.horizon"] = [s](const std::string& k, const std::string& v) {
    s->horizon = static_cast<int>(to_int(k, v));
  };
  t["spec.step_elapsed"] = d(&s->step_elapsed);
  t["spec.optimize_durations"] = [s](const std::string& k,
                                     const std::string& v) {
    s->optimize_durations = to_bool(k, v);
  };
}

void apply_all(const KeyValues& kv, const std::map<std::string, Setter>& table,
               bool spec_only) {
  // Pendulum parameters are coupled, so apply g before h.
  std::vector<std::pair<std::string, std::string>> ordered(kv.begin(),
                                                           kv.end());
  for (const auto& [key, value] : ordered) {
    if (spec_only && key.rfind("spec.", 0) != 0) continue;
    auto it = table.find(key);
    if (it == table.end()) {
      throw InvalidInputError("unknown configuration key '" + key + "'");
    }
    it->second(key, value);
  }
}

}  // namespace

KeyValues parse_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open config '" + path + "'");
  return parse_key_values(f);
}

void apply_override(const std::string& assignment, KeyValues* kv) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw InvalidInputError("override '" + assignment + "' needs key=value");
  }
  (*kv)[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

void write_problem_spec(const ProblemSpec& s, std::ostream& os) {
  os << "spec.x = " << num(s.initial_state.pos.x()) << '\n'
     << "spec.y = " << num(s.initial_state.pos.y()) << '\n'
     << "spec.vx = " << num(s.initial_state.vel.x()) << '\n'
     << "spec.vy = " << num(s.initial_state.vel.y()) << '\n'
     << "spec.support_x = " << num(s.current_support.xy.x()) << '\n'
     << "spec.support_y = " << num(s.current_support.xy.y()) << '\n'
     << "spec.support_z = " << num(s.current_support.z) << '\n'
     << "spec.support_side = "
     << (s.support_side == Side::kLeft ? "left" : "right") << '\n'
     << "spec.ref_vx = " << num(s.ref_velocity.x()) << '\n'
     << "spec.ref_vy = " << num(s.ref_velocity.y()) << '\n'
     << "spec.w_x = " << num(s.weights.w_x) << '\n'
     << "spec.w_y = " << num(s.weights.w_y) << '\n'
     << "spec.l_max = " << num(s.limits.l_max) << '\n'
     << "spec.v_max = " << num(s.limits.v_max) << '\n'
     << "spec.r_foot = " << num(s.limits.r_foot) << '\n'
     << "spec.t_lower = " << num(s.limits.t_lower) << '\n'
     << "spec.t_upper = " << num(s.limits.t_upper) << '\n'
     << "spec.g = " << num(s.params.g()) << '\n'
     << "spec.h = " << num(s.params.h()) << '\n'
     << "spec.horizon = " << s.horizon << '\n'
     << "spec.step_elapsed = " << num(s.step_elapsed) << '\n'
     << "spec.optimize_durations = "
     << (s.optimize_durations ? "true" : "false") << '\n';
}

ProblemSpec read_problem_spec(const KeyValues& kv) {
  ProblemSpec spec;
  std::map<std::string, Setter> table;
  add_spec_setters(&spec, &table);
  apply_all(kv, table, true);
  spec.validate();
  return spec;
}

double parse_direction(const std::string& text) {
  const std::string t = trim(text);
  if (t == "forward") return 0.0;
  if (t == "left") return 90.0;
  if (t == "backward") return 180.0;
  if (t == "right") return 270.0;
  return to_double("push.direction", t);
}

ScenarioConfig scenario_from_key_values(const KeyValues& kv) {
  ScenarioConfig c;
  Scenario& sc = c.scenario;
  PlannerConfig& pc = sc.planner;
  SimConfig& sim = sc.sim;
  PushEvent push;
  bool have_push = false;

  std::map<std::string, Setter> t;
  add_spec_setters(&sc.spec, &t);
  auto d = [](double* field) {
    return [field](const std::string& k, const std::string& v) {
      *field = to_double(k, v);
    };
  };
  auto i = [](int* field) {
    return [field](const std::string& k, const std::string& v) {
      *field = static_cast<int>(to_int(k, v));
    };
  };
  auto b = [](bool* field) {
    return [field](const std::string& k, const std::string& v) {
      *field = to_bool(k, v);
    };
  };
  auto modes = [](std::vector<PlannerMode>* field) {
    return [field](const std::string&, const std::string& v) {
      field->clear();
      for (const auto& m : split_list(v)) {
        field->push_back(parse_planner_mode(m));
      }
    };
  };
  auto doubles = [](std::vector<double>* field) {
    return [field](const std::string& k, const std::string& v) {
      field->clear();
      for (const auto& x : split_list(v)) field->push_back(to_double(k, x));
    };
  };

  t["seed"] = [&c](const std::string& k, const std::string& v) {
    const long s = to_int(k, v);
    if (s < 0) throw InvalidInputError("seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  };
  t["out_dir"] = [&c](const std::string&, const std::string& v) {
    c.out_dir = v;
  };

  t["planner.mode"] = [&pc](const std::string&, const std::string& v) {
    pc.mode = parse_planner_mode(v);
  };
  t["planner.fast_rate"] = d(&pc.fast_rate);
  t["planner.reference_rate"] = d(&pc.reference_rate);
  t["planner.nominal_duration"] = d(&pc.nominal_duration);
  t["planner.nominal_width"] = d(&pc.nominal_width);
  t["planner.reference_latency"] = d(&pc.reference_latency);
  t["planner.al.alpha"] = d(&pc.al.alpha);
  t["planner.al.phi"] = d(&pc.al.phi);
  t["planner.al.mu0"] = d(&pc.al.mu0);
  t["planner.al.grad_norm_delta_tol"] = d(&pc.al.grad_norm_delta_tol);
  t["planner.al.max_inner_iters"] = i(&pc.al.max_inner_iters);
  t["planner.al.inner_per_outer"] = i(&pc.al.inner_per_outer);
  t["planner.al.constraint_tol"] = d(&pc.al.constraint_tol);
  t["planner.al.max_backtracks"] = i(&pc.al.max_backtracks);
  t["planner.ref.max_iters"] = i(&pc.ref.max_iters);
  t["planner.ref.tol_stationarity"] = d(&pc.ref.tol_stationarity);

  t["sim.rate"] = d(&sim.sim_rate);
  t["sim.total_mass"] = d(&sim.total_mass);
  t["sim.max_time"] = d(&sim.max_time);
  t["sim.recovery_window"] = i(&sim.recovery_window);
  t["sim.recovery_tol"] = d(&sim.recovery_tol);
  t["sim.settle_steps"] = i(&sim.settle_steps);
  t["sim.stop_on_recovery"] = b(&sim.stop_on_recovery);
  t["sim.not_ready_grace"] = d(&sim.not_ready_grace);
  t["sim.terrain_mode"] = [&sim](const std::string&, const std::string& v) {
    sim.terrain_mode = parse_terrain_mode(v);
  };
  t["sim.footprint_half_width"] = d(&sim.footprint_half_width);
  t["sim.plane_rate"] = d(&sim.plane_rate);
  t["sim.swing_clearance"] = d(&sim.swing_clearance);
  t["sim.leg_margin"] = d(&sim.leg_margin);
  t["sim.height_ratio_min"] = d(&sim.height_ratio_min);
  t["sim.height_ratio_max"] = d(&sim.height_ratio_max);
  t["sim.max_speed"] = d(&sim.max_speed);
  t["sim.violation_margin"] = d(&sim.violation_margin);
  t["sim.init_pos_radius"] = d(&sim.init_pos_radius);
  t["sim.init_vel_radius"] = d(&sim.init_vel_radius);
  t["sim.initial_width"] = d(&sc.initial_width);
  t["sim.initial_period"] = d(&sc.initial_period);

  auto push_field = [&have_push](Setter inner) {
    return [&have_push, inner](const std::string& k, const std::string& v) {
      have_push = true;
      inner(k, v);
    };
  };
  t["push.force"] = push_field(d(&push.force));
  t["push.duration"] = push_field(d(&push.duration));
  t["push.after_steps"] = push_field(i(&push.after_steps));
  t["push.direction"] = push_field(
      [&push](const std::string&, const std::string& v) {
        push.direction_deg = parse_direction(v);
      });
  t["push.trigger"] = push_field(
      [&push](const std::string& k, const std::string& v) {
        push.trigger_side = to_side(k, v);
      });
  t["push.compare_modes"] = modes(&c.compare_modes);

  t["terrain.kind"] = [&c](const std::string&, const std::string& v) {
    static const std::map<std::string, TerrainKind> kinds = {
        {"none", TerrainKind::kNone}, {"flat", TerrainKind::kFlat},
        {"ramp", TerrainKind::kRamp}, {"steps", TerrainKind::kSteps},
        {"file", TerrainKind::kFile}};
    auto it = kinds.find(v);
    if (it == kinds.end()) {
      throw InvalidInputError("unknown terrain kind '" + v + "'");
    }
    c.terrain.kind = it->second;
  };
  t["terrain.file"] = [&c](const std::string&, const std::string& v) {
    c.terrain.file = v;
    c.terrain.kind = TerrainKind::kFile;
  };
  t["terrain.angle"] = d(&c.terrain.angle_deg);
  t["terrain.heading"] = d(&c.terrain.heading_deg);
  t["terrain.step_height"] = d(&c.terrain.step_height);
  t["terrain.step_length"] = d(&c.terrain.step_length);
  t["terrain.noise"] = d(&c.terrain.noise);
  t["terrain.x_min"] = d(&c.terrain.extent.x_min);
  t["terrain.x_max"] = d(&c.terrain.extent.x_max);
  t["terrain.y_min"] = d(&c.terrain.extent.y_min);
  t["terrain.y_max"] = d(&c.terrain.extent.y_max);
  t["terrain.resolution"] = d(&c.terrain.extent.resolution);

  t["sweep.kind"] = [&c](const std::string&, const std::string& v) {
    if (v != "push" && v != "success") {
      throw InvalidInputError("sweep.kind must be push or success");
    }
    c.sweep_kind = v;
  };
  t["sweep.modes"] = modes(&c.push_sweep.modes);
  t["sweep.directions"] = doubles(&c.push_sweep.directions);
  t["sweep.ceiling"] = d(&c.push_sweep.ceiling);
  t["sweep.resolution"] = d(&c.push_sweep.resolution);
  t["sweep.family"] = [&c](const std::string&, const std::string& v) {
    if (v == "slope") {
      c.success_sweep.family = TerrainFamily::kSlope;
    } else if (v == "steps") {
      c.success_sweep.family = TerrainFamily::kSteps;
    } else {
      throw InvalidInputError("sweep.family must be slope or steps");
    }
  };
  t["sweep.parameters"] = doubles(&c.success_sweep.parameters);
  t["sweep.trials"] = i(&c.success_sweep.trials);
  t["sweep.step_length"] = d(&c.success_sweep.step_length);
  t["sweep.conditions"] = [&c](const std::string&, const std::string& v) {
    c.success_sweep.conditions.clear();
    for (const auto& item : split_list(v)) {
      const auto colon = item.find(':');
      Condition cond;
      cond.planner = parse_planner_mode(item.substr(0, colon));
      if (colon != std::string::npos) {
        cond.terrain = parse_terrain_mode(item.substr(colon + 1));
      }
      c.success_sweep.conditions.push_back(cond);
    }
  };
  t["sweep.init_pos_radius"] = d(&c.success_sweep.init_pos_radius);
  t["sweep.init_vel_radius"] = d(&c.success_sweep.init_vel_radius);

  // spec.g must be applied before spec.h is combined with it; std::map
  // orders "spec.g" before "spec.h" already.
  apply_all(kv, t, false);

  if (have_push) sc.push = push;
  sim.seed = c.seed;
  c.success_sweep.seed = c.seed;
  sc.spec.validate();
  pc.validate();
  sim.validate();
  if (sc.push) sc.push->validate();
  if (c.success_sweep.trials < 1) {
    throw InvalidInputError("sweep.trials must be >= 1");
  }
  if (!(c.push_sweep.resolution > 0.0) || !(c.push_sweep.ceiling > 0.0)) {
    throw InvalidInputError("sweep force range must be positive");
  }
  return c;
}

std::shared_ptr<const HeightMap> build_terrain(const TerrainSource& src,
                                               std::uint64_t seed) {
  std::shared_ptr<const HeightMap> map;
  switch (src.kind) {
    case TerrainKind::kNone:
      return nullptr;
    case TerrainKind::kFlat:
      map = std::make_shared<const HeightMap>(make_flat(src.extent));
      break;
    case TerrainKind::kRamp:
      map = std::make_shared<const HeightMap>(
          make_ramp(src.extent, src.angle_deg, src.heading_deg));
      break;
    case TerrainKind::kSteps:
      map = std::make_shared<const HeightMap>(
          make_steps(src.extent, src.step_height, src.step_length));
      break;
    case TerrainKind::kFile:
      map = std::make_shared<const HeightMap>(load_hmap(src.file));
      break;
  }
  if (src.noise > 0.0) {
    map = std::make_shared<const HeightMap>(add_noise(*map, src.noise, seed));
  }
  return map;
}

}  // namespace stepopt
