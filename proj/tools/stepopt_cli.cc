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

// stepopt command-line driver: walk, push, sweep, terrain.
//
// Exit codes: 0 success, 1 episode failure, 2 configuration error.

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stepopt/config.h"
#include "stepopt/errors.h"
#include "stepopt/planner.h"
#include "stepopt/sim.h"
#include "stepopt/terrain.h"

namespace fs = std::filesystem;
using namespace stepopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEpisode = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::optional<std::int64_t> seed;
  std::string out;
  std::string mode;
  bool single_thread = false;
  std::vector<std::string> sets;
};

ScenarioConfig load_config(const Options& opt) {
  KeyValues kv;
  if (!opt.config.empty()) kv = load_key_values(opt.config);
  for (const auto& s : opt.sets) apply_override(s, &kv);
  if (opt.seed) kv["seed"] = std::to_string(*opt.seed);
  if (!opt.out.empty()) kv["out_dir"] = opt.out;
  if (!opt.mode.empty()) kv["planner.mode"] = opt.mode;
  ScenarioConfig c = scenario_from_key_values(kv);
  c.scenario.sim.threaded = !opt.single_thread;
  c.scenario.terrain = build_terrain(c.terrain, c.seed);
  return c;
}

fs::path out_path(const ScenarioConfig& c, const std::string& name) {
  return fs::path(c.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

void write_episode(const ScenarioConfig& c, const std::string& prefix,
                   const EpisodeResult& r) {
  auto ticks = open_out(out_path(c, prefix + "_ticks.csv"));
  write_episode_csv(r, ticks);
  auto steps = open_out(out_path(c, prefix + "_steps.csv"));
  write_steps_csv(r, steps);
  auto summary = open_out(out_path(c, prefix + "_summary.json"));
  summary << episode_summary_json(r) << "\n";
}

void report(const std::string& what, const EpisodeResult& r) {
  std::cout << what << ": " << (r.success ? "success" : "failure")
            << " steps=" << r.steps_taken;
  if (r.steps_to_recover >= 0) {
    std::cout << " steps_to_recover=" << r.steps_to_recover;
  }
  if (!r.diagnostic.empty()) std::cout << " (" << r.diagnostic << ")";
  std::cout << "\n";
}

int cmd_walk(ScenarioConfig c) {
  c.scenario.push.reset();
  c.scenario.sim.stop_on_recovery = false;
  const EpisodeResult r = run_episode(c.scenario);
  write_episode(c, "walk", r);
  report("walk", r);
  return r.success ? kExitOk : kExitEpisode;
}

int cmd_push(ScenarioConfig c, const std::string& mode_flag) {
  if (!c.scenario.push) c.scenario.push = PushEvent{30.0};
  c.scenario.sim.stop_on_recovery = false;
  std::vector<PlannerMode> modes = c.compare_modes;
  if (!mode_flag.empty()) {
    // --mode puts that mode first; the others stay for comparison.
    const PlannerMode m = parse_planner_mode(mode_flag);
    std::erase(modes, m);
    modes.insert(modes.begin(), m);
  }
  auto table = open_out(out_path(c, "push_comparison.csv"));
  table << "mode,force_n,direction_deg,success,steps_to_recover,"
           "steps_taken,push_time_s,diagnostic\n";
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  bool primary_ok = false;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    Scenario s = c.scenario;
    s.planner.mode = modes[i];
    const EpisodeResult r = run_episode(s);
    const std::string name = to_string(modes[i]);
    write_episode(c, "push_" + name, r);
    table << name << "," << s.push->force << "," << s.push->direction_deg
          << "," << (r.success ? 1 : 0) << "," << r.steps_to_recover << ","
          << r.steps_taken << "," << r.push_time << "," << r.diagnostic
          << "\n";
    summary.push_back({{"mode", name},
                       {"success", r.success},
                       {"steps_to_recover", r.steps_to_recover},
                       {"steps_taken", r.steps_taken}});
    report("push " + name, r);
    if (i == 0) primary_ok = r.success;
  }
  auto js = open_out(out_path(c, "push_summary.json"));
  js << summary.dump(2) << "\n";
  return primary_ok ? kExitOk : kExitEpisode;
}

int cmd_sweep(ScenarioConfig c, bool serial) {
  if (c.sweep_kind == "push") {
    const auto rows = serial ? push_sweep_serial(c.scenario, c.push_sweep)
                             : push_sweep(c.scenario, c.push_sweep);
    auto os = open_out(out_path(c, "sweep.csv"));
    write_sweep_csv(rows, os);
    write_sweep_csv(rows, std::cout);
  } else {
    const auto rows =
        serial ? success_rate_sweep_serial(c.scenario, c.success_sweep)
               : success_rate_sweep(c.scenario, c.success_sweep);
    auto os = open_out(out_path(c, "success.csv"));
    write_success_csv(rows, os);
    write_success_csv(rows, std::cout);
  }
  return kExitOk;
}

// Ground-truth plane for synthetic maps; nullopt when unknown.
std::optional<std::pair<double, double>> true_slope(const TerrainSource& t) {
  switch (t.kind) {
    case TerrainKind::kFlat:
      return std::make_pair(0.0, 0.0);
    case TerrainKind::kRamp: {
      const double a = t.angle_deg * M_PI / 180.0;
      const double h = t.heading_deg * M_PI / 180.0;
      return std::make_pair(std::tan(a) * std::cos(h),
                            std::tan(a) * std::sin(h));
    }
    default:
      return std::nullopt;
  }
}

int cmd_terrain(ScenarioConfig c) {
  if (!c.scenario.terrain) {
    throw InvalidInputError("terrain command needs terrain.kind");
  }
  c.scenario.push.reset();
  c.scenario.sim.stop_on_recovery = false;
  const EpisodeResult r = run_episode(c.scenario);
  write_episode(c, "terrain", r);
  const auto truth = true_slope(c.terrain);
  auto os = open_out(out_path(c, "terrain_planes.csv"));
  // Slopes are dz/dx and dz/dy; heights in m.
  os << "time_s,slope_x,slope_y,slope_deg,true_slope_x,true_slope_y,"
        "true_slope_deg,support_height_m,estimate_height_m,height_error_m\n";
  os.precision(9);
  for (const auto& p : r.planes) {
    const double sx = p.estimate.alpha, sy = p.estimate.beta;
    os << p.time << "," << sx << "," << sy << ","
       << std::atan(std::hypot(sx, sy)) * 180.0 / M_PI << ",";
    if (truth) {
      os << truth->first << "," << truth->second << ","
         << std::atan(std::hypot(truth->first, truth->second)) * 180.0 / M_PI;
    } else {
      os << ",,";
    }
    os << "," << p.support_height << "," << p.estimate_height << ","
       << p.estimate_height - p.support_height << "\n";
  }
  report("terrain", r);
  return r.success ? kExitOk : kExitEpisode;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stepopt: footstep location and timing planner harness"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "key = value scenario file");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--mode", opt.mode,
                    "arto-al | al-only | ref-only | no-time-adp");
    sub->add_flag("--single-thread", opt.single_thread,
                  "deterministic interleaved planner loops");
    sub->add_option("--set", opt.sets, "override, key=value");
  };
  CLI::App* walk = app.add_subcommand("walk", "walk without disturbance");
  CLI::App* push = app.add_subcommand("push", "single push, mode comparison");
  CLI::App* sweep = app.add_subcommand("sweep", "push or success-rate sweep");
  CLI::App* terrain = app.add_subcommand("terrain", "walk on a height map");
  for (CLI::App* s : {walk, push, sweep, terrain}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  ScenarioConfig c;
  try {
    c = load_config(opt);
    fs::create_directories(c.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (walk->parsed()) return cmd_walk(c);
    if (push->parsed()) return cmd_push(c, opt.mode);
    if (sweep->parsed()) return cmd_sweep(c, opt.single_thread);
    return cmd_terrain(c);
  } catch (const InvalidInputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEpisode;
  }
}
