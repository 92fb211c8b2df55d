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

#ifndef STEPOPT_CONFIG_H_
#define STEPOPT_CONFIG_H_

// Plain-text "key = value" configuration. '#' starts a comment; blank lines
// are ignored; later keys override earlier ones.

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <vector>
#include <ostream>
#include <string>

#include "stepopt/problem.h"
#include "stepopt/sim.h"

namespace stepopt {

using KeyValues = std::map<std::string, std::string>;

// Throws ParseError with the line number.
KeyValues parse_key_values(std::istream& is);
KeyValues load_key_values(const std::string& path);
// "key=value"; throws InvalidInputError if there is no '='.
void apply_override(const std::string& assignment, KeyValues* kv);

// Keys spec.*; unknown spec.* keys are rejected.
void write_problem_spec(const ProblemSpec& spec, std::ostream& os);
ProblemSpec read_problem_spec(const KeyValues& kv);

enum class TerrainKind { kNone, kFlat, kRamp, kSteps, kFile };

struct TerrainSource {
  TerrainKind kind = TerrainKind::kNone;
  std::string file;
  double angle_deg = 0.0;    // ramp
  double heading_deg = 0.0;  // ramp
  double step_height = 0.05;
  double step_length = 0.3;
  double noise = 0.0;        // height noise sigma, m
  MapExtent extent{-1.0, 4.0, -1.0, 1.0, 0.02};
};

struct ScenarioConfig {
  Scenario scenario;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  TerrainSource terrain;
  // walk
  // push: compare these modes on the same push
  std::vector<PlannerMode> compare_modes = {PlannerMode::kArtoAl,
                                            PlannerMode::kNoTimeAdp};
  // sweep
  std::string sweep_kind = "push";  // push | success
  SweepConfig push_sweep;
  SuccessSweepConfig success_sweep;
};

// Every key must be known; values are validated. Throws InvalidInputError.
ScenarioConfig scenario_from_key_values(const KeyValues& kv);

// Direction as degrees or one of forward, left, backward, right.
double parse_direction(const std::string& text);

// Builds (and loads) the configured height map; null for kNone.
std::shared_ptr<const HeightMap> build_terrain(const TerrainSource& src,
                                               std::uint64_t seed);

}  // namespace stepopt

#endif  // STEPOPT_CONFIG_H_
