#pragma once

// Merge scenarios and their file format.
//
//   [scenario]   name, ego, time_limit, dt, seed, unsafe_start
//   [map]        lane_width, merge_point, length
//   [goal]       start, end, lane
//   [agent]      id, lane, s, v, length, width, behavior   (one block per agent)
//
// print_scenario writes every field in a fixed order, so parsing and printing
// a printed scenario reproduces it byte for byte.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mergeplan/world/world.hpp"

namespace mergeplan::bench {

struct ScenarioAgent {
  int id = 0;
  int lane = world::kContinuingLane;
  double s = 0.0;
  double v = 0.0;
  double length = 4.5;
  double width = 1.8;
  world::Behavior behavior = world::Behavior::kIdmMobil;

  friend bool operator==(const ScenarioAgent&, const ScenarioAgent&) = default;
};

struct Scenario {
  std::string name = "scenario";
  world::MergingMap map;
  world::GoalRegion goal;
  int ego_id = 0;
  double time_limit = 30.0;
  double dt = 0.5;
  std::uint64_t seed = 0;
  bool unsafe_start = false;
  std::vector<ScenarioAgent> agents;

  std::size_t max_steps() const;
  world::WorldState initial_world() const;
};

// Throws util::DocumentError naming the field and line.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string print_scenario(const Scenario& sc);

// Structural checks plus the overlap check (skipped with unsafe_start).
// Throws util::DocumentError; line 0 when the problem is not tied to a line.
void validate_scenario(const Scenario& sc);

struct SuiteParams {
  std::size_t count = 20;
  std::size_t min_agents = 2;  // including the ego
  std::size_t max_agents = 5;
  double ego_velocity = 14.0;
  double other_velocity = 10.0;
};

// Seeded merge suite: the ego on the continuing lane, the other agents split
// between the ending lane (ahead of the ego, so they merge in front of it)
// and the continuing lane.
std::vector<Scenario> generate_suite(std::uint64_t seed, const SuiteParams& p = {});

}  // namespace mergeplan::bench
