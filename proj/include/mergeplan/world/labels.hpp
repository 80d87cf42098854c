#pragma once

// Labelling function and collision geometry.
//
// Per ego the grounded propositions are
//   sd_front   gap to the nearest same-lane front vehicle >= safe distance
//              (true when nothing is in front)
//   idf#j      j is on the ending lane, unmerged, ahead of the ego, and the
//              nearest such agent
//   m#j        j is on lane 0 with no blend in progress
//   ahead#j    ego arc length > j's arc length
//   collide    ego footprint overlaps another agent, or the ego hit the lane end
//   at_goal    ego on the goal lane, no blend in progress, inside the goal interval
//   alive      every step except the final one

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mergeplan/ltlf/monitor.hpp"
#include "mergeplan/world/world.hpp"

namespace mergeplan::world {

struct SafeDistanceParams {
  double headway = 1.0;
  double minimum = 2.0;
};

double safe_distance_threshold(double v, const SafeDistanceParams& p = {});

struct Pose2 {
  double x;
  double y;
};

// Footprint corners, counter-clockwise.
std::array<Pose2, 4> corners(const AgentState& a);

// Separating-axis overlap test of the two oriented footprints.
bool check_collision(const AgentState& a, const AgentState& b);

// Label kinds with a fixed bit position, for allocation-free monitoring.
enum class LabelKind : std::uint8_t { kSdFront, kCollide, kAtGoal, kIdf, kMerged, kAhead, kAlive, kUnknown };

LabelKind label_kind(std::string_view base_name);

struct OtherLabels {
  int id;
  bool idf;
  bool merged;
  bool ahead;
};

struct FrameLabels {
  bool sd_front = true;
  bool collide = false;
  bool at_goal = false;
  std::vector<OtherLabels> others;

  const OtherLabels* other(int id) const;
};

FrameLabels compute_labels(const WorldState& w, int ego, const SafeDistanceParams& sd = {});

// Grounded label set for the (ego, other) binding; `other` may be omitted for
// agent-independent rules.
ltlf::LabelSet label_world(const WorldState& w, int ego, std::optional<int> other, bool is_final_step,
                           const SafeDistanceParams& sd = {});

// Same content as label_world, read from precomputed frame labels.
ltlf::LabelSet to_label_set(const FrameLabels& f, std::optional<int> other, bool alive);

}  // namespace mergeplan::world
