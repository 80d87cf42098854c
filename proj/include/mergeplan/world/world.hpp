#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mergeplan/world/agent.hpp"

namespace mergeplan::world {

struct GoalRegion {
  double s_min = 250.0;
  double s_max = 280.0;
  int lane = kContinuingLane;
};

struct WorldState {
  MergingMap map;
  GoalRegion goal;
  std::vector<AgentState> agents;
  int ego_id = 0;
  double time = 0.0;
  double dt = 0.5;
  double lane_change_duration = kDefaultLaneChangeDuration;

  const AgentState* find(int id) const;
  const AgentState& agent(int id) const;
  const AgentState& ego() const { return agent(ego_id); }
};

struct Neighbor {
  const AgentState* agent = nullptr;
  // Bumper to bumper; negative when the footprints overlap longitudinally.
  double gap = 0.0;
};

// Nearest agent on `lane` (by lane occupancy, blends count for both lanes)
// whose arc length is >= me.s (front) or < me.s (rear). Exited agents and
// `me` itself are skipped.
std::optional<Neighbor> front_on_lane(const WorldState& w, const AgentState& me, int lane);
std::optional<Neighbor> rear_on_lane(const WorldState& w, const AgentState& me, int lane);

// Nearest front vehicle over every lane `me` occupies.
std::optional<Neighbor> front_vehicle(const WorldState& w, const AgentState& me);

// Steps every agent with commands[i] for agents[i]. Agents flagged `exited`
// on the previous step are dropped first; non-ego agents whose rear passes
// the corridor end are flagged `exited`. Throws InvalidCommand.
WorldState step_world(const WorldState& w, std::span<const Command> commands);

// Drops agents flagged `exited`; step_world() does this itself.
void drop_exited(WorldState& w);

}  // namespace mergeplan::world
