#pragma once

// Other-agent model (IDM longitudinal, MOBIL lateral behind a lane filter)
// and the ego's discrete motion primitives.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mergeplan/world/world.hpp"

namespace mergeplan::behavior {

inline constexpr double kMaxBraking = -8.0;

struct IdmParams {
  double desired_velocity = 10.0;
  double max_acceleration = 1.7;
  double time_headway = 2.5;
  double comfortable_deceleration = 2.0;
  double min_distance = 2.0;
  double exponent = 4.0;

  void validate() const;
};

struct MobilParams {
  double politeness = 0.0;
  double safe_deceleration = 4.0;
  double acceleration_threshold = 0.2;
};

struct LaneFilterParams {
  double min_rear_distance = 0.5;
  double min_front_distance = 1.0;
  double time_gap = 0.5;
};

struct BehaviorParams {
  IdmParams idm;
  MobilParams mobil;
  LaneFilterParams filter;

  void validate() const;
};

// a = a_max [1 - (v/v0)^δ - (s*/gap)^2], s* = s0 + max(0, vT + vΔv / (2 sqrt(a_max b))),
// Δv = v - v_leader. Without a leader the interaction term is dropped. The
// result is clamped to [kMaxBraking, a_max]; a leader at gap <= 0 gives kMaxBraking.
double idm_acceleration(double v, std::optional<double> gap, double dv, const IdmParams& p);

// IDM acceleration of `me` if it drove on `lane` now: the nearest front
// vehicle on that lane is the leader, and on the ending lane the lane end
// acts as a stopped obstacle.
double idm_on_lane(const world::WorldState& w, const world::AgentState& me, int lane, const IdmParams& p);

// IDM acceleration for the agent's current situation. During a blend the
// more restrictive of both lanes applies; an agent leaving the ending lane
// no longer sees the lane end.
double idm_current(const world::WorldState& w, const world::AgentState& me, const IdmParams& p);

bool lane_change_admissible(const world::WorldState& w, int agent, int target, const LaneFilterParams& f);

// nullopt keeps the lane.
std::optional<int> mobil_lane_decision(const world::WorldState& w, int agent, const MobilParams& m,
                                       const LaneFilterParams& f, const IdmParams& idm);

world::Command other_agent_command(const world::WorldState& w, const world::AgentState& a, const BehaviorParams& p);

// Commands for every agent except the ego, aligned with w.agents (the ego's
// slot is left default).
std::vector<world::Command> other_agent_commands(const world::WorldState& w, const BehaviorParams& p);

enum class EgoAction : std::uint8_t { kKeep, kAccelerate, kBrake, kHardBrake, kChangeLane, kGapKeep };

inline constexpr std::size_t kEgoActionCount = 6;
inline constexpr std::array<EgoAction, kEgoActionCount> kEgoActions{
    EgoAction::kKeep,       EgoAction::kAccelerate, EgoAction::kBrake,
    EgoAction::kHardBrake,  EgoAction::kChangeLane, EgoAction::kGapKeep};

std::string_view to_string(EgoAction a);

struct Primitive {
  world::Command command;
  // Lane change requested where no adjacent lane is drivable; mapped to keep.
  bool invalid = false;
};

inline constexpr double kGapKeepDesiredVelocity = 14.0;

// `gap_keep` is the IDM used by the gap-keeping primitive.
Primitive primitive_action(const world::WorldState& w, int ego, EgoAction action, const IdmParams& gap_keep);

// B_o parameters with the ego's desired speed.
IdmParams gap_keep_params(const IdmParams& base);

BehaviorParams parse_behavior_params(std::string_view text);
BehaviorParams load_behavior_params(const std::string& path);
std::string print_behavior_params(const BehaviorParams& p);

}  // namespace mergeplan::behavior
