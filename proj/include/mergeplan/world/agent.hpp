#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

namespace mergeplan::world {

inline constexpr int kContinuingLane = 0;
inline constexpr int kEndingLane = 1;

// Two straight lanes along +x. Lane 0 runs the whole corridor; lane 1 sits
// lane_width to the left and ends at s_merge. Arc length equals x.
struct MergingMap {
  double lane_width = 3.5;
  double s_merge = 180.0;
  double length = 300.0;

  double lane_y(int lane) const { return lane * lane_width; }
  bool has_lane(int lane) const { return lane == kContinuingLane || lane == kEndingLane; }
  // Whether `lane` is drivable at arc length s.
  bool drivable(int lane, double s) const;
  // Throws std::invalid_argument on non-positive or inconsistent dimensions.
  void validate() const;
};

enum class Behavior { kIdmMobil, kStatic };

std::string_view to_string(Behavior b);
std::optional<Behavior> parse_behavior(std::string_view text);

struct AgentState {
  int id = 0;
  // Source lane; stays put until a lane change completes.
  int lane = kContinuingLane;
  std::optional<int> target_lane;
  // Fraction of the lane-change blend done, in [0, 1).
  double progress = 0.0;

  double s = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
  double heading = 0.0;
  double heading_rate = 0.0;
  double length = 4.5;
  double width = 1.8;

  Behavior behavior = Behavior::kIdmMobil;
  // Set on the step the agent leaves the corridor.
  bool exited = false;
  // Set on the step the agent was stopped by the end of lane 1.
  bool blocked = false;

  bool changing_lane() const { return target_lane.has_value(); }
  bool occupies(int l) const { return lane == l || target_lane == l; }
  double front() const { return s + 0.5 * length; }
  double rear() const { return s - 0.5 * length; }
};

// Agent placed on a lane centreline, heading along the lane.
AgentState make_agent(int id, int lane, double s, double v, const MergingMap& map, double length = 4.5,
                      double width = 1.8, Behavior behavior = Behavior::kIdmMobil);

struct Command {
  double accel = 0.0;
  std::optional<int> change_to;
};

class InvalidCommand : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultLaneChangeDuration = 2.0;

// Whether a lane change from the agent's current lane to `target` may start.
bool lane_change_valid(const AgentState& a, int target, const MergingMap& map);

// One Δt of kinematics. Longitudinal: constant acceleration with v >= 0.
// Lateral: a smooth-step blend toward the target lane over
// `lane_change_duration` seconds; heading follows the blended path tangent.
// A fully-on-lane-1 agent reaching the lane end is stopped there and flagged
// `blocked`. Throws InvalidCommand for a change into a missing or ended lane.
AgentState step_agent(const AgentState& a, const Command& cmd, double dt, const MergingMap& map,
                      double lane_change_duration = kDefaultLaneChangeDuration);

// 3x^2 - 2x^3 on [0, 1].
double smoothstep(double x);

}  // namespace mergeplan::world
