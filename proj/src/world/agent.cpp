#include "mergeplan/world/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mergeplan::world {

bool MergingMap::drivable(int lane, double s) const {
  if (lane == kContinuingLane) return true;
  if (lane == kEndingLane) return s < s_merge;
  return false;
}

void MergingMap::validate() const {
  if (!(lane_width > 0.0)) throw std::invalid_argument("lane_width must be positive");
  if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
  if (!(s_merge > 0.0 && s_merge <= length)) throw std::invalid_argument("s_merge must lie in (0, length]");
}

std::string_view to_string(Behavior b) { return b == Behavior::kStatic ? "static" : "idm_mobil"; }

std::optional<Behavior> parse_behavior(std::string_view text) {
  if (text == "idm_mobil") return Behavior::kIdmMobil;
  if (text == "static") return Behavior::kStatic;
  return std::nullopt;
}

AgentState make_agent(int id, int lane, double s, double v, const MergingMap& map, double length, double width,
                      Behavior behavior) {
  AgentState a;
  a.id = id;
  a.lane = lane;
  a.s = s;
  a.y = map.lane_y(lane);
  a.v = v;
  a.length = length;
  a.width = width;
  a.behavior = behavior;
  return a;
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

bool lane_change_valid(const AgentState& a, int target, const MergingMap& map) {
  return map.has_lane(target) && std::abs(target - a.lane) == 1 && map.drivable(target, a.s);
}

AgentState step_agent(const AgentState& a, const Command& cmd, double dt, const MergingMap& map,
                      double lane_change_duration) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  AgentState n = a;
  n.blocked = false;

  if (cmd.change_to && !a.changing_lane() && *cmd.change_to != a.lane) {
    if (!lane_change_valid(a, *cmd.change_to, map)) {
      throw InvalidCommand("agent " + std::to_string(a.id) + ": lane change to " + std::to_string(*cmd.change_to) +
                           " at s=" + std::to_string(a.s) + " is not possible");
    }
    n.target_lane = cmd.change_to;
    n.progress = 0.0;
  }

  // Longitudinal.
  n.a = cmd.accel;
  const double v_end = a.v + cmd.accel * dt;
  if (v_end >= 0.0) {
    n.v = v_end;
    n.s = a.s + a.v * dt + 0.5 * cmd.accel * dt * dt;
  } else {
    const double t_stop = -a.v / cmd.accel;
    n.v = 0.0;
    n.s = a.s + a.v * t_stop + 0.5 * cmd.accel * t_stop * t_stop;
  }

  // Lateral.
  double lateral_rate = 0.0;
  if (n.target_lane) {
    n.progress = std::min(1.0, n.progress + dt / lane_change_duration);
    const double y0 = map.lane_y(n.lane);
    const double dy = map.lane_y(*n.target_lane) - y0;
    n.y = y0 + dy * smoothstep(n.progress);
    lateral_rate = dy * 6.0 * n.progress * (1.0 - n.progress) / lane_change_duration;
    if (n.progress >= 1.0) {
      n.lane = *n.target_lane;
      n.target_lane.reset();
      n.progress = 0.0;
      n.y = map.lane_y(n.lane);
    }
  } else {
    n.y = map.lane_y(n.lane);
  }
  // Below 1 m/s the tangent is taken at 1 m/s so standstill blends stay bounded.
  n.heading = std::atan2(lateral_rate, std::max(n.v, 1.0));
  n.heading_rate = (n.heading - a.heading) / dt;

  if (n.lane == kEndingLane && !n.changing_lane() && n.front() > map.s_merge) {
    n.s = map.s_merge - 0.5 * n.length;
    n.v = 0.0;
    n.blocked = true;
  }
  return n;
}

}  // namespace mergeplan::world
