#include "mergeplan/behavior/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mergeplan/util/keyvalue.hpp"

namespace mergeplan::behavior {

using world::AgentState;
using world::WorldState;

void IdmParams::validate() const {
  if (!(desired_velocity > 0 && max_acceleration > 0 && time_headway > 0 && comfortable_deceleration > 0 &&
        min_distance > 0 && exponent > 0)) {
    throw std::invalid_argument("IDM parameters must be positive");
  }
}

void BehaviorParams::validate() const {
  idm.validate();
  if (!(mobil.safe_deceleration > 0)) throw std::invalid_argument("safe_deceleration must be positive");
  if (filter.min_rear_distance < 0 || filter.min_front_distance < 0 || filter.time_gap < 0) {
    throw std::invalid_argument("lane filter distances must be non-negative");
  }
}

double idm_acceleration(double v, std::optional<double> gap, double dv, const IdmParams& p) {
  double a = 1.0 - std::pow(v / p.desired_velocity, p.exponent);
  if (gap) {
    if (*gap <= 0.0) return kMaxBraking;
    const double dynamic = v * p.time_headway + v * dv / (2.0 * std::sqrt(p.max_acceleration * p.comfortable_deceleration));
    const double desired = p.min_distance + std::max(0.0, dynamic);
    a -= (desired / *gap) * (desired / *gap);
  }
  return std::clamp(p.max_acceleration * a, kMaxBraking, p.max_acceleration);
}

namespace {

double idm_lane(const WorldState& w, const AgentState& me, int lane, bool lane_end, const IdmParams& p) {
  std::optional<double> gap;
  double dv = 0.0;
  if (auto f = world::front_on_lane(w, me, lane)) {
    gap = f->gap;
    dv = me.v - f->agent->v;
  }
  if (lane_end && lane == world::kEndingLane) {
    const double end_gap = w.map.s_merge - me.front();
    if (!gap || end_gap < *gap) {
      gap = end_gap;
      dv = me.v;
    }
  }
  return idm_acceleration(me.v, gap, dv, p);
}

}  // namespace

double idm_on_lane(const WorldState& w, const AgentState& me, int lane, const IdmParams& p) {
  return idm_lane(w, me, lane, true, p);
}

double idm_current(const WorldState& w, const AgentState& me, const IdmParams& p) {
  const bool leaving_end = me.lane == world::kEndingLane && me.target_lane == world::kContinuingLane;
  double a = idm_lane(w, me, me.lane, !leaving_end, p);
  if (me.target_lane) a = std::min(a, idm_lane(w, me, *me.target_lane, true, p));
  return a;
}

bool lane_change_admissible(const WorldState& w, int agent, int target, const LaneFilterParams& f) {
  const AgentState& me = w.agent(agent);
  if (!world::lane_change_valid(me, target, w.map)) return false;
  if (auto front = world::front_on_lane(w, me, target); front && front->gap < f.min_front_distance) return false;
  if (auto rear = world::rear_on_lane(w, me, target)) {
    if (rear->gap < f.min_rear_distance) return false;
    if (rear->agent->v > 0.0 && rear->gap / rear->agent->v < f.time_gap) return false;
  }
  return true;
}

std::optional<int> mobil_lane_decision(const WorldState& w, int agent, const MobilParams& m, const LaneFilterParams& f,
                                       const IdmParams& idm) {
  const AgentState& me = w.agent(agent);
  if (me.changing_lane()) return std::nullopt;

  auto follow = [&](const AgentState& follower, const AgentState& leader) {
    return idm_acceleration(follower.v, leader.rear() - follower.front(), follower.v - leader.v, idm);
  };

  const double a_c = idm_current(w, me, idm);
  // Old follower: `me` as leader now, `me`'s own leader afterwards. Inert at p = 0.
  double old_follower_gain = 0.0;
  if (auto o = world::rear_on_lane(w, me, me.lane); o && m.politeness != 0.0) {
    const auto after = world::front_on_lane(w, me, me.lane);
    const double a_o_new = after ? follow(*o->agent, *after->agent) : idm_acceleration(o->agent->v, std::nullopt, 0, idm);
    old_follower_gain = a_o_new - follow(*o->agent, me);
  }

  std::optional<int> best;
  double best_incentive = m.acceleration_threshold;
  for (int target : {me.lane - 1, me.lane + 1}) {
    if (!w.map.has_lane(target) || !lane_change_admissible(w, agent, target, f)) continue;
    const double a_c_new = idm_on_lane(w, me, target, idm);

    double new_follower_gain = 0.0;
    if (auto n = world::rear_on_lane(w, me, target)) {
      const double a_n_new = follow(*n->agent, me);
      if (a_n_new < -m.safe_deceleration) continue;
      new_follower_gain = a_n_new - idm_on_lane(w, *n->agent, target, idm);
    }

    const double incentive = a_c_new - a_c + m.politeness * (new_follower_gain + old_follower_gain);
    if (incentive > best_incentive) {
      best_incentive = incentive;
      best = target;
    }
  }
  return best;
}

world::Command other_agent_command(const WorldState& w, const AgentState& a, const BehaviorParams& p) {
  if (a.behavior == world::Behavior::kStatic) return {};
  world::Command c;
  c.accel = idm_current(w, a, p.idm);
  c.change_to = mobil_lane_decision(w, a.id, p.mobil, p.filter, p.idm);
  return c;
}

std::vector<world::Command> other_agent_commands(const WorldState& w, const BehaviorParams& p) {
  std::vector<world::Command> out(w.agents.size());
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    if (w.agents[i].id != w.ego_id && !w.agents[i].exited) out[i] = other_agent_command(w, w.agents[i], p);
  }
  return out;
}

std::string_view to_string(EgoAction a) {
  switch (a) {
    case EgoAction::kKeep: return "keep";
    case EgoAction::kAccelerate: return "accelerate";
    case EgoAction::kBrake: return "brake";
    case EgoAction::kHardBrake: return "hard_brake";
    case EgoAction::kChangeLane: return "change_lane";
    case EgoAction::kGapKeep: return "gap_keep";
  }
  return "?";
}

IdmParams gap_keep_params(const IdmParams& base) {
  IdmParams p = base;
  p.desired_velocity = kGapKeepDesiredVelocity;
  return p;
}

Primitive primitive_action(const WorldState& w, int ego, EgoAction action, const IdmParams& gap_keep) {
  const AgentState& me = w.agent(ego);
  switch (action) {
    case EgoAction::kKeep: return {{0.0, std::nullopt}, false};
    case EgoAction::kAccelerate: return {{1.0, std::nullopt}, false};
    case EgoAction::kBrake: return {{-2.0, std::nullopt}, false};
    case EgoAction::kHardBrake: return {{-8.0, std::nullopt}, false};
    case EgoAction::kChangeLane: {
      if (me.changing_lane()) return {{0.0, me.target_lane}, false};
      const int target = me.lane == world::kContinuingLane ? world::kEndingLane : world::kContinuingLane;
      if (!world::lane_change_valid(me, target, w.map)) return {{0.0, std::nullopt}, true};
      return {{0.0, target}, false};
    }
    case EgoAction::kGapKeep: return {{idm_current(w, me, gap_keep), std::nullopt}, false};
  }
  return {};
}

BehaviorParams parse_behavior_params(std::string_view text) {
  const auto doc = util::Document::parse(text);
  BehaviorParams p;
  for (const auto& s : doc.sections()) {
    if (s.name() == "idm") {
      s.reject_unknown({"desired_velocity", "max_acceleration", "time_headway", "comfortable_deceleration",
                        "min_distance", "exponent"});
      p.idm.desired_velocity = s.opt_double("desired_velocity").value_or(p.idm.desired_velocity);
      p.idm.max_acceleration = s.opt_double("max_acceleration").value_or(p.idm.max_acceleration);
      p.idm.time_headway = s.opt_double("time_headway").value_or(p.idm.time_headway);
      p.idm.comfortable_deceleration = s.opt_double("comfortable_deceleration").value_or(p.idm.comfortable_deceleration);
      p.idm.min_distance = s.opt_double("min_distance").value_or(p.idm.min_distance);
      p.idm.exponent = s.opt_double("exponent").value_or(p.idm.exponent);
    } else if (s.name() == "mobil") {
      s.reject_unknown({"politeness", "safe_deceleration", "acceleration_threshold"});
      p.mobil.politeness = s.opt_double("politeness").value_or(p.mobil.politeness);
      p.mobil.safe_deceleration = s.opt_double("safe_deceleration").value_or(p.mobil.safe_deceleration);
      p.mobil.acceleration_threshold = s.opt_double("acceleration_threshold").value_or(p.mobil.acceleration_threshold);
    } else if (s.name() == "lane_filter") {
      s.reject_unknown({"min_rear_distance", "min_front_distance", "time_gap"});
      p.filter.min_rear_distance = s.opt_double("min_rear_distance").value_or(p.filter.min_rear_distance);
      p.filter.min_front_distance = s.opt_double("min_front_distance").value_or(p.filter.min_front_distance);
      p.filter.time_gap = s.opt_double("time_gap").value_or(p.filter.time_gap);
    } else {
      throw util::DocumentError(s.name(), s.line(), "unknown section, expected [idm], [mobil] or [lane_filter]");
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw util::DocumentError("", 0, e.what());
  }
  return p;
}

BehaviorParams load_behavior_params(const std::string& path) { return parse_behavior_params(util::read_file(path)); }

std::string print_behavior_params(const BehaviorParams& p) {
  using util::format_double;
  std::string out;
  out += "[idm]\n";
  out += "desired_velocity = " + format_double(p.idm.desired_velocity) + "\n";
  out += "max_acceleration = " + format_double(p.idm.max_acceleration) + "\n";
  out += "time_headway = " + format_double(p.idm.time_headway) + "\n";
  out += "comfortable_deceleration = " + format_double(p.idm.comfortable_deceleration) + "\n";
  out += "min_distance = " + format_double(p.idm.min_distance) + "\n";
  out += "exponent = " + format_double(p.idm.exponent) + "\n";
  out += "\n[mobil]\n";
  out += "politeness = " + format_double(p.mobil.politeness) + "\n";
  out += "safe_deceleration = " + format_double(p.mobil.safe_deceleration) + "\n";
  out += "acceleration_threshold = " + format_double(p.mobil.acceleration_threshold) + "\n";
  out += "\n[lane_filter]\n";
  out += "min_rear_distance = " + format_double(p.filter.min_rear_distance) + "\n";
  out += "min_front_distance = " + format_double(p.filter.min_front_distance) + "\n";
  out += "time_gap = " + format_double(p.filter.time_gap) + "\n";
  return out;
}

}  // namespace mergeplan::behavior
