#include "mergeplan/world/world.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mergeplan::world {

const AgentState* WorldState::find(int id) const {
  for (const auto& a : agents) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const AgentState& WorldState::agent(int id) const {
  const AgentState* a = find(id);
  if (a == nullptr) throw std::out_of_range("no agent with id " + std::to_string(id));
  return *a;
}

namespace {

template <class Ahead>
std::optional<Neighbor> nearest(const WorldState& w, const AgentState& me, int lane, Ahead ahead) {
  std::optional<Neighbor> best;
  for (const auto& o : w.agents) {
    if (o.id == me.id || o.exited || !o.occupies(lane) || !ahead(o)) continue;
    const double gap = o.s >= me.s ? o.rear() - me.front() : me.rear() - o.front();
    if (!best || gap < best->gap) best = Neighbor{&o, gap};
  }
  return best;
}

}  // namespace

std::optional<Neighbor> front_on_lane(const WorldState& w, const AgentState& me, int lane) {
  return nearest(w, me, lane, [&](const AgentState& o) { return o.s >= me.s; });
}

std::optional<Neighbor> rear_on_lane(const WorldState& w, const AgentState& me, int lane) {
  return nearest(w, me, lane, [&](const AgentState& o) { return o.s < me.s; });
}

std::optional<Neighbor> front_vehicle(const WorldState& w, const AgentState& me) {
  auto best = front_on_lane(w, me, me.lane);
  if (me.target_lane) {
    auto other = front_on_lane(w, me, *me.target_lane);
    if (other && (!best || other->gap < best->gap)) best = other;
  }
  return best;
}

void drop_exited(WorldState& w) {
  std::erase_if(w.agents, [](const AgentState& a) { return a.exited; });
}

WorldState step_world(const WorldState& w, std::span<const Command> commands) {
  if (commands.size() != w.agents.size()) throw std::invalid_argument("one command per agent expected");
  WorldState n;
  n.map = w.map;
  n.goal = w.goal;
  n.ego_id = w.ego_id;
  n.dt = w.dt;
  n.lane_change_duration = w.lane_change_duration;
  n.time = w.time + w.dt;
  n.agents.reserve(w.agents.size());
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    const AgentState& a = w.agents[i];
    if (a.exited) continue;
    AgentState next = step_agent(a, commands[i], w.dt, w.map, w.lane_change_duration);
    if (next.id != w.ego_id && next.rear() > w.map.length) next.exited = true;
    n.agents.push_back(next);
  }
  return n;
}

}  // namespace mergeplan::world
