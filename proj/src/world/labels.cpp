#include "mergeplan/world/labels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mergeplan::world {

double safe_distance_threshold(double v, const SafeDistanceParams& p) { return std::max(p.minimum, v * p.headway); }

std::array<Pose2, 4> corners(const AgentState& a) {
  const double c = std::cos(a.heading);
  const double s = std::sin(a.heading);
  const double hl = 0.5 * a.length;
  const double hw = 0.5 * a.width;
  auto at = [&](double lx, double ly) { return Pose2{a.s + c * lx - s * ly, a.y + s * lx + c * ly}; };
  return {at(hl, -hw), at(hl, hw), at(-hl, hw), at(-hl, -hw)};
}

namespace {

bool separated_along(const std::array<Pose2, 4>& p, const std::array<Pose2, 4>& q, double ax, double ay) {
  double pmin = INFINITY, pmax = -INFINITY, qmin = INFINITY, qmax = -INFINITY;
  for (const auto& c : p) {
    const double d = c.x * ax + c.y * ay;
    pmin = std::min(pmin, d);
    pmax = std::max(pmax, d);
  }
  for (const auto& c : q) {
    const double d = c.x * ax + c.y * ay;
    qmin = std::min(qmin, d);
    qmax = std::max(qmax, d);
  }
  return pmax < qmin || qmax < pmin;
}

}  // namespace

bool check_collision(const AgentState& a, const AgentState& b) {
  const auto pa = corners(a);
  const auto pb = corners(b);
  for (double h : {a.heading, b.heading}) {
    const double c = std::cos(h);
    const double s = std::sin(h);
    if (separated_along(pa, pb, c, s) || separated_along(pa, pb, -s, c)) return false;
  }
  return true;
}

LabelKind label_kind(std::string_view base) {
  if (base == "sd_front") return LabelKind::kSdFront;
  if (base == "collide") return LabelKind::kCollide;
  if (base == "at_goal") return LabelKind::kAtGoal;
  if (base == "idf") return LabelKind::kIdf;
  if (base == "m") return LabelKind::kMerged;
  if (base == "ahead") return LabelKind::kAhead;
  if (base == ltlf::kAlive) return LabelKind::kAlive;
  return LabelKind::kUnknown;
}

const OtherLabels* FrameLabels::other(int id) const {
  for (const auto& o : others) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

FrameLabels compute_labels(const WorldState& w, int ego_id, const SafeDistanceParams& sd) {
  const AgentState& ego = w.agent(ego_id);
  FrameLabels f;

  if (auto front = front_vehicle(w, ego)) f.sd_front = front->gap >= safe_distance_threshold(ego.v, sd);

  f.collide = ego.blocked;
  const AgentState* idf = nullptr;
  for (const auto& o : w.agents) {
    if (o.id == ego.id) continue;
    f.collide = f.collide || check_collision(ego, o);
    if (o.lane == kEndingLane && o.s > ego.s && (idf == nullptr || o.s < idf->s)) idf = &o;
  }
  for (const auto& o : w.agents) {
    if (o.id == ego.id) continue;
    f.others.push_back({o.id, &o == idf, o.lane == kContinuingLane && !o.changing_lane(), ego.s > o.s});
  }

  f.at_goal = ego.lane == w.goal.lane && !ego.changing_lane() && ego.s >= w.goal.s_min && ego.s <= w.goal.s_max;
  return f;
}

ltlf::LabelSet to_label_set(const FrameLabels& f, std::optional<int> other, bool alive) {
  ltlf::LabelSet l;
  if (f.sd_front) l.insert("sd_front");
  if (f.collide) l.insert("collide");
  if (f.at_goal) l.insert("at_goal");
  if (alive) l.insert(std::string(ltlf::kAlive));
  if (other) {
    if (const OtherLabels* o = f.other(*other)) {
      const std::string suffix = "#" + std::to_string(*other);
      if (o->idf) l.insert("idf" + suffix);
      if (o->merged) l.insert("m" + suffix);
      if (o->ahead) l.insert("ahead" + suffix);
    }
  }
  return l;
}

ltlf::LabelSet label_world(const WorldState& w, int ego, std::optional<int> other, bool is_final_step,
                           const SafeDistanceParams& sd) {
  return to_label_set(compute_labels(w, ego, sd), other, !is_final_step);
}

}  // namespace mergeplan::world
