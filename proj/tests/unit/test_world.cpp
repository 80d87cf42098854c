#include <doctest.h>

#include <cmath>
#include <random>

#include "mergeplan/world/labels.hpp"
#include "oracle/geometry_oracle.hpp"

using namespace mergeplan::world;
using mergeplan::ltlf::LabelSet;

namespace {

const MergingMap kMap{3.5, 180.0, 300.0};

WorldState two_agents(AgentState ego, AgentState other) {
  WorldState w;
  w.map = kMap;
  w.ego_id = ego.id;
  w.agents = {ego, other};
  return w;
}

}  // namespace

TEST_CASE("constant velocity on a straight lane") {
  const AgentState a = make_agent(0, 0, 10.0, 10.0, kMap);
  const AgentState n = step_agent(a, {0.0, std::nullopt}, 0.5, kMap);
  CHECK(n.s == doctest::Approx(15.0).epsilon(1e-15));
  CHECK(n.v == 10.0);
  CHECK(n.heading_rate == 0.0);
}

TEST_CASE("hard braking stops without reversing") {
  AgentState a = make_agent(0, 0, 0.0, 10.0, kMap);
  double t = 0.0;
  double stop_time = -1.0;
  for (int k = 0; k < 4; ++k) {
    a = step_agent(a, {-8.0, std::nullopt}, 0.5, kMap);
    t += 0.5;
    if (a.v == 0.0 && stop_time < 0) stop_time = t;
    CHECK(a.v >= 0.0);
  }
  // v hits 0 at 1.25 s, inside the step ending at 1.5 s; distance v^2 / (2 * 8).
  CHECK(stop_time == 1.5);
  CHECK(a.s == doctest::Approx(100.0 / 16.0));
}

TEST_CASE("lane-change blend is monotone and mirror-symmetric") {
  AgentState left = make_agent(0, 0, 0.0, 10.0, kMap);
  AgentState right = make_agent(1, 1, 0.0, 10.0, kMap);
  double prev = 0.0;
  double max_left = 0.0;
  double max_right = 0.0;
  for (int k = 0; k < 4; ++k) {
    left = step_agent(left, {0.0, 1}, 0.5, kMap);
    right = step_agent(right, {0.0, 0}, 0.5, kMap);
    const double offset = left.y - kMap.lane_y(0);
    CHECK(offset >= prev);
    CHECK(offset <= kMap.lane_width);
    prev = offset;
    CHECK(left.y - 0.0 == doctest::Approx(kMap.lane_width - right.y));
    max_left = std::max(max_left, std::abs(left.heading_rate) * left.v * left.v);
    max_right = std::max(max_right, std::abs(right.heading_rate) * right.v * right.v);
  }
  CHECK(left.lane == 1);
  CHECK_FALSE(left.changing_lane());
  CHECK(right.lane == 0);
  CHECK(std::isfinite(max_left));
  CHECK(max_left > 0.0);
  CHECK(max_left == doctest::Approx(max_right).epsilon(1e-12));
}

TEST_CASE("lane change into the ended lane is rejected") {
  const AgentState a = make_agent(0, 0, 185.0, 10.0, kMap);
  CHECK_THROWS_AS(step_agent(a, {0.0, 1}, 0.5, kMap), InvalidCommand);
  const AgentState b = make_agent(0, 0, 100.0, 10.0, kMap);
  CHECK_NOTHROW(step_agent(b, {0.0, 1}, 0.5, kMap));
  CHECK_THROWS_AS(step_agent(b, {0.0, 2}, 0.5, kMap), InvalidCommand);
}

TEST_CASE("ending lane stops agents at the merge point") {
  AgentState a = make_agent(0, 1, 170.0, 10.0, kMap);
  int blocked_steps = 0;
  for (int k = 0; k < 5; ++k) {
    a = step_agent(a, {0.0, std::nullopt}, 0.5, kMap);
    CHECK(a.front() <= kMap.s_merge);
    blocked_steps += a.blocked;
  }
  CHECK(a.v == 0.0);
  CHECK(blocked_steps == 1);
}

TEST_CASE("kinematic consistency over random commands") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> acc(-8.0, 2.0);
  std::uniform_real_distribution<double> vel(0.0, 20.0);
  for (int n = 0; n < 1000; ++n) {
    AgentState a = make_agent(0, 0, 0.0, vel(rng), kMap);
    const double a0 = acc(rng);
    const AgentState b = step_agent(a, {a0, std::nullopt}, 0.5, kMap);
    CHECK(b.v >= 0.0);
    CHECK(b.s >= a.s);
    const AgentState c = step_agent(a, {0.0, std::nullopt}, 0.5, kMap);
    CHECK(c.s - a.s == doctest::Approx(a.v * 0.5));
  }
}

TEST_CASE("safe-distance threshold") {
  CHECK(safe_distance_threshold(0.0) == 2.0);
  CHECK(safe_distance_threshold(10.0) == 10.0);
  CHECK(safe_distance_threshold(14.0) == 14.0);
}

TEST_CASE("sd_front flips exactly at the threshold gap") {
  const AgentState ego = make_agent(0, 0, 50.0, 10.0, kMap);
  for (double gap : {9.999, 10.0, 10.001}) {
    const AgentState lead = make_agent(1, 0, 50.0 + 4.5 + gap, 10.0, kMap);
    const LabelSet l = label_world(two_agents(ego, lead), 0, 1, false);
    CHECK(l.contains("sd_front") == (gap >= 10.0));
  }
}

TEST_CASE("label examples") {
  SUBCASE("unmerged vehicle in direct front") {
    const auto w = two_agents(make_agent(0, 0, 50.0, 10.0, kMap), make_agent(3, 1, 60.0, 10.0, kMap));
    const LabelSet l = label_world(w, 0, 3, false);
    CHECK(l == LabelSet{"idf#3", "alive", "sd_front"});
  }
  SUBCASE("merged vehicle behind the ego") {
    const auto w = two_agents(make_agent(0, 0, 70.0, 10.0, kMap), make_agent(3, 0, 60.0, 10.0, kMap));
    const LabelSet l = label_world(w, 0, 3, false);
    CHECK(l == LabelSet{"m#3", "ahead#3", "alive", "sd_front"});
  }
  SUBCASE("final step drops alive") {
    const auto w = two_agents(make_agent(0, 0, 70.0, 10.0, kMap), make_agent(3, 0, 60.0, 10.0, kMap));
    CHECK_FALSE(label_world(w, 0, 3, true).alive());
  }
  SUBCASE("goal and collision") {
    WorldState w = two_agents(make_agent(0, 0, 260.0, 10.0, kMap), make_agent(3, 0, 262.0, 10.0, kMap));
    const LabelSet l = label_world(w, 0, std::nullopt, false);
    CHECK(l.contains("at_goal"));
    CHECK(l.contains("collide"));
    CHECK_FALSE(l.contains("sd_front"));
  }
}

TEST_CASE("idf is unique and label_world is pure") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(0.0, 170.0);
  for (int n = 0; n < 300; ++n) {
    WorldState w;
    w.map = kMap;
    w.agents.push_back(make_agent(0, 0, pos(rng), 10.0, kMap));
    for (int i = 1; i <= 5; ++i) w.agents.push_back(make_agent(i, static_cast<int>(rng() % 2), pos(rng), 10.0, kMap));
    const FrameLabels f = compute_labels(w, 0);
    int idf = 0;
    for (const auto& o : f.others) idf += o.idf;
    CHECK(idf <= 1);
    for (int i = 1; i <= 5; ++i) CHECK(label_world(w, 0, i, false) == label_world(w, 0, i, false));
  }
}

TEST_CASE("collision basics") {
  const AgentState a = make_agent(0, 0, 10.0, 0.0, kMap);
  CHECK(check_collision(a, a));
  const AgentState b = make_agent(1, 0, 10.0 + 4.5 + 0.01, 0.0, kMap);
  CHECK_FALSE(check_collision(a, b));
  const AgentState c = make_agent(2, 1, 10.0, 0.0, kMap);
  CHECK_FALSE(check_collision(a, c));
}

TEST_CASE("separating-axis test agrees with point sampling on rotated near misses") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> off(-5.0, 5.0);
  std::uniform_real_distribution<double> dim(1.0, 5.0);
  int decided = 0;
  int overlaps = 0;
  for (int n = 0; n < 1000; ++n) {
    AgentState a = make_agent(0, 0, 0.0, 0.0, kMap, dim(rng), dim(rng) * 0.5);
    AgentState b = make_agent(1, 0, off(rng), 0.0, kMap, dim(rng), dim(rng) * 0.5);
    b.y = off(rng) * 0.6;
    a.heading = ang(rng);
    b.heading = ang(rng);
    CHECK(check_collision(a, b) == check_collision(b, a));

    // Skip pairs whose answer changes under a 2 cm margin: too close to call by sampling.
    auto resized = [](AgentState s, double d) {
      s.length += d;
      s.width += d;
      return s;
    };
    const bool loose = oracle::sampled_overlap(resized(a, 0.02), resized(b, 0.02), 60);
    const bool strict = oracle::sampled_overlap(resized(a, -0.02), resized(b, -0.02), 60);
    if (loose != strict) continue;
    ++decided;
    overlaps += strict;
    REQUIRE(check_collision(a, b) == strict);
  }
  CHECK(decided > 950);
  CHECK(overlaps > 100);
  CHECK(overlaps < decided - 100);
}

TEST_CASE("stepping drops exited agents one step after flagging them") {
  WorldState w = two_agents(make_agent(0, 0, 10.0, 10.0, kMap), make_agent(1, 0, 300.0, 10.0, kMap));
  const std::vector<Command> cmds(2);
  WorldState n = step_world(w, cmds);
  REQUIRE(n.agents.size() == 2);
  CHECK(n.agent(1).exited);
  CHECK(n.time == 0.5);
  WorldState m = step_world(n, cmds);
  CHECK(m.agents.size() == 1);
  CHECK(m.find(1) == nullptr);
}
