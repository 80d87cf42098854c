#include "mergeplan/bench/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <set>

#include "mergeplan/util/keyvalue.hpp"
#include "mergeplan/world/labels.hpp"

namespace mergeplan::bench {

using util::DocumentError;
using util::format_double;

std::size_t Scenario::max_steps() const { return static_cast<std::size_t>(std::llround(time_limit / dt)); }

world::WorldState Scenario::initial_world() const {
  world::WorldState w;
  w.map = map;
  w.goal = goal;
  w.ego_id = ego_id;
  w.dt = dt;
  for (const auto& a : agents) {
    w.agents.push_back(world::make_agent(a.id, a.lane, a.s, a.v, map, a.length, a.width, a.behavior));
  }
  return w;
}

namespace {

int lane_field(const util::Section& s, std::string_view key) {
  const util::Entry& e = s.require(key);
  const long lane = util::parse_int(e);
  if (lane != world::kContinuingLane && lane != world::kEndingLane) {
    throw DocumentError(e.key, e.line, "lane must be 0 (continuing) or 1 (ending), got " + e.value);
  }
  return static_cast<int>(lane);
}

double positive_field(const util::Section& s, std::string_view key, double fallback) {
  const util::Entry* e = s.find(key);
  if (e == nullptr) return fallback;
  const double v = util::parse_double(*e);
  if (!(v > 0.0) || !std::isfinite(v)) throw DocumentError(e->key, e->line, "must be a positive number");
  return v;
}

std::uint64_t unsigned_field(const util::Entry& e) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), out);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    throw DocumentError(e.key, e.line, "expected an unsigned integer");
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const auto doc = util::Document::parse(text);
  Scenario sc;
  const util::Section& head = doc.require("scenario");
  head.reject_unknown({"name", "ego", "time_limit", "dt", "seed", "unsafe_start"});
  sc.name = head.opt_string("name").value_or(sc.name);
  sc.ego_id = static_cast<int>(head.get_int("ego"));
  sc.time_limit = positive_field(head, "time_limit", sc.time_limit);
  sc.dt = positive_field(head, "dt", sc.dt);
  if (const util::Entry* e = head.find("seed")) sc.seed = unsigned_field(*e);
  sc.unsafe_start = head.opt_bool("unsafe_start").value_or(false);

  for (const auto& s : doc.sections()) {
    if (s.name() == "scenario" && &s != &head) throw DocumentError("scenario", s.line(), "repeated [scenario] section");
    if (s.name() == "map") {
      s.reject_unknown({"lane_width", "merge_point", "length"});
      sc.map.lane_width = positive_field(s, "lane_width", sc.map.lane_width);
      sc.map.s_merge = positive_field(s, "merge_point", sc.map.s_merge);
      sc.map.length = positive_field(s, "length", sc.map.length);
    } else if (s.name() == "goal") {
      s.reject_unknown({"start", "end", "lane"});
      sc.goal.s_min = s.opt_double("start").value_or(sc.goal.s_min);
      sc.goal.s_max = s.opt_double("end").value_or(sc.goal.s_max);
      if (s.find("lane")) sc.goal.lane = lane_field(s, "lane");
    } else if (s.name() == "agent") {
      s.reject_unknown({"id", "lane", "s", "v", "length", "width", "behavior"});
      ScenarioAgent a;
      a.id = static_cast<int>(s.get_int("id"));
      a.lane = lane_field(s, "lane");
      a.s = s.get_double("s");
      const util::Entry& v = s.require("v");
      a.v = util::parse_double(v);
      if (!(a.v >= 0.0) || !std::isfinite(a.v)) throw DocumentError("v", v.line, "speed must be finite and >= 0");
      a.length = positive_field(s, "length", a.length);
      a.width = positive_field(s, "width", a.width);
      if (const util::Entry* b = s.find("behavior")) {
        const auto parsed = world::parse_behavior(b->value);
        if (!parsed) throw DocumentError("behavior", b->line, "unknown behavior '" + b->value + "'");
        a.behavior = *parsed;
      }
      sc.agents.push_back(a);
    } else if (s.name() != "scenario") {
      throw DocumentError(s.name(), s.line(), "unknown section");
    }
  }

  // Line-level checks that need the whole document.
  std::set<int> ids;
  for (const auto* s : doc.all("agent")) {
    const util::Entry& id = s->require("id");
    if (!ids.insert(static_cast<int>(util::parse_int(id))).second) {
      throw DocumentError("id", id.line, "duplicate agent id " + id.value);
    }
    const util::Entry& pos = s->require("s");
    const double sv = util::parse_double(pos);
    if (!std::isfinite(sv) || sv < 0.0 || sv > sc.map.length) {
      throw DocumentError("s", pos.line, "position outside the corridor");
    }
    if (util::parse_int(s->require("lane")) == world::kEndingLane && sv >= sc.map.s_merge) {
      throw DocumentError("s", pos.line, "agent on the ending lane beyond the merge point");
    }
  }
  if (!ids.count(sc.ego_id)) throw DocumentError("ego", head.require("ego").line, "no agent with the ego id");
  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(util::read_file(path)); }

void validate_scenario(const Scenario& sc) {
  try {
    sc.map.validate();
  } catch (const std::invalid_argument& e) {
    throw DocumentError("map", 0, e.what());
  }
  if (!(sc.goal.s_min < sc.goal.s_max)) throw DocumentError("goal", 0, "goal start must be below goal end");
  if (!sc.map.drivable(sc.goal.lane, sc.goal.s_max)) throw DocumentError("goal", 0, "goal region is not drivable");
  if (sc.max_steps() == 0) throw DocumentError("time_limit", 0, "time limit shorter than one step");
  const world::WorldState w = sc.initial_world();
  const auto* ego = w.find(sc.ego_id);
  if (ego == nullptr) throw DocumentError("ego", 0, "no agent with the ego id");
  if (sc.unsafe_start) return;
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    for (std::size_t j = i + 1; j < w.agents.size(); ++j) {
      if (world::check_collision(w.agents[i], w.agents[j])) {
        throw DocumentError("agent", 0,
                            "agents " + std::to_string(w.agents[i].id) + " and " + std::to_string(w.agents[j].id) +
                                " overlap initially; set unsafe_start = true to allow it");
      }
    }
  }
}

std::string print_scenario(const Scenario& sc) {
  std::string out = "[scenario]\n";
  out += "name = " + sc.name + "\n";
  out += "ego = " + std::to_string(sc.ego_id) + "\n";
  out += "time_limit = " + format_double(sc.time_limit) + "\n";
  out += "dt = " + format_double(sc.dt) + "\n";
  out += "seed = " + std::to_string(sc.seed) + "\n";
  out += std::string("unsafe_start = ") + (sc.unsafe_start ? "true" : "false") + "\n";
  out += "\n[map]\n";
  out += "lane_width = " + format_double(sc.map.lane_width) + "\n";
  out += "merge_point = " + format_double(sc.map.s_merge) + "\n";
  out += "length = " + format_double(sc.map.length) + "\n";
  out += "\n[goal]\n";
  out += "start = " + format_double(sc.goal.s_min) + "\n";
  out += "end = " + format_double(sc.goal.s_max) + "\n";
  out += "lane = " + std::to_string(sc.goal.lane) + "\n";
  for (const auto& a : sc.agents) {
    out += "\n[agent]\n";
    out += "id = " + std::to_string(a.id) + "\n";
    out += "lane = " + std::to_string(a.lane) + "\n";
    out += "s = " + format_double(a.s) + "\n";
    out += "v = " + format_double(a.v) + "\n";
    out += "length = " + format_double(a.length) + "\n";
    out += "width = " + format_double(a.width) + "\n";
    out += "behavior = " + std::string(world::to_string(a.behavior)) + "\n";
  }
  return out;
}

namespace {

double round_to(double x, double step) { return std::round(x / step) * step; }

bool fits(const std::vector<ScenarioAgent>& placed, int lane, double s, double min_gap) {
  return std::none_of(placed.begin(), placed.end(), [&](const ScenarioAgent& o) {
    return o.lane == lane && std::abs(o.s - s) < o.length + min_gap;
  });
}

}  // namespace

std::vector<Scenario> generate_suite(std::uint64_t seed, const SuiteParams& p) {
  if (p.min_agents < 2 || p.max_agents < p.min_agents) throw std::invalid_argument("bad agent count range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> agent_count(p.min_agents, p.max_agents);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Scenario> suite;
  for (std::size_t k = 0; k < p.count; ++k) {
    Scenario sc;
    sc.name = "merge_" + std::string(k < 10 ? "0" : "") + std::to_string(k);
    sc.seed = rng() % 1000000;
    const std::size_t n = agent_count(rng);
    ScenarioAgent ego;
    ego.id = 0;
    ego.s = round_to(20.0 + 20.0 * unit(rng), 0.1);
    ego.v = p.ego_velocity;
    sc.agents.push_back(ego);
    int next_id = 1;
    while (sc.agents.size() < n) {
      // The first other agent always merges; later ones pick a lane at random.
      const bool merger = sc.agents.size() == 1 || unit(rng) < 0.6;
      ScenarioAgent a;
      a.id = next_id;
      a.v = p.other_velocity;
      if (merger) {
        a.lane = world::kEndingLane;
        a.s = round_to(ego.s + 15.0 + 70.0 * unit(rng), 0.1);
      } else {
        a.lane = world::kContinuingLane;
        const bool ahead = unit(rng) < 0.6;
        a.s = round_to(ahead ? ego.s + 30.0 + 70.0 * unit(rng) : ego.s - 15.0 - 10.0 * unit(rng), 0.1);
      }
      if (a.s < 0.0 || a.s >= sc.map.s_merge - 20.0 || !fits(sc.agents, a.lane, a.s, 10.0)) continue;
      sc.agents.push_back(a);
      ++next_id;
    }
    validate_scenario(sc);
    suite.push_back(std::move(sc));
  }
  return suite;
}

}  // namespace mergeplan::bench
