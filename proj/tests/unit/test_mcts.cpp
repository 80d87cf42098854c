#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mergeplan/bench/scenario.hpp"
#include "mergeplan/ltlf/parser.hpp"
#include "mergeplan/ltlf/rule_file.hpp"
#include "mergeplan/mcts/merge_env.hpp"
#include "oracle/ltlf_oracle.hpp"
#include "oracle/mcts_oracle.hpp"
#include "oracle/toy_tree.hpp"

using namespace mergeplan;
using mcts::RewardVector;
using oracle::TreeEnv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two actions, one step: action 0 brakes (small base cost), action 1 hits
// the stopped leader.
struct BrakeOrCrash {
  struct State {
    bool done = false;
  };
  std::size_t action_count() const { return 2; }
  std::size_t reward_dims() const { return 2; }
  bool terminal(const State& s) const { return s.done; }
  mcts::Step<State> step(const State&, std::size_t a) const {
    return {{true}, a == 0 ? RewardVector{0.0, -0.4} : RewardVector{-1.0, 0.0}, true};
  }
  std::size_t rollout_action(const State&, mcts::Rng&) const { return 0; }
};

// A chain with constant reward c for `length` steps.
struct ChainEnv {
  struct State {
    std::size_t t = 0;
  };
  double c = -0.3;
  std::size_t length = 7;
  std::size_t action_count() const { return 1; }
  std::size_t reward_dims() const { return 1; }
  bool terminal(const State& s) const { return s.t >= length; }
  mcts::Step<State> step(const State& s, std::size_t) const { return {{s.t + 1}, RewardVector{c}, s.t + 1 >= length}; }
  std::size_t rollout_action(const State&, mcts::Rng&) const { return 0; }
};

RewardVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-2, 2);
  RewardVector r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = d(rng) * 0.5;
  return r;
}

std::vector<std::shared_ptr<const ltlf::RuleTemplate>> shipped_rules() {
  return {ltlf::compile_rule(ltlf::zipper_rule()), ltlf::compile_rule(ltlf::safe_distance_rule())};
}

struct MergeSetup {
  mcts::PlannerConfig config;
  std::vector<std::shared_ptr<const ltlf::RuleTemplate>> rules = shipped_rules();
  mcts::RewardLayout layout;
  std::shared_ptr<const mcts::MonitorBank> bank;
  std::unique_ptr<mcts::MergeEnvironment> env;

  MergeSetup(mcts::Variant v, const world::WorldState& w, bool all_rules = false) {
    config.variant = v;
    layout = mcts::reward_layout(v, rules);
    bank = std::make_shared<const mcts::MonitorBank>(mcts::make_monitor_bank(rules, layout, w, all_rules));
    env = std::make_unique<mcts::MergeEnvironment>(config, behavior::BehaviorParams{}, layout, bank);
  }
};

world::WorldState lone_ego(double v) {
  world::WorldState w;
  w.agents = {world::make_agent(0, world::kContinuingLane, 50.0, v, w.map)};
  return w;
}

}  // namespace

TEST_CASE("TLO equals lexicographic order at tau = +inf") {
  std::mt19937_64 rng(11);
  const RewardVector tau{kInf, kInf, kInf};
  for (int k = 0; k < 10000; ++k) {
    const RewardVector a = random_vector(rng, 3), b = random_vector(rng, 3);
    const bool lex_le = !std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    REQUIRE(mcts::tlo_leq(a, b, tau) == lex_le);
  }
}

TEST_CASE("TLO worked example") {
  const RewardVector r{-1.0, 0.0}, rp{-0.4, -5.0}, tau{-0.5, -kInf};
  CHECK(mcts::tlo_leq(r, rp, tau));
  CHECK(mcts::tlo_leq_quoted(r, rp, tau));
  CHECK_FALSE(mcts::tlo_leq(rp, r, tau));
  CHECK(mcts::tlo_compare(r, rp, tau) == mcts::Ordering::kLess);
}

TEST_CASE("TLO lets the lower level decide above the threshold") {
  const RewardVector tau{-0.5, -kInf};
  CHECK(mcts::tlo_better(RewardVector{-0.2, -1.0}, RewardVector{0.0, -3.0}, tau));
  CHECK(mcts::tlo_better(RewardVector{0.0, -3.0}, RewardVector{-0.6, 0.0}, tau));
}

TEST_CASE("TLO is a total preorder implying the quoted predicate") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> td(-2, 1);
  for (int k = 0; k < 3000; ++k) {
    RewardVector tau(3);
    for (std::size_t i = 0; i < 3; ++i) tau[i] = td(rng) == 1 ? kInf : td(rng) * 0.5 + 0.25;
    const RewardVector a = random_vector(rng, 3), b = random_vector(rng, 3), c = random_vector(rng, 3);
    REQUIRE((mcts::tlo_leq(a, b, tau) || mcts::tlo_leq(b, a, tau)));
    REQUIRE(mcts::tlo_leq(a, a, tau));
    if (mcts::tlo_leq(a, b, tau) && mcts::tlo_leq(b, c, tau)) REQUIRE(mcts::tlo_leq(a, c, tau));
    if (mcts::tlo_leq(a, b, tau)) REQUIRE(mcts::tlo_leq_quoted(a, b, tau));
  }
}

TEST_CASE("TLO rejects mismatched dimensions") {
  CHECK_THROWS_AS(mcts::tlo_leq(RewardVector{1.0}, RewardVector{1.0, 2.0}, RewardVector{kInf}), mcts::DimensionMismatch);
}

TEST_CASE("scalar planner matches the scalar UCT reference") {
  for (std::uint64_t problem = 0; problem < 20; ++problem) {
    TreeEnv env;
    env.salt = problem * 977;
    env.actions = 2 + problem % 3;
    const mcts::TloParams params{RewardVector{-kInf}, 1.0, 0.95};
    for (std::size_t budget : {1, 7, 60, 300}) {
      mcts::Mcts<TreeEnv> planner(env, params, problem + 100);
      oracle::ScalarUct<TreeEnv> reference(env, 1.0, 0.95, problem + 100);
      const std::size_t a = planner.plan({}, budget);
      const std::size_t b = reference.plan({}, budget);
      CAPTURE(problem);
      CAPTURE(budget);
      REQUIRE(a == b);
      REQUIRE(planner.nodes().size() == reference.nodes().size());
      const auto& root = planner.root();
      for (std::size_t k = 0; k < env.actions; ++k) {
        REQUIRE(root.edges[k].visits == reference.nodes()[0].n[k]);
        if (root.edges[k].visits > 0) REQUIRE(root.edges[k].q[0] == reference.nodes()[0].q[k]);
      }
    }
  }
}

TEST_CASE("visit counts and tree size") {
  TreeEnv env;
  env.dims = 2;
  mcts::Mcts<TreeEnv> planner(env, {RewardVector{-0.5, -kInf}, 1.0, 0.9}, 3);
  planner.plan({}, 500);
  CHECK(planner.nodes().size() <= 501);
  CHECK(planner.root().visits == 501);
  for (const auto& n : planner.nodes()) {
    if (n.terminal) continue;
    std::uint32_t sum = 0;
    for (const auto& e : n.edges) sum += e.visits;
    CHECK(n.visits == sum + 1);
  }
}

TEST_CASE("backup keeps running means of discounted returns") {
  // One action, deterministic chain: every backed-up return is the same.
  ChainEnv env;
  mcts::Mcts<ChainEnv> planner(env, {RewardVector{-kInf}, 1.0, 0.9}, 1);
  planner.plan({}, 1);
  const double expect = env.c * (1 - std::pow(0.9, 7)) / (1 - 0.9);
  CHECK(planner.root().edges[0].q[0] == doctest::Approx(expect).epsilon(1e-12));
  planner.plan({}, 5);
  CHECK(planner.root().edges[0].q[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(planner.root().edges[0].visits == 5);
}

TEST_CASE("brake-or-crash toy picks the safe action for every budget >= 2") {
  BrakeOrCrash env;
  for (std::size_t budget = 2; budget <= 40; ++budget) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      mcts::Mcts<BrakeOrCrash> planner(env, {RewardVector{-0.5, -kInf}, 1.0, 0.95}, seed);
      REQUIRE(planner.plan({}, budget) == 0);
    }
  }
}

TEST_CASE("scaling one dimension and its threshold leaves the search unchanged") {
  for (std::uint64_t problem = 0; problem < 10; ++problem) {
    TreeEnv a;
    a.salt = problem;
    a.dims = 2;
    TreeEnv b = a;
    b.scale0 = 8.0;
    mcts::Mcts<TreeEnv> pa(a, {RewardVector{-0.5, -kInf}, 1.0, 0.95}, problem);
    mcts::Mcts<TreeEnv> pb(b, {RewardVector{-4.0, -kInf}, 1.0, 0.95}, problem);
    REQUIRE(pa.plan({}, 400) == pb.plan({}, 400));
    REQUIRE(pa.nodes().size() == pb.nodes().size());
    for (std::size_t k = 0; k < a.actions; ++k) REQUIRE(pa.root().edges[k].visits == pb.root().edges[k].visits);
  }
}

TEST_CASE("planner is deterministic for a seed") {
  TreeEnv env;
  env.dims = 3;
  const mcts::TloParams p{RewardVector{-0.5, -0.5, -kInf}, 1.0, 0.95};
  mcts::Mcts<TreeEnv> x(env, p, 42), y(env, p, 42);
  for (int round = 0; round < 5; ++round) REQUIRE(x.plan({}, 200) == y.plan({}, 200));
}

TEST_CASE("plan rejects terminal roots and bad thresholds") {
  ChainEnv env;
  mcts::Mcts<ChainEnv> planner(env, {RewardVector{-kInf}, 1.0, 0.9}, 1);
  CHECK_THROWS_AS(planner.plan({env.length}, 10), mcts::SearchError);
  CHECK_THROWS_AS(mcts::Mcts<ChainEnv>(env, {RewardVector{-kInf, -kInf}, 1.0, 0.9}, 1), mcts::DimensionMismatch);
}

TEST_CASE("reward layouts per variant") {
  const auto rules = shipped_rules();
  CHECK(mcts::reward_layout(mcts::Variant::kSA, rules).names() == std::vector<std::string>{"collision+base"});
  CHECK(mcts::reward_layout(mcts::Variant::kSALexZipSD, rules).names() ==
        std::vector<std::string>{"collision", "zipper", "safe_distance", "base"});
  CHECK(mcts::reward_layout(mcts::Variant::kSALexSDZip, rules).names() ==
        std::vector<std::string>{"collision", "safe_distance", "zipper", "base"});
  CHECK(mcts::reward_layout(mcts::Variant::kSALexRules, rules).names() ==
        std::vector<std::string>{"collision", "zipper", "safe_distance", "base"});
  CHECK_THROWS_AS(mcts::reward_layout(mcts::Variant::kSALexZip, {}), mcts::ConfigError);
  for (auto v : mcts::kBenchmarkVariants) CHECK(mcts::parse_variant(mcts::to_string(v)) == v);
}

TEST_CASE("base reward is zero at the reference speed") {
  const world::WorldState w = lone_ego(14.0);
  MergeSetup s(mcts::Variant::kSALex, w);
  const auto z = s.env->initial_state(w, 10);
  const auto st = s.env->step(z, static_cast<std::size_t>(behavior::EgoAction::kKeep));
  CHECK(st.reward == RewardVector{0.0, 0.0});
  CHECK_FALSE(st.terminal);
}

TEST_CASE("stationary ego pays the speed term and the shaping closed form") {
  const world::WorldState w = lone_ego(0.0);
  MergeSetup s(mcts::Variant::kSALex, w);
  const auto z = s.env->initial_state(w, 10);
  const auto ds = s.env->step_detailed(z, static_cast<std::size_t>(behavior::EgoAction::kKeep));
  const double phi = -0.1 * 14.0 * 0.5;
  CHECK(ds.info.potential_before == doctest::Approx(phi));
  CHECK(ds.info.potential_after == doctest::Approx(phi));
  CHECK(ds.step.reward[1] == doctest::Approx(-0.1 * 14.0 * 0.5 + 0.95 * phi - phi));
}

TEST_CASE("safe-distance charge with reset") {
  world::WorldState w;
  w.agents = {world::make_agent(0, world::kContinuingLane, 50.0, 14.0, w.map),
              world::make_agent(1, world::kContinuingLane, 50.0 + 4.5 + 8.0, 14.0, w.map)};
  w.agents[1].behavior = world::Behavior::kStatic;
  mcts::PlannerConfig cfg;
  cfg.variant = mcts::Variant::kSALexSD;
  auto rules = std::vector<std::shared_ptr<const ltlf::RuleTemplate>>{
      ltlf::compile_rule({"safe_distance", "G sd_front", 2.5, 2, false})};
  const auto layout = mcts::reward_layout(cfg.variant, rules);
  auto bank = std::make_shared<const mcts::MonitorBank>(mcts::make_monitor_bank(rules, layout, w, false));
  const mcts::MergeEnvironment env(cfg, {}, layout, bank);
  const auto z = env.initial_state(w, 10);
  const auto st = env.step(z, static_cast<std::size_t>(behavior::EgoAction::kBrake));
  CHECK(st.reward[1] == -2.5);
  CHECK(st.next.monitor_states[0] == bank->slots[0].rule->dfa->initial());
}

TEST_CASE("collision is charged once and ends the episode") {
  world::WorldState w;
  w.agents = {world::make_agent(0, world::kContinuingLane, 50.0, 14.0, w.map),
              world::make_agent(1, world::kContinuingLane, 50.0 + 4.5 + 2.0, 0.0, w.map)};
  w.agents[1].behavior = world::Behavior::kStatic;
  MergeSetup s(mcts::Variant::kSALex, w);
  const auto z = s.env->initial_state(w, 10);
  const auto st = s.env->step(z, static_cast<std::size_t>(behavior::EgoAction::kKeep));
  CHECK(st.terminal);
  CHECK(st.next.collided);
  CHECK(st.reward[0] == -s.config.weights.collision);
  CHECK(s.env->terminal(st.next));
}

TEST_CASE("leaves at the horizon contribute nothing beyond the step reward") {
  const world::WorldState w = lone_ego(10.0);
  MergeSetup s(mcts::Variant::kSALex, w);
  const auto z = s.env->initial_state(w, 1);
  mcts::Mcts<mcts::MergeEnvironment> planner(*s.env, s.env->tlo_params(), 9);
  planner.plan(z, 50);
  for (std::size_t a = 0; a < behavior::kEgoActionCount; ++a) {
    const auto& e = planner.root().edges[a];
    REQUIRE(e.visits > 0);
    CHECK(e.q == s.env->step(z, a).reward);
  }
}

TEST_CASE("planner monitors agree with offline evaluation of the whole trace") {
  const auto suite = bench::generate_suite(7);
  const auto rules = shipped_rules();
  const auto zip_body = ltlf::parse_syntax("(idf#j & !m#j) -> X !ahead#j");
  const auto sd_body = ltlf::parse_syntax("sd_front");
  const std::vector<std::string> zip_props{"ahead#j", "idf#j", "m#j"};
  const oracle::SafetySplitter zip_oracle(zip_body, zip_props);
  const oracle::SafetySplitter sd_oracle(sd_body, {"sd_front"});
  std::mt19937_64 rng(3);
  int charged = 0;
  for (const auto& sc : suite) {
    for (int run = 0; run < 3; ++run) {
      const world::WorldState w0 = sc.initial_world();
      MergeSetup s(mcts::Variant::kSA, w0, true);
      auto z = s.env->initial_state(w0, sc.max_steps());
      std::vector<int> planner_counts(s.bank->rules.size(), 0);
      std::vector<world::WorldState> frames;
      while (!s.env->terminal(z)) {
        const auto ds = s.env->step_detailed(z, mcts::break_tie(behavior::kEgoActionCount, rng));
        for (std::size_t r = 0; r < s.bank->rules.size(); ++r) planner_counts[r] += ds.info.violations[r];
        z = ds.step.next;
        frames.push_back(z.world);
      }
      oracle::Trace sd_trace;
      for (const auto& f : frames) sd_trace.push_back(world::compute_labels(f, f.ego_id).sd_front ? 1U : 0U);
      int zip_count = 0;
      for (const auto& a : w0.agents) {
        if (a.id == w0.ego_id) continue;
        oracle::Trace t;
        for (const auto& f : frames) {
          const auto labels = world::compute_labels(f, f.ego_id);
          const auto* o = labels.other(a.id);
          t.push_back(o == nullptr ? 0U : (o->ahead ? 1U : 0U) | (o->idf ? 2U : 0U) | (o->merged ? 4U : 0U));
          const auto* agent = f.find(a.id);
          if (agent == nullptr || agent->exited) break;
        }
        zip_count += zip_oracle.count(t);
      }
      CAPTURE(sc.name);
      REQUIRE(s.bank->rules[0]->spec.name == "zipper");
      REQUIRE(planner_counts[0] == zip_count);
      REQUIRE(planner_counts[1] == sd_oracle.count(sd_trace));
      charged += zip_count + planner_counts[1];
    }
  }
  CHECK(charged > 0);
}

TEST_CASE("planner config round trip and validation") {
  mcts::PlannerConfig c;
  c.variant = mcts::Variant::kSALexSDZip;
  c.iterations = 321;
  c.seed = 77;
  c.exploration = 0.75;
  c.rollout = mcts::RolloutPolicy::kUniform;
  c.weights.collision = 3.5;
  c.rule_threshold = -0.25;
  const std::string text = mcts::print_planner_config(c);
  CHECK(mcts::print_planner_config(mcts::parse_planner_config(text)) == text);
  CHECK_THROWS(mcts::parse_planner_config("[planner]\nvariant = nope\n"));
  CHECK_THROWS(mcts::parse_planner_config("[planner]\ndiscount = 1.5\n"));
  CHECK_THROWS(mcts::parse_planner_config("[weights]\nspeed = 1\n"));
}
