#include "mergeplan/bench/episode.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>

#include "mergeplan/util/keyvalue.hpp"
#include "mergeplan/world/labels.hpp"

namespace mergeplan::bench {

using mcts::CombinedState;
using mcts::MergeEnvironment;

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kSuccess:
      return "success";
    case Outcome::kCollision:
      return "collision";
    case Outcome::kTimeout:
      return "timeout";
  }
  return "?";
}

int EpisodeResult::violations(std::string_view rule) const {
  for (const auto& r : rules) {
    if (r.rule == rule) return r.violations;
  }
  return 0;
}

std::uint64_t episode_seed(const Scenario& sc, std::uint64_t run_seed) {
  // splitmix64 finalizer over both seeds.
  std::uint64_t z = sc.seed * 0x9E3779B97F4A7C15ULL + run_seed + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct Evaluator {
  std::vector<ltlf::RuleMonitor> monitors;
  std::vector<std::size_t> rule_of;
};

Evaluator make_evaluator(const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules,
                         const world::WorldState& initial) {
  Evaluator ev;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (!rules[r]->slot) {
      ev.monitors.push_back(ltlf::instantiate_rule(rules[r]));
      ev.rule_of.push_back(r);
      continue;
    }
    for (const auto& a : initial.agents) {
      if (a.id == initial.ego_id) continue;
      ev.monitors.push_back(ltlf::instantiate_rule(rules[r], a.id));
      ev.rule_of.push_back(r);
    }
  }
  return ev;
}

// Steps every evaluator monitor on the frame `w`; adds charges to `counts`.
void evaluate_frame(Evaluator& ev, const world::WorldState& w, bool final_step, double time,
                    const world::SafeDistanceParams& sd, std::vector<RuleCount>& counts) {
  const world::FrameLabels f = world::compute_labels(w, w.ego_id, sd);
  for (std::size_t i = 0; i < ev.monitors.size(); ++i) {
    ltlf::RuleMonitor& m = ev.monitors[i];
    if (m.finished()) continue;
    bool alive = !final_step;
    if (m.binding()) {
      const world::AgentState* a = w.find(*m.binding());
      alive = alive && a != nullptr && !a->exited;
    }
    if (m.step(world::to_label_set(f, m.binding(), alive)) != 0.0) {
      RuleCount& c = counts[ev.rule_of[i]];
      ++c.violations;
      if (!c.first_violation_time) c.first_violation_time = time;
    }
  }
}

std::vector<RuleCount> empty_counts(const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules) {
  std::vector<RuleCount> counts;
  for (const auto& r : rules) counts.push_back({r->spec.name, 0, std::nullopt});
  return counts;
}

TraceFrame frame_of(const CombinedState& z, std::optional<behavior::EgoAction> action, bool invalid) {
  return TraceFrame{z.depth, z.world.time, action, invalid, z.world.agents};
}

std::string context(const Scenario& sc, const mcts::PlannerConfig& c, std::size_t step) {
  return "scenario '" + sc.name + "', variant " + std::string(mcts::to_string(c.variant)) + ", budget " +
         std::to_string(c.iterations) + ", seed " + std::to_string(c.seed) + ", step " + std::to_string(step);
}

}  // namespace

EpisodeResult run_episode(const Scenario& sc, const EpisodeConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const mcts::PlannerConfig& pc = config.planner;
  EpisodeResult result;
  result.scenario = sc.name;
  result.variant = pc.variant;
  result.budget = pc.iterations;
  result.seed = pc.seed;

  std::size_t step = 0;
  try {
    const world::WorldState w0 = sc.initial_world();
    const mcts::RewardLayout layout = mcts::reward_layout(pc.variant, config.rules);
    auto bank = std::make_shared<const mcts::MonitorBank>(mcts::make_monitor_bank(config.rules, layout, w0, false));
    const MergeEnvironment env(pc, config.behavior, layout, bank, config.safe_distance);
    const std::size_t max_steps = sc.max_steps();

    CombinedState z = env.initial_state(w0, max_steps);
    Evaluator evaluator = make_evaluator(config.rules, w0);
    result.rules = empty_counts(config.rules);
    std::vector<int> planner_counts(bank->rules.size(), 0);
    result.potential_initial = env.potential(z.world);
    if (config.record_trace) result.trace.push_back(frame_of(z, std::nullopt, false));

    mcts::Mcts<MergeEnvironment> search(env, env.tlo_params(), episode_seed(sc, pc.seed));
    while (!env.terminal(z)) {
      CombinedState root = z;
      root.depth = 0;
      root.horizon = std::min(pc.horizon, z.horizon - z.depth);
      const std::size_t action = search.plan(root, pc.iterations);

      mcts::DetailedStep ds = env.step_detailed(z, action);
      ++step;
      result.invalid_actions += ds.info.invalid_action;
      result.shaping_sum += ds.info.shaping;
      for (std::size_t r = 0; r < bank->rules.size(); ++r) planner_counts[r] += ds.info.violations[r];
      z = std::move(ds.step.next);
      evaluate_frame(evaluator, z.world, env.terminal(z), z.world.time, config.safe_distance, result.rules);
      if (config.record_trace) result.trace.push_back(frame_of(z, behavior::kEgoActions[action], ds.info.invalid_action));
    }

    result.steps = step;
    result.potential_final = env.potential(z.world);
    result.outcome = z.collided ? Outcome::kCollision : z.reached_goal ? Outcome::kSuccess : Outcome::kTimeout;
    for (const auto& rule : config.rules) {
      std::optional<int> count;
      for (std::size_t r = 0; r < bank->rules.size(); ++r) {
        if (bank->rules[r]->spec.name == rule->spec.name) count = planner_counts[r];
      }
      result.planner_violations.push_back(count);
    }
  } catch (const std::exception& e) {
    throw EpisodeError(context(sc, pc, step) + ": " + e.what());
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<RuleCount> evaluate_trace(const std::vector<TraceFrame>& trace, const world::WorldState& initial,
                                      const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules,
                                      const world::SafeDistanceParams& sd) {
  std::vector<RuleCount> counts = empty_counts(rules);
  if (trace.empty()) return counts;
  world::WorldState w = initial;
  w.agents = trace.front().agents;
  Evaluator ev = make_evaluator(rules, w);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    w.agents = trace[k].agents;
    w.time = trace[k].time;
    evaluate_frame(ev, w, k + 1 == trace.size(), trace[k].time, sd, counts);
  }
  return counts;
}

std::string format_trace(const EpisodeResult& r) {
  using util::format_double;
  std::string out = "# scenario " + r.scenario + " variant " + std::string(mcts::to_string(r.variant)) + " budget " +
                    std::to_string(r.budget) + " seed " + std::to_string(r.seed) + "\n";
  out += "# outcome " + std::string(to_string(r.outcome)) + " steps " + std::to_string(r.steps) + "\n";
  for (std::size_t i = 0; i < r.rules.size(); ++i) {
    out += "# rule " + r.rules[i].rule + " violations " + std::to_string(r.rules[i].violations);
    if (r.rules[i].first_violation_time) out += " first " + format_double(*r.rules[i].first_violation_time);
    if (i < r.planner_violations.size() && r.planner_violations[i]) {
      out += " planner " + std::to_string(*r.planner_violations[i]);
    }
    out += "\n";
  }
  out += "step,time,action,invalid,agent,lane,target,progress,s,y,v,a,heading,heading_rate,exited,blocked\n";
  for (const auto& f : r.trace) {
    const std::string head = std::to_string(f.step) + "," + format_double(f.time) + "," +
                             (f.action ? std::string(behavior::to_string(*f.action)) : std::string("-")) + "," +
                             (f.invalid_action ? "1" : "0") + ",";
    for (const auto& a : f.agents) {
      out += head + std::to_string(a.id) + "," + std::to_string(a.lane) + "," +
             (a.target_lane ? std::to_string(*a.target_lane) : std::string("-")) + "," + format_double(a.progress) +
             "," + format_double(a.s) + "," + format_double(a.y) + "," + format_double(a.v) + "," +
             format_double(a.a) + "," + format_double(a.heading) + "," + format_double(a.heading_rate) + "," +
             (a.exited ? "1" : "0") + "," + (a.blocked ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::vector<BenchJob> make_jobs(std::size_t scenarios, const std::vector<mcts::Variant>& variants,
                                const std::vector<std::size_t>& budgets, const std::vector<std::uint64_t>& seeds) {
  std::vector<BenchJob> jobs;
  for (mcts::Variant v : variants) {
    for (std::size_t b : budgets) {
      for (std::size_t s = 0; s < scenarios; ++s) {
        for (std::uint64_t seed : seeds) jobs.push_back({s, v, b, seed});
      }
    }
  }
  return jobs;
}

namespace {

EpisodeResult run_job(const std::vector<Scenario>& scenarios, const BenchJob& job, const EpisodeConfig& base) {
  EpisodeConfig c = base;
  c.planner.variant = job.variant;
  c.planner.iterations = job.budget;
  c.planner.seed = job.seed;
  try {
    return run_episode(scenarios.at(job.scenario), c);
  } catch (const std::exception& e) {
    EpisodeResult failed;
    failed.scenario = job.scenario < scenarios.size() ? scenarios[job.scenario].name : "?";
    failed.variant = job.variant;
    failed.budget = job.budget;
    failed.seed = job.seed;
    failed.error = e.what();
    return failed;
  }
}

}  // namespace

std::vector<EpisodeResult> run_matrix_serial(const std::vector<Scenario>& scenarios, const std::vector<BenchJob>& jobs,
                                             const EpisodeConfig& base) {
  std::vector<EpisodeResult> results;
  results.reserve(jobs.size());
  for (const auto& job : jobs) results.push_back(run_job(scenarios, job, base));
  return results;
}

std::vector<EpisodeResult> run_matrix_parallel(const std::vector<Scenario>& scenarios,
                                               const std::vector<BenchJob>& jobs, const EpisodeConfig& base,
                                               int threads) {
  std::vector<EpisodeResult> results(jobs.size());
  const int n = threads > 0 ? threads : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(n)
  for (std::ptrdiff_t i = 0; i < count; ++i) results[i] = run_job(scenarios, jobs[i], base);
  return results;
}

}  // namespace mergeplan::bench
