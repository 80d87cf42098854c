#pragma once

// Closed-loop episodes and their evaluation.
//
// Each step the planner picks an ego action from the realized combined state,
// the world advances one dt, and fresh evaluator monitors (own instances,
// same compiled automata) read the realized labels. The evaluator works on
// string label sets from the labelling function; the planner reads the same
// labels through its bit-level lookup, so the two counts are an independent
// cross-check of each other.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mergeplan/bench/scenario.hpp"
#include "mergeplan/mcts/merge_env.hpp"

namespace mergeplan::bench {

enum class Outcome : std::uint8_t { kSuccess, kCollision, kTimeout };

std::string_view to_string(Outcome o);

struct TraceFrame {
  std::size_t step = 0;
  double time = 0.0;
  // Action taken to reach this frame; none for the initial frame.
  std::optional<behavior::EgoAction> action;
  bool invalid_action = false;
  std::vector<world::AgentState> agents;
};

struct RuleCount {
  std::string rule;
  int violations = 0;
  std::optional<double> first_violation_time;
};

struct EpisodeResult {
  std::string scenario;
  mcts::Variant variant = mcts::Variant::kSA;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kTimeout;
  std::size_t steps = 0;
  // Evaluator counts, in rule-set order.
  std::vector<RuleCount> rules;
  // Penalties charged by the planner's monitors on the realized path, in
  // rule-set order; nullopt for rules the variant does not monitor.
  std::vector<std::optional<int>> planner_violations;
  std::size_t invalid_actions = 0;
  // Sum of the shaping term along the episode and the potential at both ends.
  double shaping_sum = 0.0;
  double potential_initial = 0.0;
  double potential_final = 0.0;
  std::vector<TraceFrame> trace;
  // Set when the episode failed; the other fields are then incomplete.
  std::string error;
  // Wall clock, kept out of every deterministic output.
  double wall_seconds = 0.0;

  int violations(std::string_view rule) const;
};

struct EpisodeConfig {
  mcts::PlannerConfig planner;
  behavior::BehaviorParams behavior;
  std::vector<std::shared_ptr<const ltlf::RuleTemplate>> rules;
  world::SafeDistanceParams safe_distance;
  bool record_trace = true;
};

class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Variant, budget and seed come from config.planner. Throws EpisodeError with
// the scenario, variant and step when planning or stepping fails.
EpisodeResult run_episode(const Scenario& sc, const EpisodeConfig& config);

// Search seed of one episode, mixed from the scenario seed and the run seed.
std::uint64_t episode_seed(const Scenario& sc, std::uint64_t run_seed);

// Replays the evaluator over a recorded trace: per rule, the penalties of all
// its bindings summed. The last frame is the final step.
std::vector<RuleCount> evaluate_trace(const std::vector<TraceFrame>& trace, const world::WorldState& initial,
                                      const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules,
                                      const world::SafeDistanceParams& sd = {});

// Line-oriented dump of a trace and its result, stable across runs.
std::string format_trace(const EpisodeResult& r);

struct BenchJob {
  std::size_t scenario = 0;
  mcts::Variant variant = mcts::Variant::kSA;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

std::vector<BenchJob> make_jobs(std::size_t scenarios, const std::vector<mcts::Variant>& variants,
                                const std::vector<std::size_t>& budgets, const std::vector<std::uint64_t>& seeds);

// Failed episodes carry their message in EpisodeResult::error. Results are in
// job order for both runners.
std::vector<EpisodeResult> run_matrix_serial(const std::vector<Scenario>& scenarios, const std::vector<BenchJob>& jobs,
                                             const EpisodeConfig& base);
std::vector<EpisodeResult> run_matrix_parallel(const std::vector<Scenario>& scenarios,
                                               const std::vector<BenchJob>& jobs, const EpisodeConfig& base,
                                               int threads = 0);

}  // namespace mergeplan::bench
