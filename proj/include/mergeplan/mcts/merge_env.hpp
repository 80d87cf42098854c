#pragma once

// The merge scenario as a search environment.
//
// A combined state pairs the world with the automaton state of every rule
// monitor the variant uses. Monitors are listed once per episode in a shared
// MonitorBank (rule, binding, reward dimension, label lookup), so a state only
// carries the automaton states and their finished flags.
//
// Reward layouts per variant, index 0 first:
//   SA              (r_col + r_base)
//   SA-Lex          (r_col, r_base)
//   SA-Lex-Zip      (r_col, r_zip, r_base)
//   SA-Lex-SD       (r_col, r_sd, r_base)
//   SA-Lex-Zip-SD   (r_col, r_zip, r_sd, r_base)
//   SA-Lex-SD-Zip   (r_col, r_sd, r_zip, r_base)
//   SA-Lex-Rules    (r_col, every loaded rule by ascending priority, r_base)

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mergeplan/behavior/models.hpp"
#include "mergeplan/ltlf/monitor.hpp"
#include "mergeplan/mcts/search.hpp"
#include "mergeplan/world/labels.hpp"

namespace mergeplan::mcts {

enum class Variant : std::uint8_t { kSA, kSALex, kSALexZip, kSALexSD, kSALexZipSD, kSALexSDZip, kSALexRules };

inline constexpr std::array<Variant, 6> kBenchmarkVariants{Variant::kSA,      Variant::kSALex,
                                                           Variant::kSALexZip, Variant::kSALexSD,
                                                           Variant::kSALexZipSD, Variant::kSALexSDZip};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

inline constexpr std::string_view kZipperRule = "zipper";
inline constexpr std::string_view kSafeDistanceRule = "safe_distance";

enum class RolloutPolicy : std::uint8_t { kGapKeep, kUniform };

std::string_view to_string(RolloutPolicy p);
std::optional<RolloutPolicy> parse_rollout_policy(std::string_view text);

struct RewardWeights {
  double collision = 10.0;
  double acceleration = 0.01;
  double lateral = 0.02;
  double velocity = 0.1;
  double potential = 0.1;
  double reference_velocity = 14.0;
};

struct PlannerConfig {
  Variant variant = Variant::kSALexZip;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  std::size_t horizon = 10;
  double discount = 0.95;
  double exploration = 1.0;
  RolloutPolicy rollout = RolloutPolicy::kGapKeep;
  RewardWeights weights;
  double collision_threshold = -5.0;
  double rule_threshold = -0.5;

  void validate() const;
};

PlannerConfig parse_planner_config(std::string_view text);
PlannerConfig load_planner_config(const std::string& path);
std::string print_planner_config(const PlannerConfig& c);

enum class DimensionKind : std::uint8_t { kCollisionAndBase, kCollision, kRule, kBase };

struct Dimension {
  DimensionKind kind;
  std::string rule;  // kRule only
};

struct RewardLayout {
  std::vector<Dimension> dims;

  std::size_t size() const { return dims.size(); }
  // Rule dimension index by rule name.
  std::optional<std::size_t> rule_dimension(std::string_view rule) const;
  std::vector<std::string> names() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws ConfigError when the variant needs a rule missing from `rules`.
RewardLayout reward_layout(Variant v, const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules);

RewardVector thresholds(const RewardLayout& layout, const PlannerConfig& c);

inline constexpr std::size_t kNoDimension = static_cast<std::size_t>(-1);

struct MonitorSlot {
  std::shared_ptr<const ltlf::RuleTemplate> rule;
  std::optional<int> binding;
  std::size_t rule_index;  // position in MonitorBank::rules
  std::size_t dimension;   // reward dimension or kNoDimension
  std::array<world::LabelKind, ltlf::kMaxProps> kinds{};
};

struct MonitorBank {
  std::vector<std::shared_ptr<const ltlf::RuleTemplate>> rules;
  std::vector<MonitorSlot> slots;
};

// One slot per agent-independent rule and one per (per-agent rule, other
// agent) pair. Rules without a reward dimension are still monitored when
// `all_rules` is set; the planner only monitors the layout's rules.
MonitorBank make_monitor_bank(const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules,
                              const RewardLayout& layout, const world::WorldState& initial, bool all_rules);

// Symbol of a slot's automaton in the given frame; bound agents that are gone
// read as all-false.
ltlf::Symbol slot_symbol(const MonitorSlot& slot, const world::FrameLabels& f);

// Whether `alive` holds for the slot on a step into `next`.
bool slot_alive(const MonitorSlot& slot, const world::WorldState& next, bool final_step);

struct CombinedState {
  world::WorldState world;
  std::vector<ltlf::StateId> monitor_states;
  std::vector<std::uint8_t> finished;
  std::size_t depth = 0;
  std::size_t horizon = 10;
  bool collided = false;
  bool reached_goal = false;
};

inline constexpr std::size_t kMaxRules = kMaxRewardDims;

struct StepInfo {
  bool collision = false;
  bool goal = false;
  bool invalid_action = false;
  double potential_before = 0.0;
  double potential_after = 0.0;
  double shaping = 0.0;
  std::array<std::uint16_t, kMaxRules> violations{};
};

struct DetailedStep {
  Step<CombinedState> step;
  StepInfo info;
};

class MergeEnvironment {
 public:
  using State = CombinedState;

  MergeEnvironment(PlannerConfig config, behavior::BehaviorParams behavior, RewardLayout layout,
                   std::shared_ptr<const MonitorBank> bank, world::SafeDistanceParams sd = {});

  std::size_t action_count() const { return behavior::kEgoActionCount; }
  std::size_t reward_dims() const { return layout_.size(); }
  bool terminal(const State& z) const { return z.collided || z.reached_goal || z.depth >= z.horizon; }
  Step<State> step(const State& z, std::size_t action) const { return step_detailed(z, action).step; }
  DetailedStep step_detailed(const State& z, std::size_t action) const;
  std::size_t rollout_action(const State& z, Rng& rng) const;

  // Initial monitor states for a world, with the given horizon.
  State initial_state(world::WorldState w, std::size_t horizon) const;

  // phi(s) = -w_phi |v - v_r| dt for the ego.
  double potential(const world::WorldState& w) const;

  const PlannerConfig& config() const { return config_; }
  const RewardLayout& layout() const { return layout_; }
  const MonitorBank& bank() const { return *bank_; }
  TloParams tlo_params() const;

 private:
  PlannerConfig config_;
  behavior::BehaviorParams behavior_;
  behavior::IdmParams gap_keep_;
  RewardLayout layout_;
  std::shared_ptr<const MonitorBank> bank_;
  world::SafeDistanceParams sd_;
  std::optional<std::size_t> collision_dim_;
  std::optional<std::size_t> base_dim_;
};

}  // namespace mergeplan::mcts
