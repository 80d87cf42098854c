#include "mergeplan/mcts/merge_env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "mergeplan/util/keyvalue.hpp"

namespace mergeplan::mcts {

using world::LabelKind;

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 7> kVariantNames{{
    {Variant::kSA, "SA"},
    {Variant::kSALex, "SA-Lex"},
    {Variant::kSALexZip, "SA-Lex-Zip"},
    {Variant::kSALexSD, "SA-Lex-SD"},
    {Variant::kSALexZipSD, "SA-Lex-Zip-SD"},
    {Variant::kSALexSDZip, "SA-Lex-SD-Zip"},
    {Variant::kSALexRules, "SA-Lex-Rules"},
}};

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [k, name] : kVariantNames) {
    if (k == v) return name;
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view text) {
  for (const auto& [k, name] : kVariantNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(RolloutPolicy p) { return p == RolloutPolicy::kGapKeep ? "gap_keep" : "uniform"; }

std::optional<RolloutPolicy> parse_rollout_policy(std::string_view text) {
  if (text == "gap_keep") return RolloutPolicy::kGapKeep;
  if (text == "uniform") return RolloutPolicy::kUniform;
  return std::nullopt;
}

void PlannerConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (horizon == 0) throw ConfigError("horizon must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  if (!(exploration >= 0.0) || !std::isfinite(exploration)) throw ConfigError("exploration must be finite and >= 0");
  const auto& w = weights;
  for (double x : {w.collision, w.acceleration, w.lateral, w.velocity, w.potential, w.reference_velocity}) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("weights must be finite and >= 0");
  }
  if (std::isnan(collision_threshold) || std::isnan(rule_threshold)) throw ConfigError("thresholds must not be NaN");
}

PlannerConfig parse_planner_config(std::string_view text) {
  const auto doc = util::Document::parse(text);
  PlannerConfig c;
  auto positive = [](const util::Section& s, std::string_view key, auto fallback) {
    const util::Entry* e = s.find(key);
    if (e == nullptr) return fallback;
    const long v = util::parse_int(*e);
    if (v <= 0) throw util::DocumentError(e->key, e->line, "must be positive");
    return static_cast<decltype(fallback)>(v);
  };
  for (const auto& s : doc.sections()) {
    if (s.name() == "planner") {
      s.reject_unknown({"variant", "iterations", "seed", "horizon", "discount", "exploration", "rollout"});
      if (const util::Entry* e = s.find("variant")) {
        const auto v = parse_variant(e->value);
        if (!v) throw util::DocumentError(e->key, e->line, "unknown variant '" + e->value + "'");
        c.variant = *v;
      }
      c.iterations = positive(s, "iterations", c.iterations);
      if (const util::Entry* e = s.find("seed")) {
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), seed);
        if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
          throw util::DocumentError(e->key, e->line, "expected an unsigned integer");
        }
        c.seed = seed;
      }
      c.horizon = positive(s, "horizon", c.horizon);
      c.discount = s.opt_double("discount").value_or(c.discount);
      c.exploration = s.opt_double("exploration").value_or(c.exploration);
      if (const util::Entry* e = s.find("rollout")) {
        const auto p = parse_rollout_policy(e->value);
        if (!p) throw util::DocumentError(e->key, e->line, "expected gap_keep or uniform");
        c.rollout = *p;
      }
    } else if (s.name() == "weights") {
      s.reject_unknown({"collision", "acceleration", "lateral", "velocity", "potential", "reference_velocity"});
      auto& w = c.weights;
      w.collision = s.opt_double("collision").value_or(w.collision);
      w.acceleration = s.opt_double("acceleration").value_or(w.acceleration);
      w.lateral = s.opt_double("lateral").value_or(w.lateral);
      w.velocity = s.opt_double("velocity").value_or(w.velocity);
      w.potential = s.opt_double("potential").value_or(w.potential);
      w.reference_velocity = s.opt_double("reference_velocity").value_or(w.reference_velocity);
    } else if (s.name() == "thresholds") {
      s.reject_unknown({"collision", "rule"});
      c.collision_threshold = s.opt_double("collision").value_or(c.collision_threshold);
      c.rule_threshold = s.opt_double("rule").value_or(c.rule_threshold);
    } else {
      throw util::DocumentError(s.name(), s.line(), "unknown section, expected [planner], [weights] or [thresholds]");
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw util::DocumentError("", 0, e.what());
  }
  return c;
}

PlannerConfig load_planner_config(const std::string& path) { return parse_planner_config(util::read_file(path)); }

std::string print_planner_config(const PlannerConfig& c) {
  using util::format_double;
  std::string out = "[planner]\n";
  out += "variant = " + std::string(to_string(c.variant)) + "\n";
  out += "iterations = " + std::to_string(c.iterations) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "horizon = " + std::to_string(c.horizon) + "\n";
  out += "discount = " + format_double(c.discount) + "\n";
  out += "exploration = " + format_double(c.exploration) + "\n";
  out += "rollout = " + std::string(to_string(c.rollout)) + "\n";
  out += "\n[weights]\n";
  out += "collision = " + format_double(c.weights.collision) + "\n";
  out += "acceleration = " + format_double(c.weights.acceleration) + "\n";
  out += "lateral = " + format_double(c.weights.lateral) + "\n";
  out += "velocity = " + format_double(c.weights.velocity) + "\n";
  out += "potential = " + format_double(c.weights.potential) + "\n";
  out += "reference_velocity = " + format_double(c.weights.reference_velocity) + "\n";
  out += "\n[thresholds]\n";
  out += "collision = " + format_double(c.collision_threshold) + "\n";
  out += "rule = " + format_double(c.rule_threshold) + "\n";
  return out;
}

std::optional<std::size_t> RewardLayout::rule_dimension(std::string_view rule) const {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].kind == DimensionKind::kRule && dims[i].rule == rule) return i;
  }
  return std::nullopt;
}

std::vector<std::string> RewardLayout::names() const {
  std::vector<std::string> out;
  for (const auto& d : dims) {
    switch (d.kind) {
      case DimensionKind::kCollisionAndBase:
        out.emplace_back("collision+base");
        break;
      case DimensionKind::kCollision:
        out.emplace_back("collision");
        break;
      case DimensionKind::kRule:
        out.push_back(d.rule);
        break;
      case DimensionKind::kBase:
        out.emplace_back("base");
        break;
    }
  }
  return out;
}

RewardLayout reward_layout(Variant v, const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules) {
  auto require = [&](std::string_view name) {
    for (const auto& r : rules) {
      if (r->spec.name == name) return Dimension{DimensionKind::kRule, r->spec.name};
    }
    throw ConfigError("variant " + std::string(to_string(v)) + " needs a rule named '" + std::string(name) + "'");
  };
  const Dimension col{DimensionKind::kCollision, {}};
  const Dimension base{DimensionKind::kBase, {}};
  RewardLayout l;
  switch (v) {
    case Variant::kSA:
      l.dims = {{DimensionKind::kCollisionAndBase, {}}};
      break;
    case Variant::kSALex:
      l.dims = {col, base};
      break;
    case Variant::kSALexZip:
      l.dims = {col, require(kZipperRule), base};
      break;
    case Variant::kSALexSD:
      l.dims = {col, require(kSafeDistanceRule), base};
      break;
    case Variant::kSALexZipSD:
      l.dims = {col, require(kZipperRule), require(kSafeDistanceRule), base};
      break;
    case Variant::kSALexSDZip:
      l.dims = {col, require(kSafeDistanceRule), require(kZipperRule), base};
      break;
    case Variant::kSALexRules: {
      std::vector<std::shared_ptr<const ltlf::RuleTemplate>> sorted = rules;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const auto& a, const auto& b) { return a->spec.priority < b->spec.priority; });
      if (sorted.size() + 2 > kMaxRewardDims) throw ConfigError("too many rules for one reward vector");
      l.dims.push_back(col);
      for (const auto& r : sorted) l.dims.push_back({DimensionKind::kRule, r->spec.name});
      l.dims.push_back(base);
      break;
    }
  }
  return l;
}

RewardVector thresholds(const RewardLayout& layout, const PlannerConfig& c) {
  RewardVector t(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    switch (layout.dims[i].kind) {
      case DimensionKind::kCollision:
        t[i] = c.collision_threshold;
        break;
      case DimensionKind::kRule:
        t[i] = c.rule_threshold;
        break;
      case DimensionKind::kCollisionAndBase:
      case DimensionKind::kBase:
        t[i] = -std::numeric_limits<double>::infinity();
        break;
    }
  }
  return t;
}

namespace {

bool is_pair_label(LabelKind k) { return k == LabelKind::kIdf || k == LabelKind::kMerged || k == LabelKind::kAhead; }

MonitorSlot make_slot(const std::shared_ptr<const ltlf::RuleTemplate>& rule, std::optional<int> binding,
                      std::size_t rule_index, std::size_t dimension) {
  MonitorSlot slot{rule, binding, rule_index, dimension, {}};
  const auto& props = rule->dfa->props();
  for (std::size_t i = 0; i < props.size(); ++i) {
    const ltlf::AtomName atom = ltlf::split_atom(props[i]);
    const LabelKind kind = world::label_kind(atom.base);
    if (kind == LabelKind::kUnknown || kind == LabelKind::kAlive) {
      throw ConfigError("rule '" + rule->spec.name + "': unknown proposition '" + props[i] + "'");
    }
    if (is_pair_label(kind) && !atom.slot) {
      throw ConfigError("rule '" + rule->spec.name + "': proposition '" + props[i] + "' needs an agent");
    }
    if (!is_pair_label(kind) && atom.slot) {
      throw ConfigError("rule '" + rule->spec.name + "': proposition '" + props[i] + "' takes no agent");
    }
    if (atom.slot && !ltlf::is_slot_placeholder(*atom.slot)) {
      throw ConfigError("rule '" + rule->spec.name + "': fixed agent ids are not supported in '" + props[i] + "'");
    }
    slot.kinds[i] = kind;
  }
  return slot;
}

}  // namespace

MonitorBank make_monitor_bank(const std::vector<std::shared_ptr<const ltlf::RuleTemplate>>& rules,
                              const RewardLayout& layout, const world::WorldState& initial, bool all_rules) {
  MonitorBank bank;
  for (const auto& rule : rules) {
    const auto dim = layout.rule_dimension(rule->spec.name);
    if (!dim && !all_rules) continue;
    const std::size_t index = bank.rules.size();
    if (index >= kMaxRules) throw ConfigError("too many monitored rules");
    bank.rules.push_back(rule);
    const std::size_t d = dim.value_or(kNoDimension);
    if (!rule->slot) {
      bank.slots.push_back(make_slot(rule, std::nullopt, index, d));
      continue;
    }
    for (const auto& a : initial.agents) {
      if (a.id == initial.ego_id) continue;
      bank.slots.push_back(make_slot(rule, a.id, index, d));
    }
  }
  return bank;
}

ltlf::Symbol slot_symbol(const MonitorSlot& slot, const world::FrameLabels& f) {
  const std::size_t n = slot.rule->dfa->props().size();
  const world::OtherLabels* other = slot.binding ? f.other(*slot.binding) : nullptr;
  ltlf::Symbol s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool v = false;
    switch (slot.kinds[i]) {
      case LabelKind::kSdFront:
        v = f.sd_front;
        break;
      case LabelKind::kCollide:
        v = f.collide;
        break;
      case LabelKind::kAtGoal:
        v = f.at_goal;
        break;
      case LabelKind::kIdf:
        v = other != nullptr && other->idf;
        break;
      case LabelKind::kMerged:
        v = other != nullptr && other->merged;
        break;
      case LabelKind::kAhead:
        v = other != nullptr && other->ahead;
        break;
      case LabelKind::kAlive:
      case LabelKind::kUnknown:
        break;
    }
    if (v) s |= ltlf::Symbol{1} << i;
  }
  return s;
}

bool slot_alive(const MonitorSlot& slot, const world::WorldState& next, bool final_step) {
  if (final_step) return false;
  if (!slot.binding) return true;
  const world::AgentState* a = next.find(*slot.binding);
  return a != nullptr && !a->exited;
}

MergeEnvironment::MergeEnvironment(PlannerConfig config, behavior::BehaviorParams behavior, RewardLayout layout,
                                   std::shared_ptr<const MonitorBank> bank, world::SafeDistanceParams sd)
    : config_(std::move(config)),
      behavior_(behavior),
      gap_keep_(behavior::gap_keep_params(behavior.idm)),
      layout_(std::move(layout)),
      bank_(std::move(bank)),
      sd_(sd) {
  config_.validate();
  if (layout_.size() == 0 || layout_.size() > kMaxRewardDims) throw ConfigError("bad reward layout size");
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    const auto k = layout_.dims[i].kind;
    if (k == DimensionKind::kCollision || k == DimensionKind::kCollisionAndBase) collision_dim_ = i;
    if (k == DimensionKind::kBase || k == DimensionKind::kCollisionAndBase) base_dim_ = i;
  }
}

TloParams MergeEnvironment::tlo_params() const {
  return TloParams{thresholds(layout_, config_), config_.exploration, config_.discount};
}

CombinedState MergeEnvironment::initial_state(world::WorldState w, std::size_t horizon) const {
  CombinedState z;
  z.world = std::move(w);
  z.monitor_states.reserve(bank_->slots.size());
  for (const auto& slot : bank_->slots) z.monitor_states.push_back(slot.rule->dfa->initial());
  z.finished.assign(bank_->slots.size(), 0);
  z.horizon = horizon;
  return z;
}

double MergeEnvironment::potential(const world::WorldState& w) const {
  const auto& ego = w.ego();
  return -config_.weights.potential * std::abs(ego.v - config_.weights.reference_velocity) * w.dt;
}

DetailedStep MergeEnvironment::step_detailed(const State& z, std::size_t action) const {
  if (action >= behavior::kEgoActionCount) throw SearchError("action out of range");
  DetailedStep out;
  StepInfo& info = out.info;
  const world::WorldState& w = z.world;

  std::vector<world::Command> commands = behavior::other_agent_commands(w, behavior_);
  const behavior::Primitive ego_cmd = behavior::primitive_action(w, w.ego_id, behavior::kEgoActions[action], gap_keep_);
  info.invalid_action = ego_cmd.invalid;
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    if (w.agents[i].id == w.ego_id) commands[i] = ego_cmd.command;
  }

  CombinedState& n = out.step.next;
  n.world = world::step_world(w, commands);
  n.depth = z.depth + 1;
  n.horizon = z.horizon;

  const world::AgentState& ego = n.world.ego();
  const world::FrameLabels labels = world::compute_labels(n.world, n.world.ego_id, sd_);
  bool collided = labels.collide;
  for (const auto& o : n.world.agents) {
    if (collided) break;
    if (o.id != ego.id && world::check_collision(ego, o)) collided = true;
  }
  n.collided = collided;
  n.reached_goal = !collided && labels.at_goal;
  info.collision = n.collided;
  info.goal = n.reached_goal;
  const bool final_step = n.collided || n.reached_goal || n.depth >= n.horizon;

  RewardVector r(layout_.size());
  n.monitor_states = z.monitor_states;
  n.finished = z.finished;
  for (std::size_t i = 0; i < bank_->slots.size(); ++i) {
    if (n.finished[i]) continue;
    const MonitorSlot& slot = bank_->slots[i];
    const bool alive = slot_alive(slot, n.world, final_step);
    const ltlf::Transition t =
        ltlf::transition(*slot.rule->dfa, slot.rule->kind, n.monitor_states[i], slot_symbol(slot, labels), alive);
    n.monitor_states[i] = t.next;
    n.finished[i] = !alive;
    if (t.charged) {
      ++info.violations[slot.rule_index];
      if (slot.dimension != kNoDimension) r[slot.dimension] -= slot.rule->spec.weight;
    }
  }

  const auto& wt = config_.weights;
  const double dt = w.dt;
  if (collision_dim_ && n.collided) r[*collision_dim_] -= wt.collision;
  info.potential_before = potential(w);
  info.potential_after = potential(n.world);
  info.shaping = config_.discount * info.potential_after - info.potential_before;
  if (base_dim_) {
    const double base = -wt.acceleration * ego.a * ego.a * dt - wt.lateral * std::abs(ego.heading_rate) * ego.v * ego.v * dt -
                        wt.velocity * std::abs(ego.v - wt.reference_velocity) * dt + info.shaping;
    r[*base_dim_] += base;
  }
  out.step.reward = r;
  out.step.terminal = final_step;
  return out;
}

std::size_t MergeEnvironment::rollout_action(const State& /*z*/, Rng& rng) const {
  if (config_.rollout == RolloutPolicy::kUniform) return break_tie(behavior::kEgoActionCount, rng);
  return static_cast<std::size_t>(behavior::EgoAction::kGapKeep);
}

}  // namespace mergeplan::mcts
