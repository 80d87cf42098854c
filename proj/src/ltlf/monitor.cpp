#include "mergeplan/ltlf/monitor.hpp"

#include <algorithm>

#include "mergeplan/ltlf/parser.hpp"

namespace mergeplan::ltlf {

LabelSet::LabelSet(std::initializer_list<std::string> names) {
  for (const auto& n : names) insert(n);
}

void LabelSet::insert(std::string name) {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) names_.insert(it, std::move(name));
}

void LabelSet::erase(std::string_view name) {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it != names_.end() && *it == name) names_.erase(it);
}

bool LabelSet::contains(std::string_view name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

std::string LabelSet::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i > 0) out += ", ";
    out += names_[i];
  }
  return out + "}";
}

Transition transition(const Dfa& dfa, RuleKind kind, StateId q, Symbol symbol, bool alive) {
  const StateId next = dfa.successor(q, symbol);
  if (kind == RuleKind::kGuarantee) return {next, !alive && !dfa.accepting(next)};
  if (dfa.is_trap(next)) return {dfa.initial(), true};
  if (!alive && q == dfa.initial()) return {dfa.accepting_sink().value_or(next), false};
  return {next, false};
}

std::string ground_name(std::string_view name, std::string_view slot, int agent) {
  const AtomName parts = split_atom(name);
  if (!parts.slot || *parts.slot != slot) return std::string(name);
  return parts.base + "#" + std::to_string(agent);
}

std::shared_ptr<const RuleTemplate> compile_rule(const RuleSpec& spec) {
  Formula f = parse_ltlf(spec.formula);
  const auto kind = *obligation_kind(f);

  std::optional<std::string> slot;
  std::vector<std::string> props;
  for (const auto& a : atoms_of(f)) {
    if (a == kAlive) throw BindingError("rule '" + spec.name + "': 'alive' is reserved");
    const AtomName parts = split_atom(a);
    if (parts.slot && is_slot_placeholder(*parts.slot)) {
      if (slot && *slot != *parts.slot) {
        throw BindingError("rule '" + spec.name + "' uses more than one agent slot ('" + *slot + "', '" +
                           *parts.slot + "')");
      }
      slot = parts.slot;
    }
    props.push_back(a);
  }
  if (slot && !spec.per_agent) {
    throw BindingError("rule '" + spec.name + "' has agent slot '#" + *slot + "' but per_agent is false");
  }
  if (!slot && spec.per_agent) {
    throw BindingError("rule '" + spec.name + "' is per_agent but has no agent slot");
  }
  if (!(spec.weight >= 0.0)) throw BindingError("rule '" + spec.name + "': weight must be non-negative");
  if (spec.priority < 0) throw BindingError("rule '" + spec.name + "': priority must be non-negative");

  auto dfa = std::make_shared<const Dfa>(compile_dfa(f, props));
  return std::make_shared<const RuleTemplate>(RuleTemplate{spec, std::move(f), kind, std::move(slot), std::move(dfa)});
}

RuleMonitor::RuleMonitor(std::shared_ptr<const RuleTemplate> rule, std::optional<int> binding)
    : rule_(std::move(rule)), binding_(binding) {
  if (rule_->slot && !binding_) {
    throw BindingError("rule '" + rule_->spec.name + "': agent slot '#" + *rule_->slot + "' is unresolved");
  }
  for (const auto& p : rule_->dfa->props()) {
    grounded_.push_back(rule_->slot ? ground_name(p, *rule_->slot, *binding_) : p);
  }
  state_ = rule_->dfa->initial();
}

Symbol RuleMonitor::symbol(const LabelSet& labels) const {
  Symbol s = 0;
  for (std::size_t i = 0; i < grounded_.size(); ++i) {
    if (labels.contains(grounded_[i])) s |= Symbol{1} << i;
  }
  return s;
}

double RuleMonitor::step(const LabelSet& labels) { return step(symbol(labels), labels.alive()); }

double RuleMonitor::step(Symbol symbol, bool alive) {
  if (finished_) return 0.0;
  const Transition t = transition(*rule_->dfa, rule_->kind, state_, symbol, alive);
  state_ = t.next;
  finished_ = !alive;
  if (!t.charged) return 0.0;
  ++violations_;
  return -rule_->spec.weight;
}

RuleMonitor instantiate_rule(std::shared_ptr<const RuleTemplate> rule, std::optional<int> binding) {
  return RuleMonitor(std::move(rule), binding);
}

}  // namespace mergeplan::ltlf
