#pragma once

// Resettable, weighted runtime monitors.
//
// A rule is compiled once into a RuleTemplate (formula, kind, weight,
// priority, shared Dfa). Per-agent rules mention slot atoms such as "idf#j";
// instantiate_rule() binds the slot to a concrete agent id, so all bindings of
// one template read different grounded labels but step the same automaton.
//
// Stepping follows the modified transition with weighting:
//   safety     entering a non-accepting trap charges the weight and resets
//              to the initial state; a monitor still sitting in its initial
//              state when `alive` drops is parked in an accepting state.
//   guarantee  never resets; charged once, on the step where `alive` drops,
//              if that step does not end in an accepting state.
// Penalties are returned as rewards, i.e. 0 or -weight.

#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mergeplan/ltlf/dfa.hpp"
#include "mergeplan/ltlf/formula.hpp"

namespace mergeplan::ltlf {

inline constexpr std::string_view kAlive = "alive";

// Grounded propositions true in one world state, kept sorted.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<std::string> names);

  void insert(std::string name);
  void erase(std::string_view name);
  bool contains(std::string_view name) const;
  bool alive() const { return contains(kAlive); }
  const std::vector<std::string>& names() const { return names_; }
  std::string to_string() const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> names_;
};

struct Transition {
  StateId next;
  bool charged;
};

// The modified transition together with its weight decision. Pure.
Transition transition(const Dfa& dfa, RuleKind kind, StateId q, Symbol symbol, bool alive);

class BindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RuleSpec {
  std::string name;
  std::string formula;
  double weight = 1.0;
  int priority = 0;
  bool per_agent = false;

  friend bool operator==(const RuleSpec&, const RuleSpec&) = default;
};

struct RuleTemplate {
  RuleSpec spec;
  Formula formula;  // canonical
  RuleKind kind;
  // Slot placeholder used by the formula ("j" for idf#j), if any.
  std::optional<std::string> slot;
  // Alphabet is the formula's atoms in sorted order, slots left unbound.
  std::shared_ptr<const Dfa> dfa;
};

// Parses, checks the fragment and compiles. Throws ParseError, FragmentError,
// CompileError, or BindingError when slots are inconsistent with per_agent.
std::shared_ptr<const RuleTemplate> compile_rule(const RuleSpec& spec);

// "idf#j" bound to 3 -> "idf#3". Names without the slot are returned as is.
std::string ground_name(std::string_view name, std::string_view slot, int agent);

class RuleMonitor {
 public:
  RuleMonitor(std::shared_ptr<const RuleTemplate> rule, std::optional<int> binding);

  const RuleTemplate& rule() const { return *rule_; }
  const std::string& name() const { return rule_->spec.name; }
  RuleKind kind() const { return rule_->kind; }
  double weight() const { return rule_->spec.weight; }
  int priority() const { return rule_->spec.priority; }
  std::optional<int> binding() const { return binding_; }
  const Dfa& dfa() const { return *rule_->dfa; }
  // Alphabet after binding, aligned with dfa().props().
  const std::vector<std::string>& grounded_props() const { return grounded_; }

  StateId state() const { return state_; }
  // Set once a step without `alive` has been taken; later steps are ignored.
  bool finished() const { return finished_; }
  int violations() const { return violations_; }

  Symbol symbol(const LabelSet& labels) const;

  // Returns 0 or -weight.
  double step(const LabelSet& labels);
  double step(Symbol symbol, bool alive);

 private:
  std::shared_ptr<const RuleTemplate> rule_;
  std::optional<int> binding_;
  std::vector<std::string> grounded_;
  StateId state_ = 0;
  bool finished_ = false;
  int violations_ = 0;
};

// Throws BindingError when the template has a slot and no binding is given.
RuleMonitor instantiate_rule(std::shared_ptr<const RuleTemplate> rule, std::optional<int> binding = std::nullopt);

}  // namespace mergeplan::ltlf
