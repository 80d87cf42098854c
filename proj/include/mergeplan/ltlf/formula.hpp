#pragma once

// Finite-trace temporal formulas.
//
// Formulas are immutable trees shared by pointer. The raw constructors build
// exactly the requested node; canonicalize() rewrites a formula into negation
// normal form with flattened, sorted, de-duplicated n-ary conjunctions and
// disjunctions. Two canonical formulas are equal iff they are structurally
// identical, which is what automaton-state deduplication relies on.
//
// Besides the user-facing operators there are three internal node kinds that
// only appear after canonicalization or progression:
//   WeakNext  - dual of Next, introduced when negation is pushed through X
//   Release   - dual of Until
//   End       - holds exactly on the empty suffix (used for end-of-trace
//               bookkeeping of Next/WeakNext residuals)

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mergeplan::ltlf {

enum class Kind : std::uint8_t {
  kTrue,
  kFalse,
  kAtom,
  kEnd,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kNext,
  kWeakNext,
  kUntil,
  kRelease,
  kGlobally,
  kFinally,
};

class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string name);
  static Formula end();
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula next(Formula f);
  static Formula weak_next(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  static Formula release(Formula lhs, Formula rhs);
  static Formula globally(Formula f);
  static Formula finally(Formula f);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  std::span<const Formula> children() const { return node_->children; }
  const Formula& child(std::size_t i) const { return node_->children.at(i); }

  bool is_literal() const;
  // Largest number of nested Next/WeakNext operators on any path.
  int next_depth() const;
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Kind kind, std::string name, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

// Canonical smart constructors. Children must already be canonical.
Formula make_and(std::vector<Formula> children);
Formula make_or(std::vector<Formula> children);

// NNF, implication elimination, flattening and constant folding.
Formula canonicalize(const Formula& f);

// Names of all atomic propositions, sorted.
std::set<std::string> atoms_of(const Formula& f);

// "idf#j" -> {"idf", "j"}; "sd_front" -> {"sd_front", nullopt}.
struct AtomName {
  std::string base;
  std::optional<std::string> slot;
};
AtomName split_atom(std::string_view name);
bool is_slot_placeholder(std::string_view slot);

enum class RuleKind : std::uint8_t { kSafety, kGuarantee };

std::string_view to_string(RuleKind kind);

// Obligation fragment: G p or F p, where p uses only atoms, constants,
// boolean connectives and (weak) next. Returns nullopt outside the fragment.
std::optional<RuleKind> obligation_kind(const Formula& canonical);

}  // namespace mergeplan::ltlf
