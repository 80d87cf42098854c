#include "mergeplan/ltlf/formula.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mergeplan::ltlf {

Formula Formula::make(Kind kind, std::string name, std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(Node{kind, std::move(name), std::move(children)}));
}

Formula Formula::truth() {
  static const Formula t = make(Kind::kTrue, {}, {});
  return t;
}

Formula Formula::falsity() {
  static const Formula f = make(Kind::kFalse, {}, {});
  return f;
}

Formula Formula::atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty proposition name");
  return make(Kind::kAtom, std::move(name), {});
}

Formula Formula::end() {
  static const Formula e = make(Kind::kEnd, {}, {});
  return e;
}

Formula Formula::negation(Formula f) { return make(Kind::kNot, {}, {std::move(f)}); }

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw std::invalid_argument("conjunction needs two operands");
  return make(Kind::kAnd, {}, std::move(children));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw std::invalid_argument("disjunction needs two operands");
  return make(Kind::kOr, {}, std::move(children));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return make(Kind::kImplies, {}, {std::move(lhs), std::move(rhs)});
}

Formula Formula::next(Formula f) { return make(Kind::kNext, {}, {std::move(f)}); }
Formula Formula::weak_next(Formula f) { return make(Kind::kWeakNext, {}, {std::move(f)}); }

Formula Formula::until(Formula lhs, Formula rhs) {
  return make(Kind::kUntil, {}, {std::move(lhs), std::move(rhs)});
}

Formula Formula::release(Formula lhs, Formula rhs) {
  return make(Kind::kRelease, {}, {std::move(lhs), std::move(rhs)});
}

Formula Formula::globally(Formula f) { return make(Kind::kGlobally, {}, {std::move(f)}); }
Formula Formula::finally(Formula f) { return make(Kind::kFinally, {}, {std::move(f)}); }

bool Formula::is_literal() const {
  switch (kind()) {
    case Kind::kAtom:
    case Kind::kEnd:
      return true;
    case Kind::kNot:
      return child(0).kind() == Kind::kAtom || child(0).kind() == Kind::kEnd;
    default:
      return false;
  }
}

int Formula::next_depth() const {
  int depth = 0;
  for (const auto& c : children()) depth = std::max(depth, c.next_depth());
  if (kind() == Kind::kNext || kind() == Kind::kWeakNext) ++depth;
  return depth;
}

namespace {

bool is_bare(const Formula& f) {
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kAtom:
    case Kind::kEnd:
    case Kind::kNot:
    case Kind::kNext:
    case Kind::kWeakNext:
    case Kind::kGlobally:
    case Kind::kFinally:
      return true;
    default:
      return false;
  }
}

std::string operand(const Formula& f) {
  return is_bare(f) ? f.to_string() : "(" + f.to_string() + ")";
}

std::string join(std::span<const Formula> children, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i > 0) out += sep;
    out += operand(children[i]);
  }
  return out;
}

}  // namespace

std::string Formula::to_string() const {
  switch (kind()) {
    case Kind::kTrue: return "true";
    case Kind::kFalse: return "false";
    case Kind::kAtom: return name();
    case Kind::kEnd: return "$end";
    case Kind::kNot: return "!" + operand(child(0));
    case Kind::kAnd: return join(children(), " & ");
    case Kind::kOr: return join(children(), " | ");
    case Kind::kImplies: return operand(child(0)) + " -> " + operand(child(1));
    case Kind::kNext: return "X " + operand(child(0));
    case Kind::kWeakNext: return "N " + operand(child(0));
    case Kind::kUntil: return operand(child(0)) + " U " + operand(child(1));
    case Kind::kRelease: return operand(child(0)) + " R " + operand(child(1));
    case Kind::kGlobally: return "G " + operand(child(0));
    case Kind::kFinally: return "F " + operand(child(0));
  }
  return {};
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.name().compare(b.name()); c != 0) {
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  const auto ca = a.children();
  const auto cb = b.children();
  if (auto c = ca.size() <=> cb.size(); c != 0) return c;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (auto c = ca[i] <=> cb[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

namespace {

bool complementary(const Formula& a, const Formula& b) {
  return (a.kind() == Kind::kNot && a.child(0) == b) || (b.kind() == Kind::kNot && b.child(0) == a);
}

// Shared flatten/sort/fold for And (absorbing = false) and Or (absorbing = true).
Formula make_nary(Kind kind, std::vector<Formula> children) {
  const bool is_and = kind == Kind::kAnd;
  const Kind absorbing = is_and ? Kind::kFalse : Kind::kTrue;
  const Kind neutral = is_and ? Kind::kTrue : Kind::kFalse;

  std::vector<Formula> flat;
  flat.reserve(children.size());
  for (auto& c : children) {
    if (c.kind() == absorbing) return c;
    if (c.kind() == neutral) continue;
    if (c.kind() == kind) {
      for (const auto& g : c.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());

  // p & !p is unsatisfiable everywhere. The dual p | !p is NOT valid on the
  // empty suffix (no literal holds there), so it is left alone.
  if (is_and) {
    for (std::size_t i = 0; i < flat.size(); ++i) {
      for (std::size_t j = i + 1; j < flat.size(); ++j) {
        if (complementary(flat[i], flat[j])) return Formula::falsity();
      }
    }
  }

  if (flat.empty()) return is_and ? Formula::truth() : Formula::falsity();
  if (flat.size() == 1) return flat.front();
  return is_and ? Formula::conjunction(std::move(flat)) : Formula::disjunction(std::move(flat));
}

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Kind::kTrue:
      return negated ? Formula::falsity() : f;
    case Kind::kFalse:
      return negated ? Formula::truth() : f;
    case Kind::kAtom:
    case Kind::kEnd:
      return negated ? Formula::negation(f) : f;
    case Kind::kNot:
      return nnf(f.child(0), !negated);
    case Kind::kAnd:
    case Kind::kOr: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(nnf(c, negated));
      const bool conj = (f.kind() == Kind::kAnd) != negated;
      return conj ? make_and(std::move(cs)) : make_or(std::move(cs));
    }
    case Kind::kImplies:
      return nnf(Formula::disjunction({Formula::negation(f.child(0)), f.child(1)}), negated);
    case Kind::kNext: {
      auto c = nnf(f.child(0), negated);
      if (negated) return c.kind() == Kind::kTrue ? c : Formula::weak_next(c);
      return c.kind() == Kind::kFalse ? c : Formula::next(c);
    }
    case Kind::kWeakNext: {
      auto c = nnf(f.child(0), negated);
      if (negated) return c.kind() == Kind::kFalse ? c : Formula::next(c);
      return c.kind() == Kind::kTrue ? c : Formula::weak_next(c);
    }
    case Kind::kUntil:
    case Kind::kRelease: {
      auto l = nnf(f.child(0), negated);
      auto r = nnf(f.child(1), negated);
      const bool until = (f.kind() == Kind::kUntil) != negated;
      return until ? Formula::until(l, r) : Formula::release(l, r);
    }
    case Kind::kGlobally:
    case Kind::kFinally: {
      auto c = nnf(f.child(0), negated);
      const bool glob = (f.kind() == Kind::kGlobally) != negated;
      return glob ? Formula::globally(c) : Formula::finally(c);
    }
  }
  return f;
}

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.kind() == Kind::kAtom) out.insert(f.name());
  for (const auto& c : f.children()) collect_atoms(c, out);
}

bool propositional_with_next(const Formula& f) {
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kAtom:
    case Kind::kNot:
    case Kind::kAnd:
    case Kind::kOr:
    case Kind::kImplies:
    case Kind::kNext:
    case Kind::kWeakNext:
      break;
    default:
      return false;
  }
  for (const auto& c : f.children()) {
    if (!propositional_with_next(c)) return false;
  }
  return true;
}

}  // namespace

Formula make_and(std::vector<Formula> children) { return make_nary(Kind::kAnd, std::move(children)); }
Formula make_or(std::vector<Formula> children) { return make_nary(Kind::kOr, std::move(children)); }

Formula canonicalize(const Formula& f) { return nnf(f, false); }

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

AtomName split_atom(std::string_view name) {
  const auto hash = name.find('#');
  if (hash == std::string_view::npos) return {std::string(name), std::nullopt};
  return {std::string(name.substr(0, hash)), std::string(name.substr(hash + 1))};
}

bool is_slot_placeholder(std::string_view slot) {
  return !slot.empty() && !std::all_of(slot.begin(), slot.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string_view to_string(RuleKind kind) {
  return kind == RuleKind::kSafety ? "safety" : "guarantee";
}

std::optional<RuleKind> obligation_kind(const Formula& canonical) {
  if (canonical.kind() != Kind::kGlobally && canonical.kind() != Kind::kFinally) return std::nullopt;
  if (!propositional_with_next(canonical.child(0))) return std::nullopt;
  return canonical.kind() == Kind::kGlobally ? RuleKind::kSafety : RuleKind::kGuarantee;
}

}  // namespace mergeplan::ltlf
