#include "mergeplan/ltlf/dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace mergeplan::ltlf {

namespace {

const Formula& not_end() {
  static const Formula f = Formula::negation(Formula::end());
  return f;
}

template <class Truth>
Formula progress_impl(const Formula& f, const Truth& holds) {
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
      return f;
    case Kind::kAtom:
      return holds(f.name()) ? Formula::truth() : Formula::falsity();
    case Kind::kEnd:
      // A symbol was observed, so the suffix was not empty.
      return Formula::falsity();
    case Kind::kNot:
      if (f.child(0).kind() == Kind::kEnd) return Formula::truth();
      if (f.child(0).kind() == Kind::kAtom) {
        return holds(f.child(0).name()) ? Formula::falsity() : Formula::truth();
      }
      break;
    case Kind::kAnd:
    case Kind::kOr: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(progress_impl(c, holds));
      return f.kind() == Kind::kAnd ? make_and(std::move(cs)) : make_or(std::move(cs));
    }
    case Kind::kNext: {
      const Formula& body = f.child(0);
      return accepts_empty(body) ? make_and({body, not_end()}) : body;
    }
    case Kind::kWeakNext: {
      const Formula& body = f.child(0);
      return accepts_empty(body) ? body : make_or({body, Formula::end()});
    }
    case Kind::kUntil:
      return make_or({progress_impl(f.child(1), holds), make_and({progress_impl(f.child(0), holds), f})});
    case Kind::kRelease:
      return make_and({progress_impl(f.child(1), holds), make_or({progress_impl(f.child(0), holds), f})});
    case Kind::kGlobally:
      return make_and({progress_impl(f.child(0), holds), f});
    case Kind::kFinally:
      return make_or({progress_impl(f.child(0), holds), f});
    case Kind::kImplies:
      break;
  }
  throw std::invalid_argument("progress expects a canonical formula, got " + f.to_string());
}

// Prime-implicant cover of a guard, rendered as a DNF over the propositions.
std::string render_guard(Guard guard, const std::vector<std::string>& props) {
  const std::size_t n = props.size();
  const Guard full = n >= 6 ? ~Guard{0} : ((Guard{1} << (std::size_t{1} << n)) - 1);
  if (guard == full) return "true";
  if (guard == 0) return "false";

  // Cube = (value, care mask).
  using Cube = std::pair<Symbol, Symbol>;
  const Symbol all_care = (Symbol{1} << n) - 1;
  std::set<Cube> current;
  for (Symbol s = 0; s < (Symbol{1} << n); ++s) {
    if ((guard >> s) & 1U) current.insert({s, all_care});
  }
  std::set<Cube> primes;
  while (!current.empty()) {
    std::set<Cube> merged;
    std::set<Cube> used;
    for (auto a = current.begin(); a != current.end(); ++a) {
      for (auto b = std::next(a); b != current.end(); ++b) {
        if (a->second != b->second) continue;
        const Symbol diff = a->first ^ b->first;
        if (diff != 0 && (diff & (diff - 1)) == 0) {
          merged.insert({a->first & ~diff, a->second & ~diff});
          used.insert(*a);
          used.insert(*b);
        }
      }
    }
    for (const auto& c : current) {
      if (!used.count(c)) primes.insert(c);
    }
    current = std::move(merged);
  }

  auto covers = [](const Cube& c, Symbol s) { return (s & c.second) == c.first; };
  std::vector<Cube> chosen;
  Guard remaining = guard;
  while (remaining != 0) {
    const Cube* best = nullptr;
    int best_gain = -1;
    for (const auto& c : primes) {
      int gain = 0;
      for (Symbol s = 0; s < (Symbol{1} << n); ++s) {
        if (((remaining >> s) & 1U) && covers(c, s)) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = &c;
      }
    }
    chosen.push_back(*best);
    for (Symbol s = 0; s < (Symbol{1} << n); ++s) {
      if (covers(*best, s)) remaining &= ~(Guard{1} << s);
    }
  }

  std::string out;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    if (k > 0) out += " | ";
    std::string cube;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((chosen[k].second >> i) & 1U)) continue;
      if (!cube.empty()) cube += " & ";
      cube += (((chosen[k].first >> i) & 1U) ? "" : "!") + props[i];
    }
    out += cube.empty() ? "true" : cube;
  }
  return out;
}

}  // namespace

Formula progress(const Formula& f, std::span<const std::string> props, Symbol symbol) {
  return progress_impl(f, [&](const std::string& name) {
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i] == name) return ((symbol >> i) & 1U) != 0;
    }
    return false;
  });
}

Formula progress(const Formula& f, const std::vector<std::string>& true_props) {
  return progress_impl(f, [&](const std::string& name) {
    return std::find(true_props.begin(), true_props.end(), name) != true_props.end();
  });
}

bool accepts_empty(const Formula& f) {
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kEnd:
    case Kind::kWeakNext:
    case Kind::kRelease:
    case Kind::kGlobally:
      return true;
    case Kind::kFalse:
    case Kind::kAtom:
    case Kind::kNot:  // no literal holds on the empty suffix
    case Kind::kNext:
    case Kind::kUntil:
    case Kind::kFinally:
      return false;
    case Kind::kAnd:
      return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return accepts_empty(c); });
    case Kind::kOr:
      return std::any_of(f.children().begin(), f.children().end(), [](const Formula& c) { return accepts_empty(c); });
    case Kind::kImplies:
      break;
  }
  throw std::invalid_argument("accepts_empty expects a canonical formula, got " + f.to_string());
}

StateId Dfa::successor(StateId q, Symbol symbol) const {
  if (!table_.empty()) return table_[q * symbol_count() + symbol];
  for (const auto& e : edges_[q]) {
    if ((e.guard >> symbol) & 1U) return e.target;
  }
  return q;  // unreachable for a total automaton
}

std::optional<std::size_t> Dfa::prop_index(std::string_view name) const {
  for (std::size_t i = 0; i < props_.size(); ++i) {
    if (props_[i] == name) return i;
  }
  return std::nullopt;
}

void Dfa::finalize() {
  const std::size_t n = state_count();
  trap_.assign(n, false);
  for (std::size_t q = 0; q < n; ++q) {
    trap_[q] = !accepting_[q] && edges_[q].size() == 1 && edges_[q].front().target == q;
  }

  sink_.reset();
  if (accepting_[0]) {
    sink_ = 0;
  } else {
    for (std::size_t q = 0; q < n && !sink_; ++q) {
      if (accepting_[q] && edges_[q].size() == 1 && edges_[q].front().target == q) sink_ = static_cast<StateId>(q);
    }
    for (std::size_t q = 0; q < n && !sink_; ++q) {
      if (accepting_[q]) sink_ = static_cast<StateId>(q);
    }
  }

  table_.clear();
  if (props_.size() <= kDenseTableMaxProps) {
    table_.resize(n * symbol_count());
    for (std::size_t q = 0; q < n; ++q) {
      for (const auto& e : edges_[q]) {
        for (std::size_t s = 0; s < symbol_count(); ++s) {
          if ((e.guard >> s) & 1U) table_[q * symbol_count() + s] = e.target;
        }
      }
    }
  }
}

std::string Dfa::describe() const {
  std::ostringstream os;
  os << "props:";
  for (const auto& p : props_) os << ' ' << p;
  os << "\nstates: " << state_count() << "\n";
  for (std::size_t q = 0; q < state_count(); ++q) {
    os << "  q" << q << (q == 0 ? " (initial)" : "") << (accepting_[q] ? " (accepting)" : "")
       << (trap_[q] ? " (trap)" : "") << "  " << residuals_[q].to_string() << "\n";
    for (const auto& e : edges_[q]) {
      os << "    --[" << render_guard(e.guard, props_) << "]--> q" << e.target << "\n";
    }
  }
  return os.str();
}

Dfa compile_dfa(const Formula& f, std::vector<std::string> props) {
  if (props.size() > kMaxProps) {
    throw CompileError("proposition budget exceeded: " + std::to_string(props.size()) + " > " +
                       std::to_string(kMaxProps));
  }
  {
    auto sorted = props;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw CompileError("duplicate proposition in alphabet");
    }
  }
  for (const auto& a : atoms_of(f)) {
    if (std::find(props.begin(), props.end(), a) == props.end()) {
      throw CompileError("proposition '" + a + "' missing from alphabet");
    }
  }

  const Formula start = canonicalize(f);
  const std::size_t symbols = std::size_t{1} << props.size();

  // Residual exploration.
  std::map<Formula, std::size_t> index;
  std::vector<Formula> residuals{start};
  std::vector<std::vector<std::size_t>> succ;
  index.emplace(start, 0);
  for (std::size_t q = 0; q < residuals.size(); ++q) {
    std::vector<std::size_t> row(symbols);
    for (std::size_t s = 0; s < symbols; ++s) {
      Formula r = progress(residuals[q], props, static_cast<Symbol>(s));
      auto [it, inserted] = index.emplace(r, residuals.size());
      if (inserted) {
        if (residuals.size() >= kMaxStates) throw CompileError("automaton exceeds state budget");
        residuals.push_back(std::move(r));
      }
      row[s] = it->second;
    }
    succ.push_back(std::move(row));
  }

  // States that cannot reach acceptance any more all denote the empty language.
  const std::size_t raw_n = residuals.size();
  std::vector<bool> live(raw_n, false);
  for (std::size_t q = 0; q < raw_n; ++q) live[q] = accepts_empty(residuals[q]);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t q = 0; q < raw_n; ++q) {
      if (live[q]) continue;
      for (std::size_t t : succ[q]) {
        if (live[t]) {
          live[q] = true;
          changed = true;
          break;
        }
      }
    }
  }
  constexpr std::size_t kDead = static_cast<std::size_t>(-1);
  auto rep = [&](std::size_t q) { return live[q] ? q : kDead; };

  // Renumber in breadth-first order over the collapsed graph.
  std::map<std::size_t, StateId> renum;
  std::deque<std::size_t> queue{rep(0)};
  std::vector<std::size_t> order;
  renum.emplace(rep(0), 0);
  while (!queue.empty()) {
    const std::size_t q = queue.front();
    queue.pop_front();
    order.push_back(q);
    if (q == kDead) continue;
    for (std::size_t t : succ[q]) {
      if (renum.emplace(rep(t), static_cast<StateId>(renum.size())).second) queue.push_back(rep(t));
    }
  }

  Dfa dfa;
  dfa.props_ = std::move(props);
  for (std::size_t q : order) {
    const StateId id = renum.at(q);
    dfa.residuals_.push_back(q == kDead ? Formula::falsity() : residuals[q]);
    dfa.accepting_.push_back(q != kDead && accepts_empty(residuals[q]));
    std::vector<Edge> edges;
    for (std::size_t s = 0; s < symbols; ++s) {
      const StateId target = q == kDead ? id : renum.at(rep(succ[q][s]));
      auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.target == target; });
      if (it == edges.end()) {
        edges.push_back({Guard{1} << s, target});
      } else {
        it->guard |= Guard{1} << s;
      }
    }
    dfa.edges_.push_back(std::move(edges));
  }
  dfa.finalize();
  return dfa;
}

}  // namespace mergeplan::ltlf
