#pragma once

// Reference semantics for finite-trace formulas, written directly from the
// textbook definitions and independent of progression/compilation.
//
// A trace is a sequence of symbols over a proposition list; bit i of a symbol
// means props[i] holds. Evaluation is at positions i < n with strong Next.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mergeplan/ltlf/formula.hpp"

namespace oracle {

using mergeplan::ltlf::Formula;
using mergeplan::ltlf::Kind;
using Trace = std::vector<std::uint32_t>;

inline bool atom_holds(const std::vector<std::string>& props, std::uint32_t sym, const std::string& name) {
  for (std::size_t k = 0; k < props.size(); ++k) {
    if (props[k] == name) return (sym >> k) & 1U;
  }
  return false;
}

// f at position i of t, 0 <= i < |t|.
inline bool eval(const Formula& f, const Trace& t, std::size_t i, const std::vector<std::string>& props) {
  const std::size_t n = t.size();
  switch (f.kind()) {
    case Kind::kTrue: return true;
    case Kind::kFalse: return false;
    case Kind::kAtom: return atom_holds(props, t[i], f.name());
    case Kind::kEnd: return false;
    case Kind::kNot: return !eval(f.child(0), t, i, props);
    case Kind::kAnd:
      for (const auto& c : f.children()) if (!eval(c, t, i, props)) return false;
      return true;
    case Kind::kOr:
      for (const auto& c : f.children()) if (eval(c, t, i, props)) return true;
      return false;
    case Kind::kImplies: return !eval(f.child(0), t, i, props) || eval(f.child(1), t, i, props);
    case Kind::kNext: return i + 1 < n && eval(f.child(0), t, i + 1, props);
    case Kind::kWeakNext: return i + 1 >= n || eval(f.child(0), t, i + 1, props);
    case Kind::kUntil:
      for (std::size_t j = i; j < n; ++j) {
        if (eval(f.child(1), t, j, props)) return true;
        if (!eval(f.child(0), t, j, props)) return false;
      }
      return false;
    case Kind::kRelease:
      for (std::size_t j = i; j < n; ++j) {
        if (!eval(f.child(1), t, j, props)) return false;
        if (eval(f.child(0), t, j, props)) return true;
      }
      return true;
    case Kind::kGlobally:
      for (std::size_t j = i; j < n; ++j) if (!eval(f.child(0), t, j, props)) return false;
      return true;
    case Kind::kFinally:
      for (std::size_t j = i; j < n; ++j) if (eval(f.child(0), t, j, props)) return true;
      return false;
  }
  return false;
}

// Empty trace: universal operators hold, existential ones and literals do not.
inline bool eval_empty(const Formula& f) {
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kGlobally:
    case Kind::kRelease:
    case Kind::kWeakNext:
      return true;
    case Kind::kAnd:
      for (const auto& c : f.children()) if (!eval_empty(c)) return false;
      return true;
    case Kind::kOr:
      for (const auto& c : f.children()) if (eval_empty(c)) return true;
      return false;
    default:
      return false;
  }
}

inline bool satisfies(const Formula& f, const Trace& t, const std::vector<std::string>& props) {
  return t.empty() ? eval_empty(f) : eval(f, t, 0, props);
}

// All traces of exactly `len` symbols over `nprops` propositions.
inline std::vector<Trace> all_traces(std::size_t len, std::size_t nprops) {
  std::vector<Trace> out{Trace{}};
  for (std::size_t k = 0; k < len; ++k) {
    std::vector<Trace> next;
    for (const auto& t : out) {
      for (std::uint32_t s = 0; s < (1U << nprops); ++s) {
        auto u = t;
        u.push_back(s);
        next.push_back(std::move(u));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Number of Myhill-Nerode classes among prefixes of length <= max_prefix,
// told apart by suffixes of length <= max_suffix.
inline std::size_t residual_classes(const Formula& f, const std::vector<std::string>& props, std::size_t max_prefix,
                                    std::size_t max_suffix) {
  std::vector<Trace> suffixes;
  for (std::size_t l = 0; l <= max_suffix; ++l) {
    for (auto& t : all_traces(l, props.size())) suffixes.push_back(std::move(t));
  }
  std::set<std::vector<bool>> classes;
  for (std::size_t l = 0; l <= max_prefix; ++l) {
    for (const auto& u : all_traces(l, props.size())) {
      std::vector<bool> sig;
      for (const auto& v : suffixes) {
        Trace uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        sig.push_back(satisfies(f, uv, props));
      }
      classes.insert(std::move(sig));
    }
  }
  return classes.size();
}

// Safety oracle for G p: split the trace at every bad prefix (a prefix no
// continuation can extend into a model of G p) and count the pieces that
// ended that way. p only looks d = next_depth(p) steps ahead, so whether a
// continuation exists depends only on the last d symbols of the current piece.
class SafetySplitter {
 public:
  SafetySplitter(Formula body, std::vector<std::string> props)
      : p_(std::move(body)), props_(std::move(props)), d_(static_cast<std::size_t>(p_.next_depth())) {
    std::vector<Trace> tails;
    for (std::size_t l = 0; l <= d_; ++l) {
      for (auto& t : all_traces(l, props_.size())) tails.push_back(std::move(t));
    }
    for (const auto& t : tails) good_[t] = false;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& t : tails) {
        if (good_[t]) continue;
        bool g = end_ok(t);
        for (std::uint32_t s = 0; !g && s < (1U << props_.size()); ++s) {
          auto [ok, next] = push(t, s);
          g = ok && good_.at(next);
        }
        if (g) {
          good_[t] = true;
          changed = true;
        }
      }
    }
  }

  int count(const Trace& trace) const {
    int violations = 0;
    Trace tail;
    for (auto s : trace) {
      auto [ok, next] = push(tail, s);
      if (!ok || !good_.at(next)) {
        ++violations;
        tail.clear();
      } else {
        tail = std::move(next);
      }
    }
    return violations;
  }

 private:
  // Append s; if the oldest pending position now has its full look-ahead
  // window, check it and drop it.
  std::pair<bool, Trace> push(const Trace& tail, std::uint32_t s) const {
    Trace w = tail;
    w.push_back(s);
    if (w.size() < d_ + 1) return {true, w};
    const bool ok = eval(p_, w, 0, props_);
    w.erase(w.begin());
    return {ok, w};
  }

  // Trace stops here: every pending position must hold on what is left.
  bool end_ok(const Trace& tail) const {
    for (std::size_t k = 0; k < tail.size(); ++k) {
      if (!eval(p_, tail, k, props_)) return false;
    }
    return true;
  }

  Formula p_;
  std::vector<std::string> props_;
  std::size_t d_;
  std::map<Trace, bool> good_;
};

// Random raw formula over `atoms` using atoms, constants, !, &, |, ->, X, N.
inline Formula random_body(std::mt19937_64& rng, const std::vector<std::string>& atoms, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  const int op = pick(rng);
  auto sub = [&] { return random_body(rng, atoms, depth - 1); };
  switch (op) {
    case 0:
    case 1: {
      std::uniform_int_distribution<std::size_t> a(0, atoms.size() - 1);
      std::uniform_int_distribution<int> c(0, 19);
      const int roll = c(rng);
      if (roll == 0) return Formula::truth();
      if (roll == 1) return Formula::falsity();
      return Formula::atom(atoms[a(rng)]);
    }
    case 2: return Formula::negation(sub());
    case 3: return Formula::conjunction({sub(), sub()});
    case 4: return Formula::disjunction({sub(), sub()});
    case 5: return Formula::implication(sub(), sub());
    case 6:
    case 7: return Formula::next(sub());
    default: return Formula::weak_next(sub());
  }
}

}  // namespace oracle
