#pragma once

// Formula progression and DFA construction.
//
// progress(f, symbol) is the residual obligation the rest of the trace must
// satisfy after `symbol` has been observed; accepts_empty(f) says whether a
// trace that stops right here satisfies f. compile_dfa() explores residuals
// breadth-first from the initial formula, one state per distinct canonical
// residual, and finally folds every state that can no longer reach an
// accepting state into one non-accepting trap.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mergeplan/ltlf/formula.hpp"

namespace mergeplan::ltlf {

using StateId = std::uint16_t;
// Bit i set <=> props()[i] holds. At most kMaxProps propositions.
using Symbol = std::uint32_t;
// Bit s set <=> the edge is taken on symbol s.
using Guard = std::uint64_t;

inline constexpr std::size_t kMaxProps = 6;
inline constexpr std::size_t kMaxStates = 4096;
inline constexpr std::size_t kDenseTableMaxProps = 4;

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symbol over `props`: bit i is set iff props[i] is in `true_props`.
Formula progress(const Formula& f, std::span<const std::string> props, Symbol symbol);
Formula progress(const Formula& f, const std::vector<std::string>& true_props);
bool accepts_empty(const Formula& f);

struct Edge {
  Guard guard;
  StateId target;
};

class Dfa {
 public:
  const std::vector<std::string>& props() const { return props_; }
  std::size_t state_count() const { return accepting_.size(); }
  std::size_t symbol_count() const { return std::size_t{1} << props_.size(); }
  StateId initial() const { return 0; }
  bool accepting(StateId q) const { return accepting_[q]; }
  const std::vector<Edge>& edges(StateId q) const { return edges_[q]; }
  // Canonical residual formula the state stands for. The folded trap is `false`.
  const Formula& residual(StateId q) const { return residuals_[q]; }
  bool has_dense_table() const { return !table_.empty(); }

  StateId successor(StateId q, Symbol symbol) const;

  // Non-accepting state whose every edge loops back to itself.
  bool is_trap(StateId q) const { return trap_[q]; }

  // The accepting state a freshly reset monitor is parked in when the trace
  // ends: the initial state when it accepts, otherwise the first accepting
  // all-loop state, otherwise the first accepting state.
  std::optional<StateId> accepting_sink() const { return sink_; }

  // Position of `name` in props(), or nullopt.
  std::optional<std::size_t> prop_index(std::string_view name) const;

  std::string describe() const;

 private:
  friend Dfa compile_dfa(const Formula&, std::vector<std::string>);

  void finalize();

  std::vector<std::string> props_;
  std::vector<Formula> residuals_;
  std::vector<bool> accepting_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<StateId> table_;
  std::vector<bool> trap_;
  std::optional<StateId> sink_;
};

// `props` must contain every atom of f (extra propositions are allowed).
Dfa compile_dfa(const Formula& f, std::vector<std::string> props);

}  // namespace mergeplan::ltlf
