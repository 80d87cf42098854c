#pragma once

// Single-agent MCTS over vector rewards.
//
// The environment supplies
//   State                                   copyable search state
//   std::size_t action_count() const
//   std::size_t reward_dims() const
//   bool terminal(const State&) const
//   Step<State> step(const State&, std::size_t action) const
//   std::size_t rollout_action(const State&, Rng&) const
//
// Selection computes a UCT vector per action: every Q dimension is scaled to
// [0,1] with the node's running min/max of backed-up returns, the exploration
// bonus is added per element, and the thresholds are scaled alongside. The
// selected action is maximal under tlo_compare; ties are broken uniformly
// with the search generator. Unvisited actions are expanded first, in random
// order. Node visit counts follow N = sum_a N(s,a) + 1 for non-terminal nodes.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "mergeplan/mcts/reward.hpp"

namespace mergeplan::mcts {

using Rng = std::mt19937_64;

template <class State>
struct Step {
  State next;
  RewardVector reward;
  bool terminal = false;
};

template <class E>
concept Environment = requires(const E& e, const typename E::State& s, std::size_t a, Rng& rng) {
  { e.action_count() } -> std::convertible_to<std::size_t>;
  { e.reward_dims() } -> std::convertible_to<std::size_t>;
  { e.terminal(s) } -> std::convertible_to<bool>;
  { e.step(s, a) } -> std::same_as<Step<typename E::State>>;
  { e.rollout_action(s, rng) } -> std::convertible_to<std::size_t>;
};

struct TloParams {
  RewardVector thresholds;
  double exploration = 1.0;
  double discount = 0.95;
};

struct SearchStats {
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  std::size_t max_depth = 0;
};

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int32_t kNoChild = -1;

struct EdgeStats {
  std::int32_t child = kNoChild;
  std::uint32_t visits = 0;
  RewardVector q;
  RewardVector reward;
};

template <class State>
struct SearchNode {
  State state;
  bool terminal = false;
  std::size_t depth = 0;
  std::uint32_t visits = 0;
  std::vector<EdgeStats> edges;
  std::vector<std::uint8_t> untried;
  RewardVector lo;
  RewardVector hi;
};

// Index of an element chosen uniformly among `count`; draws only when count > 1.
inline std::size_t break_tie(std::size_t count, Rng& rng) {
  if (count <= 1) return 0;
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

// Among `candidates`, those maximal under tlo_compare of values[a]; values
// must be indexable by action.
template <class Values>
std::vector<std::size_t> maximal_set(const std::vector<std::size_t>& candidates, const Values& values,
                                     const RewardVector& tau) {
  std::vector<std::size_t> best;
  for (std::size_t a : candidates) {
    if (best.empty()) {
      best.push_back(a);
      continue;
    }
    switch (tlo_compare(values[best.front()], values[a], tau)) {
      case Ordering::kLess:
        best.assign(1, a);
        break;
      case Ordering::kEquivalent:
        best.push_back(a);
        break;
      case Ordering::kGreater:
        break;
    }
  }
  return best;
}

template <Environment Env>
class Mcts {
 public:
  using State = typename Env::State;
  using Node = SearchNode<State>;

  Mcts(const Env& env, TloParams params, std::uint64_t seed) : env_(env), params_(std::move(params)), rng_(seed) {
    if (params_.thresholds.size() != env_.reward_dims()) throw DimensionMismatch("threshold vector dimension");
    if (env_.action_count() == 0 || env_.action_count() > 255) throw SearchError("unsupported action count");
  }

  std::size_t plan(const State& root_state, std::size_t iterations) {
    if (env_.terminal(root_state)) throw SearchError("plan called on a terminal state");
    nodes_.clear();
    stats_ = {};
    make_node(root_state, false, 0);
    nodes_.front().visits = 1;
    for (std::size_t it = 0; it < iterations; ++it) iterate();
    stats_.iterations = iterations;
    stats_.nodes = nodes_.size();
    return best_root_action();
  }

  const SearchStats& stats() const { return stats_; }
  const Node& root() const { return nodes_.front(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  // UCT choice at a fully expanded node.
  std::size_t uct_select(const Node& node) {
    if (!node.untried.empty()) throw SearchError("uct_select on a node with untried actions");
    const std::size_t dims = env_.reward_dims();
    const double log_n = std::log(static_cast<double>(node.visits));
    std::vector<RewardVector> u(node.edges.size());
    std::vector<std::size_t> candidates;
    RewardVector tau(dims);
    for (std::size_t i = 0; i < dims; ++i) tau[i] = scaled_threshold(node, i);
    for (std::size_t a = 0; a < node.edges.size(); ++a) {
      const EdgeStats& e = node.edges[a];
      if (e.visits == 0) continue;
      const double bonus = params_.exploration * std::sqrt(log_n / e.visits);
      u[a] = RewardVector(dims);
      for (std::size_t i = 0; i < dims; ++i) u[a][i] = scaled(node, i, e.q[i]) + bonus;
      candidates.push_back(a);
    }
    if (candidates.empty()) throw SearchError("no visited action at an expanded node");
    const auto best = maximal_set(candidates, u, tau);
    return best[break_tie(best.size(), rng_)];
  }

 private:
  std::int32_t make_node(const State& s, bool terminal, std::size_t depth) {
    Node n;
    n.state = s;
    n.terminal = terminal;
    n.depth = depth;
    n.lo = RewardVector(env_.reward_dims(), std::numeric_limits<double>::infinity());
    n.hi = RewardVector(env_.reward_dims(), -std::numeric_limits<double>::infinity());
    if (!terminal) {
      n.edges.resize(env_.action_count());
      for (std::size_t a = 0; a < env_.action_count(); ++a) n.untried.push_back(static_cast<std::uint8_t>(a));
    }
    nodes_.push_back(std::move(n));
    if (depth > stats_.max_depth) stats_.max_depth = depth;
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  double scaled(const Node& n, std::size_t i, double x) const {
    const double span = n.hi[i] - n.lo[i];
    if (!(span > 0.0)) return 0.0;
    return (x - n.lo[i]) / span;
  }

  double scaled_threshold(const Node& n, std::size_t i) const {
    const double t = params_.thresholds[i];
    if (std::isinf(t)) return t;
    const double span = n.hi[i] - n.lo[i];
    if (!(span > 0.0)) {
      if (t < n.lo[i]) return -std::numeric_limits<double>::infinity();
      if (t > n.lo[i]) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    return (t - n.lo[i]) / span;
  }

  RewardVector rollout(const State& from) {
    RewardVector total(env_.reward_dims());
    if (env_.terminal(from)) return total;
    State s = from;
    double discount = 1.0;
    while (true) {
      Step<State> st = env_.step(s, env_.rollout_action(s, rng_));
      total += st.reward * discount;
      discount *= params_.discount;
      if (st.terminal) break;
      s = std::move(st.next);
    }
    return total;
  }

  void iterate() {
    path_.clear();
    std::int32_t current = 0;
    while (!nodes_[current].terminal && nodes_[current].untried.empty()) {
      const std::size_t a = uct_select(nodes_[current]);
      path_.push_back({current, a});
      current = nodes_[current].edges[a].child;
    }
    if (!nodes_[current].terminal) {
      Node& n = nodes_[current];
      const std::size_t pick = break_tie(n.untried.size(), rng_);
      const std::size_t a = n.untried[pick];
      n.untried[pick] = n.untried.back();
      n.untried.pop_back();
      Step<State> st = env_.step(n.state, a);
      const std::size_t depth = n.depth + 1;
      const bool terminal = st.terminal || env_.terminal(st.next);
      const std::int32_t child = make_node(st.next, terminal, depth);
      nodes_[current].edges[a].child = child;
      nodes_[current].edges[a].reward = st.reward;
      path_.push_back({current, a});
      current = child;
    }
    RewardVector g = nodes_[current].terminal ? RewardVector(env_.reward_dims()) : rollout(nodes_[current].state);
    nodes_[current].visits += 1;
    for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
      Node& n = nodes_[it->first];
      EdgeStats& e = n.edges[it->second];
      g = e.reward + g * params_.discount;
      e.visits += 1;
      if (e.visits == 1) {
        e.q = g;
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) e.q[i] += (g[i] - e.q[i]) / e.visits;
      }
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < n.lo[i]) n.lo[i] = g[i];
        if (g[i] > n.hi[i]) n.hi[i] = g[i];
      }
      n.visits += 1;
    }
  }

  std::size_t best_root_action() {
    const Node& r = nodes_.front();
    std::vector<std::size_t> candidates;
    std::vector<RewardVector> q(r.edges.size());
    for (std::size_t a = 0; a < r.edges.size(); ++a) {
      if (r.edges[a].visits == 0) continue;
      q[a] = r.edges[a].q;
      candidates.push_back(a);
    }
    if (candidates.empty()) throw SearchError("no legal action");
    const auto best = maximal_set(candidates, q, params_.thresholds);
    return best[break_tie(best.size(), rng_)];
  }

  const Env& env_;
  TloParams params_;
  Rng rng_;
  std::vector<Node> nodes_;
  std::vector<std::pair<std::int32_t, std::size_t>> path_;
  SearchStats stats_;
};

}  // namespace mergeplan::mcts
