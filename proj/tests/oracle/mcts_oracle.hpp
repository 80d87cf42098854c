#pragma once

// Scalar UCT written as a plain recursive search over doubles. It mirrors the
// random draws of the vector planner (expansion order, tie breaks, rollout
// actions) so that with one reward dimension both must agree exactly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

template <class Env>
class ScalarUct {
 public:
  using State = typename Env::State;
  using Rng = std::mt19937_64;

  struct Node {
    State state;
    bool terminal = false;
    double visits = 0;
    std::vector<int> child;
    std::vector<double> n;
    std::vector<double> q;
    std::vector<double> r;
    std::vector<std::size_t> untried;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
  };

  ScalarUct(const Env& env, double c, double gamma, std::uint64_t seed) : env_(env), c_(c), gamma_(gamma), rng_(seed) {}

  std::size_t plan(const State& root, std::size_t iterations) {
    nodes_.clear();
    add(root, false);
    nodes_[0].visits = 1;
    for (std::size_t i = 0; i < iterations; ++i) simulate(0);
    std::vector<std::size_t> best;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nodes_[0].n.size(); ++a) {
      if (nodes_[0].n[a] == 0) continue;
      if (nodes_[0].q[a] > top) {
        top = nodes_[0].q[a];
        best.assign(1, a);
      } else if (nodes_[0].q[a] == top) {
        best.push_back(a);
      }
    }
    return best[pick(best.size())];
  }

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::size_t pick(std::size_t count) {
    if (count < 2) return 0;
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng_);
  }

  int add(const State& s, bool terminal) {
    Node n;
    n.state = s;
    n.terminal = terminal;
    if (!terminal) {
      const std::size_t k = env_.action_count();
      n.child.assign(k, -1);
      n.n.assign(k, 0);
      n.q.assign(k, 0);
      n.r.assign(k, 0);
      for (std::size_t a = 0; a < k; ++a) n.untried.push_back(a);
    }
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  double rollout(State s) {
    double total = 0, weight = 1;
    if (env_.terminal(s)) return 0;
    for (;;) {
      auto st = env_.step(s, env_.rollout_action(s, rng_));
      total += weight * st.reward[0];
      weight *= gamma_;
      if (st.terminal) return total;
      s = st.next;
    }
  }

  std::size_t select(int id) {
    const Node& nd = nodes_[id];
    const double span = nd.hi - nd.lo;
    std::vector<std::size_t> best;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nd.n.size(); ++a) {
      if (nd.n[a] == 0) continue;
      const double mean = span > 0 ? (nd.q[a] - nd.lo) / span : 0.0;
      const double u = mean + c_ * std::sqrt(std::log(nd.visits) / nd.n[a]);
      if (u > top) {
        top = u;
        best.assign(1, a);
      } else if (u == top) {
        best.push_back(a);
      }
    }
    return best[pick(best.size())];
  }

  void record(int id, std::size_t a, double g) {
    Node& nd = nodes_[id];
    nd.n[a] += 1;
    nd.q[a] = nd.n[a] == 1 ? g : nd.q[a] + (g - nd.q[a]) / nd.n[a];
    nd.lo = std::min(nd.lo, g);
    nd.hi = std::max(nd.hi, g);
    nd.visits += 1;
  }

  // Return of one simulation through node `id`, seen from its parent edge.
  double simulate(int id) {
    if (nodes_[id].terminal) {
      nodes_[id].visits += 1;
      return 0;
    }
    if (!nodes_[id].untried.empty()) {
      auto& untried = nodes_[id].untried;
      const std::size_t k = pick(untried.size());
      const std::size_t a = untried[k];
      untried[k] = untried.back();
      untried.pop_back();
      auto st = env_.step(nodes_[id].state, a);
      const bool terminal = st.terminal || env_.terminal(st.next);
      const int c = add(st.next, terminal);
      nodes_[id].child[a] = c;
      nodes_[id].r[a] = st.reward[0];
      const double below = terminal ? 0.0 : rollout(nodes_[c].state);
      nodes_[c].visits += 1;
      const double g = nodes_[id].r[a] + gamma_ * below;
      record(id, a, g);
      return g;
    }
    const std::size_t a = select(id);
    const double g = nodes_[id].r[a] + gamma_ * simulate(nodes_[id].child[a]);
    record(id, a, g);
    return g;
  }

  const Env& env_;
  double c_;
  double gamma_;
  Rng rng_;
  std::vector<Node> nodes_;
};

}  // namespace oracle
