#pragma once

#include "tracklink/flow.hpp"

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace tracklink::test {

// Exhaustive oracle: every node picks a successor (unused, sink, or a graph
// successor); a choice is valid when each used node has exactly one
// predecessor (source or another node). Returns nullopt when no valid choice
// covers all must_cover nodes.
inline std::optional<double> brute_force(const flow::FlowGraph& g, flow::Mode mode) {
  const int n = g.node_count();
  constexpr int kUnused = -3;
  std::vector<std::vector<std::pair<int, double>>> options(static_cast<std::size_t>(n));
  std::vector<std::optional<double>> entry(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) options[static_cast<std::size_t>(v)].push_back({kUnused, 0.0});
  for (const auto& e : g.edges()) {
    if (e.from == flow::FlowGraph::kSource) {
      entry[static_cast<std::size_t>(e.to)] = e.cost;
    } else {
      options[static_cast<std::size_t>(e.from)].push_back({e.to, e.cost});
    }
  }
  std::optional<double> best;
  std::vector<int> succ(static_cast<std::size_t>(n));
  double acc = 0.0;
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      std::vector<int> preds(static_cast<std::size_t>(n), 0);
      for (int u = 0; u < n; ++u) {
        const int s = succ[static_cast<std::size_t>(u)];
        if (s >= 0) ++preds[static_cast<std::size_t>(s)];
      }
      double total = acc;
      for (int u = 0; u < n; ++u) {
        const bool used = succ[static_cast<std::size_t>(u)] != kUnused;
        const int p = preds[static_cast<std::size_t>(u)];
        if (!used) {
          if (p > 0) return;
          if (mode == flow::Mode::cover_all && g.nodes()[static_cast<std::size_t>(u)].must_cover) return;
          continue;
        }
        if (p > 1) return;
        if (p == 0) {
          if (!entry[static_cast<std::size_t>(u)]) return;
          total += *entry[static_cast<std::size_t>(u)];
        }
        total += g.nodes()[static_cast<std::size_t>(u)].cost;
      }
      if (!best || total < *best) best = total;
      return;
    }
    for (const auto& [s, c] : options[static_cast<std::size_t>(v)]) {
      succ[static_cast<std::size_t>(v)] = s;
      acc += c;
      rec(v + 1);
      acc -= c;
    }
  };
  rec(0);
  if (!best) best = mode == flow::Mode::free ? std::optional<double>(0.0) : std::nullopt;
  return best;
}

// Costs are multiples of 1/64 in [-2, 2], so every sum is exact in double.
inline double dyadic(std::mt19937_64& rng) {
  return static_cast<double>(std::uniform_int_distribution<int>(-128, 128)(rng)) / 64.0;
}

inline flow::FlowGraph random_dag(std::mt19937_64& rng, bool all_terminals) {
  flow::FlowGraph g;
  const int n = std::uniform_int_distribution<int>(1, 8)(rng);
  std::bernoulli_distribution coin(0.4);
  std::bernoulli_distribution terminal(0.8);
  for (int v = 0; v < n; ++v) g.add_node(coin(rng) ? dyadic(rng) : 0.0, coin(rng) || coin(rng));
  for (int v = 0; v < n; ++v) {
    if (all_terminals || terminal(rng)) g.add_edge(flow::FlowGraph::kSource, v, dyadic(rng));
    if (all_terminals || terminal(rng)) g.add_edge(v, flow::FlowGraph::kSink, dyadic(rng));
    for (int u = v + 1; u < n; ++u) {
      if (coin(rng)) g.add_edge(v, u, dyadic(rng));
    }
  }
  return g;
}

}  // namespace tracklink::test
