#include "tracklink/flow.hpp"

#include "tracklink/types.hpp"

#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <tuple>

namespace tracklink::flow {

int FlowGraph::add_node(double cost, bool must_cover) {
  if (!std::isfinite(cost)) throw Error("flow: node cost must be finite");
  nodes_.push_back({cost, must_cover});
  return static_cast<int>(nodes_.size()) - 1;
}

void FlowGraph::add_edge(int from, int to, double cost) {
  if (!std::isfinite(cost)) throw Error("flow: edge cost must be finite");
  const auto valid = [&](int v) { return v >= 0 && v < node_count(); };
  if (!(from == kSource || valid(from)) || !(to == kSink || valid(to))) {
    throw Error("flow: edge (" + std::to_string(from) + ", " + std::to_string(to) + ") has an invalid endpoint");
  }
  if (from == kSource && to == kSink) throw Error("flow: direct source->sink edges are not allowed");
  edges_.push_back({from, to, cost});
}

SplitGraph node_split(const FlowGraph& g) {
  SplitGraph s;
  const int n = g.node_count();
  s.node_count = 2 * n;
  s.source = 2 * n;
  s.sink = 2 * n + 1;
  s.arcs.reserve(g.nodes().size() + g.edges().size());
  for (int v = 0; v < n; ++v) {
    s.arcs.push_back({2 * v, 2 * v + 1, g.nodes()[static_cast<std::size_t>(v)].cost, true, v});
  }
  for (const auto& e : g.edges()) {
    const int from = e.from == FlowGraph::kSource ? s.source : 2 * e.from + 1;
    const int to = e.to == FlowGraph::kSink ? s.sink : 2 * e.to;
    s.arcs.push_back({from, to, e.cost, false, -1});
  }
  return s;
}

namespace {

// Lexicographic cost: coverage penalty first, real cost second.
struct LexCost {
  std::int64_t penalty = 0;
  double value = 0.0;

  LexCost operator+(const LexCost& o) const { return {penalty + o.penalty, value + o.value}; }
  LexCost operator-(const LexCost& o) const { return {penalty - o.penalty, value - o.value}; }
  LexCost operator-() const { return {-penalty, -value}; }
  bool operator<(const LexCost& o) const {
    return penalty != o.penalty ? penalty < o.penalty : value < o.value;
  }
  bool negative() const { return penalty != 0 ? penalty < 0 : value < 0.0; }
};

struct ResidualArc {
  int to = 0;
  int cap = 0;
  LexCost cost;
  int rev = 0;      // index of the paired arc in adj[to]
  int original = -1;  // index into SplitGraph::arcs for forward arcs
};

class Residual {
 public:
  Residual(const SplitGraph& s, const FlowGraph& g, Mode mode) : adj_(static_cast<std::size_t>(s.node_count + 2)) {
    for (std::size_t i = 0; i < s.arcs.size(); ++i) {
      const Arc& a = s.arcs[i];
      LexCost c{0, a.cost};
      if (mode == Mode::cover_all && a.split && g.nodes()[static_cast<std::size_t>(a.node)].must_cover) {
        c.penalty = -1;
      }
      auto& fwd = adj_[static_cast<std::size_t>(a.from)];
      auto& bwd = adj_[static_cast<std::size_t>(a.to)];
      fwd.push_back({a.to, 1, c, static_cast<int>(bwd.size()), static_cast<int>(i)});
      bwd.push_back({a.from, 0, -c, static_cast<int>(fwd.size()) - 1, -1});
    }
  }

  std::vector<std::vector<ResidualArc>>& adj() { return adj_; }
  int size() const { return static_cast<int>(adj_.size()); }

 private:
  std::vector<std::vector<ResidualArc>> adj_;
};

struct PathTree {
  std::vector<bool> reached;
  std::vector<LexCost> dist;
  std::vector<std::pair<int, int>> parent;  // (vertex, arc index in adj[vertex])
};

PathTree bellman_ford(Residual& r, int source) {
  const int n = r.size();
  PathTree t{std::vector<bool>(static_cast<std::size_t>(n), false), std::vector<LexCost>(static_cast<std::size_t>(n)),
             std::vector<std::pair<int, int>>(static_cast<std::size_t>(n), {-1, -1})};
  t.reached[static_cast<std::size_t>(source)] = true;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      if (!t.reached[static_cast<std::size_t>(u)]) continue;
      const auto& arcs = r.adj()[static_cast<std::size_t>(u)];
      for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
        const ResidualArc& a = arcs[static_cast<std::size_t>(k)];
        if (a.cap <= 0) continue;
        const LexCost cand = t.dist[static_cast<std::size_t>(u)] + a.cost;
        const auto v = static_cast<std::size_t>(a.to);
        if (!t.reached[v] || cand < t.dist[v]) {
          t.reached[v] = true;
          t.dist[v] = cand;
          t.parent[v] = {u, k};
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return t;
}

PathTree dijkstra(Residual& r, int source, const std::vector<LexCost>& potential) {
  const int n = r.size();
  PathTree t{std::vector<bool>(static_cast<std::size_t>(n), false), std::vector<LexCost>(static_cast<std::size_t>(n)),
             std::vector<std::pair<int, int>>(static_cast<std::size_t>(n), {-1, -1})};
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  using Item = std::pair<LexCost, int>;
  const auto greater = [](const Item& a, const Item& b) {
    if (a.first < b.first) return false;
    if (b.first < a.first) return true;
    return a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(greater)> queue(greater);
  t.reached[static_cast<std::size_t>(source)] = true;
  queue.push({LexCost{}, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (done[uu]) continue;
    done[uu] = true;
    const auto& arcs = r.adj()[uu];
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
      const ResidualArc& a = arcs[static_cast<std::size_t>(k)];
      if (a.cap <= 0) continue;
      const auto v = static_cast<std::size_t>(a.to);
      if (done[v]) continue;
      LexCost reduced = a.cost + potential[uu] - potential[v];
      if (reduced.penalty == 0 && reduced.value < 0.0) reduced.value = 0.0;  // rounding
      const LexCost cand = d + reduced;
      if (!t.reached[v] || cand < t.dist[v]) {
        t.reached[v] = true;
        t.dist[v] = cand;
        t.parent[v] = {u, k};
        queue.push({cand, a.to});
      }
    }
  }
  return t;
}

void check_acyclic(const FlowGraph& g) {
  const int n = g.node_count();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const auto& e : g.edges()) {
    if (e.from >= 0 && e.to >= 0) {
      out[static_cast<std::size_t>(e.from)].push_back(e.to);
      ++indegree[static_cast<std::size_t>(e.to)];
    }
  }
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (indegree[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
  }
  int visited = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++visited;
    for (const int w : out[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(w)] == 0) stack.push_back(w);
    }
  }
  if (visited != n) throw Error("flow: graph contains a cycle");
}

}  // namespace

Solution solve_paths(const FlowGraph& g, Mode mode, PathSearch search) {
  check_acyclic(g);
  const SplitGraph split = node_split(g);
  Residual residual(split, g, mode);

  std::vector<LexCost> potential(static_cast<std::size_t>(residual.size()));
  if (search == PathSearch::dijkstra_potentials) {
    const PathTree init = bellman_ford(residual, split.source);
    for (std::size_t v = 0; v < potential.size(); ++v) {
      if (init.reached[v]) potential[v] = init.dist[v];
    }
  }

  while (true) {
    const PathTree tree = search == PathSearch::dijkstra_potentials ? dijkstra(residual, split.source, potential)
                                                                    : bellman_ford(residual, split.source);
    const auto sink = static_cast<std::size_t>(split.sink);
    if (!tree.reached[sink]) break;

    // Exact path cost from the arcs themselves, independent of potential rounding.
    LexCost path_cost;
    for (int v = split.sink; v != split.source;) {
      const auto [u, k] = tree.parent[static_cast<std::size_t>(v)];
      path_cost = path_cost + residual.adj()[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)].cost;
      v = u;
    }
    if (!path_cost.negative()) break;

    for (int v = split.sink; v != split.source;) {
      const auto [u, k] = tree.parent[static_cast<std::size_t>(v)];
      ResidualArc& a = residual.adj()[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)];
      a.cap -= 1;
      residual.adj()[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.rev)].cap += 1;
      v = u;
    }
    if (search == PathSearch::dijkstra_potentials) {
      for (std::size_t v = 0; v < potential.size(); ++v) {
        if (tree.reached[v]) potential[v] = potential[v] + tree.dist[v];
      }
    }
  }

  // Flow of each original arc: its forward residual capacity dropped to zero.
  std::vector<bool> used(split.arcs.size(), false);
  for (const auto& arcs : residual.adj()) {
    for (const auto& a : arcs) {
      if (a.original >= 0 && a.cap == 0) used[static_cast<std::size_t>(a.original)] = true;
    }
  }

  Solution sol;
  std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(residual.size()));
  for (std::size_t i = 0; i < split.arcs.size(); ++i) {
    if (!used[i]) continue;
    sol.cost += split.arcs[i].cost;
    out_arcs[static_cast<std::size_t>(split.arcs[i].from)].push_back(static_cast<int>(i));
  }

  std::vector<int> missing;
  for (int v = 0; v < g.node_count(); ++v) {
    if (mode == Mode::cover_all && g.nodes()[static_cast<std::size_t>(v)].must_cover && !used[static_cast<std::size_t>(v)]) {
      missing.push_back(v);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const int v : missing) list += (list.empty() ? "" : ", ") + std::to_string(v);
    throw Error("flow: cannot cover nodes [" + list + "]");
  }

  for (const int first : out_arcs[static_cast<std::size_t>(split.source)]) {
    std::vector<int> path;
    int v = split.arcs[static_cast<std::size_t>(first)].to;
    while (v != split.sink) {
      path.push_back(v / 2);
      const int out_vertex = v + 1;  // in -> out
      const auto& next = out_arcs[static_cast<std::size_t>(out_vertex)];
      if (next.empty()) throw Error("flow: internal error, broken path");
      v = split.arcs[static_cast<std::size_t>(next.front())].to;
    }
    sol.paths.push_back(std::move(path));
  }
  return sol;
}

}  // namespace tracklink::flow
