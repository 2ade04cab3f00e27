#pragma once

#include <cstdint>
#include <vector>

namespace tracklink::flow {

/// Source/sink DAG whose nodes carry unit capacity and an optional cost.
///
/// Node ids are 0..node_count()-1. The terminals are addressed through
/// kSource / kSink in add_edge and are not counted as nodes.
class FlowGraph {
 public:
  static constexpr int kSource = -1;
  static constexpr int kSink = -2;

  struct Node {
    double cost = 0.0;
    bool must_cover = false;
  };
  struct Edge {
    int from = 0;
    int to = 0;
    double cost = 0.0;
  };

  int add_node(double cost = 0.0, bool must_cover = false);
  void add_edge(int from, int to, double cost);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

enum class Mode {
  free,       ///< any number of paths, minimum total cost
  cover_all,  ///< every must_cover node carries exactly one unit
};

enum class PathSearch {
  dijkstra_potentials,
  bellman_ford,
};

struct Solution {
  std::vector<std::vector<int>> paths;  ///< node ids, source and sink omitted
  double cost = 0.0;
};

/// Internal unit-capacity arc of the node-split graph.
struct Arc {
  int from = 0;
  int to = 0;
  double cost = 0.0;
  bool split = false;  ///< true for the v_in -> v_out arc of a node
  int node = -1;       ///< owning node of a split arc
};

/// Node-split form: node v becomes 2v (in) -> 2v+1 (out). The terminals sit at
/// vertex ids 2n (source) and 2n+1 (sink); node_count is the 2n split vertices.
struct SplitGraph {
  int node_count = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;
};

SplitGraph node_split(const FlowGraph& g);

/// Minimum-cost node-disjoint source->sink paths.
///
/// Free mode runs successive shortest paths and stops once the next augmenting
/// path has non-negative cost. Cover-all mode orders costs lexicographically by
/// (uncovered must_cover nodes, real cost), so the same augmentation first
/// maximizes coverage and then minimizes cost; a cover that leaves any
/// must_cover node empty is reported as infeasible.
///
/// Throws tracklink::Error on a cyclic graph, non-finite cost, or infeasible cover.
Solution solve_paths(const FlowGraph& g, Mode mode, PathSearch search = PathSearch::dijkstra_potentials);

}  // namespace tracklink::flow
