#include "tracklink/tracklet_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace tracklink {

double detection_cost(double score) {
  if (!(score > 0.0 && score < 1.0)) {
    throw Error("detection score " + std::to_string(score) + " outside (0,1)");
  }
  return -std::log(score / (1.0 - score));
}

bool within_gate(const Box& earlier, const Box& later) {
  return (earlier.center() - later.center()).norm() < 0.5 * (earlier.w + later.w);
}

GenerationGraph build_generation_graph(const FrameDetections& detections, const RunConfig& cfg) {
  GenerationGraph g;
  const double terminal = -std::log(cfg.entry_exit_prob);
  std::vector<int> previous;
  int previous_frame = std::numeric_limits<int>::min();
  for (const auto& [frame, dets] : detections) {
    std::vector<int> current;
    for (const auto& d : dets) {
      if (!(d.score > cfg.det_threshold)) continue;
      const int id = g.graph.add_node(detection_cost(d.score));
      g.nodes.push_back(d);
      g.graph.add_edge(flow::FlowGraph::kSource, id, terminal);
      g.graph.add_edge(id, flow::FlowGraph::kSink, terminal);
      current.push_back(id);
    }
    if (frame == previous_frame + 1) {
      for (const int u : previous) {
        for (const int v : current) {
          if (within_gate(g.nodes[static_cast<std::size_t>(u)].box, g.nodes[static_cast<std::size_t>(v)].box)) {
            g.graph.add_edge(u, v, 0.0);
          }
        }
      }
    }
    previous = std::move(current);
    previous_frame = frame;
  }
  return g;
}

ChainSet extract_chains(const GenerationGraph& g, const RunConfig& cfg) {
  const int n = g.graph.node_count();
  const double terminal = -std::log(cfg.entry_exit_prob);

  // Predecessor lists; node ids already follow frame order.
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(n));
  for (const auto& e : g.graph.edges()) {
    if (e.from >= 0 && e.to >= 0) preds[static_cast<std::size_t>(e.to)].push_back(e.from);
  }

  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  std::vector<double> best(static_cast<std::size_t>(n));
  std::vector<int> parent(static_cast<std::size_t>(n));
  ChainSet out;
  while (true) {
    int best_end = -1;
    double best_cost = 0.0;
    for (int v = 0; v < n; ++v) {
      const auto vv = static_cast<std::size_t>(v);
      if (!alive[vv]) continue;
      double incoming = terminal;
      parent[vv] = -1;
      for (const int u : preds[vv]) {
        if (alive[static_cast<std::size_t>(u)] && best[static_cast<std::size_t>(u)] < incoming) {
          incoming = best[static_cast<std::size_t>(u)];
          parent[vv] = u;
        }
      }
      best[vv] = g.graph.nodes()[vv].cost + incoming;
      const double total = best[vv] + terminal;
      if (total < best_cost) {
        best_cost = total;
        best_end = v;
      }
    }
    if (best_end < 0) break;
    std::vector<int> chain;
    for (int v = best_end; v >= 0; v = parent[static_cast<std::size_t>(v)]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    for (const int v : chain) alive[static_cast<std::size_t>(v)] = false;
    out.cost += best_cost;
    out.chains.push_back(std::move(chain));
  }
  return out;
}

std::vector<Tracklet> generate_initial_tracklets(const FrameDetections& detections, const RunConfig& cfg) {
  const GenerationGraph g = build_generation_graph(detections, cfg);
  const ChainSet chains = extract_chains(g, cfg);
  std::vector<Tracklet> out;
  for (const auto& chain : chains.chains) {
    if (chain.size() < 2) continue;
    Tracklet t;
    for (const int v : chain) t.detections.push_back(g.nodes[static_cast<std::size_t>(v)]);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](const Tracklet& a, const Tracklet& b) {
    const Box& ba = a.detections.front().box;
    const Box& bb = b.detections.front().box;
    return std::make_tuple(a.start(), ba.x, ba.y) < std::make_tuple(b.start(), bb.x, bb.y);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i) + 1;
  return out;
}

}  // namespace tracklink
