#pragma once

#include "tracklink/config.hpp"
#include "tracklink/flow.hpp"
#include "tracklink/types.hpp"

#include <vector>

namespace tracklink {

/// Observation cost of a detection: -log(score / (1 - score)). Requires 0 < score < 1.
double detection_cost(double score);

/// True when two detections one frame apart may be chained.
bool within_gate(const Box& earlier, const Box& later);

/// Detection-level flow network used to build initial tracklets.
struct GenerationGraph {
  flow::FlowGraph graph;
  std::vector<Detection> nodes;  ///< node id -> detection
};

/// Nodes are detections scoring above cfg.det_threshold; edges join gated
/// detections in consecutive frames at zero cost; entry and exit cost -log(eps).
GenerationGraph build_generation_graph(const FrameDetections& detections, const RunConfig& cfg);

/// Result of the greedy stage-wise extraction, before short chains are dropped.
struct ChainSet {
  std::vector<std::vector<int>> chains;  ///< node ids of GenerationGraph
  double cost = 0.0;
};

/// Repeatedly extracts the cheapest source->sink chain by dynamic programming over
/// frames, removing its nodes, while that chain has negative cost.
ChainSet extract_chains(const GenerationGraph& g, const RunConfig& cfg);

/// Initial tracklets: extracted chains of length >= 2, ids 1..n in (start, x, y) order.
std::vector<Tracklet> generate_initial_tracklets(const FrameDetections& detections, const RunConfig& cfg);

}  // namespace tracklink
