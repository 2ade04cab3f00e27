#pragma once

#include "tracklink/affinity.hpp"
#include "tracklink/config.hpp"
#include "tracklink/exit_map.hpp"
#include "tracklink/metric.hpp"
#include "tracklink/types.hpp"

#include <vector>

namespace tracklink {

/// Everything computed before the global solve.
struct Prepared {
  ExitMap exit_map{1.0, 1.0, 0.05};
  bool appearance = false;             ///< false when disabled or features are missing
  std::vector<Tracklet> initial;       ///< flow-generated tracklets
  std::vector<Tracklet> reliable;      ///< after refinement, ids 1..n in (start, x, y) order
  metric::MetricSet metrics;           ///< reliable-phase metrics
  metric::ProbeSet probes;
  affinity::AffinityTable table;
};

/// Tracklet generation, refinement, second-step metrics and the affinity table.
Prepared prepare(const FrameDetections& detections, const RunConfig& cfg);

/// prepare followed by the whole-sequence association.
std::vector<Trajectory> track(const FrameDetections& detections, const RunConfig& cfg);

}  // namespace tracklink
