#pragma once

#include "tracklink/affinity.hpp"
#include "tracklink/config.hpp"
#include "tracklink/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace tracklink {

/// Minimum-cost assignment on a rectangular matrix. Returns, per row, the
/// assigned column or -1 (only when rows outnumber columns).
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

struct MetricReport {
  double mota = 0.0;
  double motp = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double faf = 0.0;  ///< false alarms per frame
  int gt = 0;        ///< ground-truth trajectories
  int mt = 0;
  int pt = 0;
  int ml = 0;
  int frag = 0;
  int ids = 0;
  int matched_count = 0;
  int false_negatives = 0;
  int false_positives = 0;
  int gt_detections = 0;
  int frames = 0;
  double ids_per_match = 0.0;
};

/// CLEAR MOT scoring at IoU > 0.5. Matches from the previous frame are kept while
/// they still clear the threshold; the rest are assigned by maximum total IoU.
/// MT / ML use 80% / 20% coverage. Throws on empty ground truth.
MetricReport evaluate(const TrackSet& result, const TrackSet& ground_truth);

std::string format_report(const MetricReport& r);
std::string format_report_json(const MetricReport& r);

struct WeightSweepPoint {
  int level = 1;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mota = 0.0;
  int ids = 0;
};

struct WeightResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  MetricReport report;  ///< at the returned pair
  std::vector<WeightSweepPoint> sweep;  ///< one entry per association solve
};

/// Greedy two-level grid search over {0, 0.1, ..., 1}: level 1 first with
/// lambda2 = 0, then level 2 with the chosen lambda1. A value replaces the
/// incumbent only on strictly higher MOTA, or equal MOTA with fewer ID switches.
WeightResult learn_weights(std::span<const Tracklet> tracklets, affinity::AffinityTable table,
                           const TrackSet& ground_truth, const RunConfig& cfg);

}  // namespace tracklink
