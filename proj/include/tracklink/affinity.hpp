#pragma once

#include "tracklink/config.hpp"
#include "tracklink/dynamics.hpp"
#include "tracklink/exit_map.hpp"
#include "tracklink/metric.hpp"
#include "tracklink/types.hpp"

#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tracklink::affinity {

/// Scores below this are treated as zero and produce no edge.
inline constexpr double kScoreFloor = 1e-12;
inline constexpr double kNoEdge = std::numeric_limits<double>::infinity();

/// d_ab: mean over a's detections of distance(metric_a, z_a^t, probe_b).
double mean_probe_distance(const Tracklet& a, const metric::TargetMetric& metric_a, const Eigen::VectorXd& probe_b);

/// d_ab * d_ba. Throws when a metric or probe is missing.
double appearance_product(const Tracklet& a, const Tracklet& b, const metric::MetricSet& metrics,
                          const metric::ProbeSet& probes);

/// gamma / product, or 1 when the product is 0.
double appearance_affinity(double product, double gamma);

/// Spatio-temporal gate: 1 when the tracklets share no frame.
int temporal_constraint(const Tracklet& a, const Tracklet& b);

/// Exit gate for the link from -> to: 1 when `to` starts after `from` ends and
/// from's last center lies outside the exit band.
int exit_constraint(const Tracklet& from, const Tracklet& to, const ExitMap& exit_map);

/// C = C_t * C_e for the link from -> to.
int limiting(const Tracklet& from, const Tracklet& to, const ExitMap& exit_map);

/// Ids of tracklets that overlap another by at least eta * min(area) at a frame
/// where either of the two starts or ends and both are present.
std::set<int> assess_difficult(std::span<const Tracklet> tracklets, const RunConfig& cfg);

/// 0 = unweighted, 1 = gap in [1, B1], 2 = gap > B1.
int weight_level(bool flagged, int gap, const RunConfig& cfg);

double level_lambda(int level, double lambda1, double lambda2);

/// P_m^lambda * P_a * C with 0^0 = 1. P_m is clamped into [0, 1]; -inf gives 0.
double fused_score(double p_m, double p_a, int limiting_value, double lambda);

/// Convenience form that picks lambda from the flag and gap.
double fused_score(double p_m, double p_a, int limiting_value, bool flagged, int gap, const RunConfig& cfg);

/// -log S, or kNoEdge when S < kScoreFloor.
double transition_cost(double score);

struct AffinityRow {
  int segment = 0;  ///< 0-based segment holding the end of `from`
  int from = 0;
  int to = 0;
  int gap = 0;
  double p_m = 0.0;
  double p_a = 1.0;
  int c_t = 0;
  int c_e = 0;
  int level = 0;
  double lambda = 1.0;
  double score = 0.0;
  double cost = kNoEdge;
};

struct AffinityTable {
  std::vector<AffinityRow> rows;
  std::set<int> flagged;
};

/// Scores every candidate pair. Appearance is constant 1 when metrics are empty
/// (appearance disabled). Gamma is taken per segment as the smallest positive
/// d_ab * d_ba among admissible rows, so the best pair in a segment reaches P_a = 1.
AffinityTable build_table(std::span<const Tracklet> tracklets, std::span<const std::pair<int, int>> candidates,
                          const metric::MetricSet& metrics, const metric::ProbeSet& probes,
                          const ExitMap& exit_map, const RunConfig& cfg);

/// Recomputes lambda, score and cost of every row for new level weights.
void rescore(AffinityTable& table, double lambda1, double lambda2);

/// One CSV line per row with a header.
std::string format_table(const AffinityTable& table);

}  // namespace tracklink::affinity
