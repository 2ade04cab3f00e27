#pragma once

#include "tracklink/config.hpp"
#include "tracklink/exit_map.hpp"
#include "tracklink/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace tracklink::metric {

/// Per-tracklet Mahalanobis metric M = W W^T with pairwise orthogonal columns.
struct TargetMetric {
  int tracklet_id = 0;
  Eigen::MatrixXd W;               ///< feature_dim x r, r >= 1
  double loss = 0.0;               ///< summed logistic loss at W
  std::vector<double> loss_trace;  ///< loss before learning, then after every accepted step
  double split_threshold = 0.0;    ///< calibrated distance above which a detection is an outlier

  int rank() const { return static_cast<int>(W.cols()); }
};

/// Absolute feature differences of same-identity (positive) and
/// different-identity (negative) sample pairs.
struct PairSet {
  std::vector<Eigen::VectorXd> positives;
  std::vector<Eigen::VectorXd> negatives;
};

/// Tracklet id -> probe feature.
using ProbeSet = std::map<int, Eigen::VectorXd>;

using MetricSet = std::map<int, TargetMetric>;

enum class SamplePhase {
  initial,   ///< samples come from the first probe_window frames
  reliable,  ///< samples come from the whole tracklet
};

/// Indices of the strongest_q highest-scoring detections within the phase window
/// (ties broken by earlier frame), returned in frame order.
std::vector<std::size_t> strongest_samples(const Tracklet& t, SamplePhase phase, const RunConfig& cfg);

/// True when samples of a and b must belong to different people: they co-exist
/// in time, or the earlier one left through the exit band before the later one
/// appeared. In the initial phase co-existence is judged on the first
/// probe_window frames only, the part of each tracklet trusted to hold one identity.
bool distinct_targets(const Tracklet& a, const Tracklet& b, SamplePhase phase, const RunConfig& cfg,
                      const ExitMap& exit_map);

/// Positive pairs over the target's samples, negative pairs against every
/// other tracklet that satisfies distinct_targets.
PairSet collect_pairs(const Tracklet& target, std::span<const Tracklet> others, SamplePhase phase,
                      const RunConfig& cfg, const ExitMap& exit_map);

/// Greedy orthogonal-column minimization of
///   sum over (p, n) of log(1 + exp(|W^T x_p|^2 - |W^T x_n|^2)).
///
/// Pairs are the Cartesian product of positives and negatives, subsampled to
/// cfg.pair_cap with `seed`. Each column starts from the dominant eigenvector of
/// sum(x_n x_n^T) - sum(x_p x_p^T) restricted to the orthogonal complement of the
/// earlier columns and is refined by projected gradient descent with Armijo
/// backtracking. Columns stop when the relative loss gain drops below 1e-4 or at
/// min(feature_dim, cfg.max_columns). The first column is always kept.
///
/// Throws on an empty side or a non-finite loss. The returned W is unscaled and
/// split_threshold is left unset; see calibrate.
TargetMetric learn_metric(const PairSet& pairs, const RunConfig& cfg, std::uint64_t seed);

/// Identity metric over the given dimension, used when no negative pairs exist.
TargetMetric identity_metric(int feature_dim);

/// |W^T |a - b||^2.
double distance(const TargetMetric& m, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Strongest detection within the first probe_window frames; ties go to the earliest frame.
ProbeSet build_probe_set(std::span<const Tracklet> tracklets, const RunConfig& cfg);

/// The logistic loss has no scale anchor (on separable pairs it keeps falling as
/// W grows), so a learned W is rescaled to make the median same-identity distance
/// 1: the reference sample is every detection pair inside the probe window of each
/// tracklet in `group`. split_threshold becomes
/// cfg.distance_threshold when set (in these units), else median + split_iqr_gain * IQR
/// of the rescaled reference sample.
void calibrate(TargetMetric& m, std::span<const Tracklet* const> group, const RunConfig& cfg);

/// Learns and calibrates one metric per tracklet that carries features. Negatives come from
/// tracklets that intersect the target's local segment.
MetricSet learn_metrics(std::span<const Tracklet> tracklets, SamplePhase phase, const RunConfig& cfg,
                        const ExitMap& exit_map);

/// One refinement pass: a tracklet is cut before the first run of split_run
/// consecutive detections farther than its split_threshold from its probe; frames
/// next to the cut go to whichever side (head probe or rest of the run) is nearer.
/// Parts shorter than 2 frames are dropped; the later part gets id next_id++.
std::vector<Tracklet> refine_tracklets(std::span<const Tracklet> tracklets, const MetricSet& metrics,
                                       const ProbeSet& probes, const RunConfig& cfg, int& next_id);

/// Up to cfg.refine_iters passes, relearning probes and initial-phase metrics before each.
std::vector<Tracklet> refine_iteratively(std::vector<Tracklet> tracklets, const RunConfig& cfg,
                                         const ExitMap& exit_map);

}  // namespace tracklink::metric
