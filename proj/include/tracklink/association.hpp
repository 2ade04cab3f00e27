#pragma once

#include "tracklink/affinity.hpp"
#include "tracklink/config.hpp"
#include "tracklink/types.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tracklink {

struct FrameWindow {
  int first = 1;
  int last = 1;

  bool operator==(const FrameWindow&) const = default;
};

/// Consecutive windows of cfg.segment_len frames over [1, last_frame]; the last may be shorter.
std::vector<FrameWindow> partition_segments(int last_frame, const RunConfig& cfg);

/// 0-based index of the segment holding `frame`.
int segment_index(int frame, const RunConfig& cfg);

/// Ordered pairs (from, to) worth scoring: `to` starts after `from` ends, either
/// inside the segment where `from` ends, or within the first gap_bound frames of
/// the next segment while `from` ends within the last gap_bound frames of its own.
std::vector<std::pair<int, int>> candidate_pairs(std::span<const Tracklet> tracklets, const RunConfig& cfg);

/// Whole-sequence cover: every tracklet lands in exactly one trajectory. Entry and
/// exit cost -log(entry_exit_prob); links use the table's finite costs. Gaps are
/// filled by linear interpolation of x, y, w, h. Trajectory ids are 1..n ordered
/// by first frame, then first tracklet id.
std::vector<Trajectory> associate(std::span<const Tracklet> tracklets, const affinity::AffinityTable& table,
                                  const RunConfig& cfg);

/// Linear interpolation over a trajectory's member tracklets, in order.
std::vector<FrameBox> interpolate_boxes(std::span<const Tracklet* const> members);

/// JSON array of {id, tracklets, first_frame, last_frame, cost}.
std::string format_summary(const std::vector<Trajectory>& trajectories);

}  // namespace tracklink
