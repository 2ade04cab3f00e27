#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracklink {

/// Raised for invalid input, violated preconditions and infeasible problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box, top-left origin, y grows downward.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  Eigen::Vector2d center() const { return {x + 0.5 * w, y + 0.5 * h}; }

  bool operator==(const Box&) const = default;
};

struct Detection {
  int frame = 1;
  Box box;
  double score = 0.0;
  std::optional<Eigen::VectorXd> feature;
  std::optional<int> id_hint;
};

/// Gapless, frame-ordered run of detections presumed to share one identity.
struct Tracklet {
  int id = 0;
  std::vector<Detection> detections;

  int start() const { return detections.front().frame; }
  int end() const { return detections.back().frame; }
  int length() const { return end() - start() + 1; }

  const Detection& at_frame(int frame) const { return detections.at(static_cast<std::size_t>(frame - start())); }
  bool covers(int frame) const { return frame >= start() && frame <= end(); }
  bool has_features() const;
};

/// Throws unless detections are non-empty, strictly consecutive and boxes are positive.
void validate_tracklet(const Tracklet& t);

struct FrameBox {
  int frame = 0;
  Box box;

  bool operator==(const FrameBox&) const = default;
};

/// Linked tracklets plus the per-frame boxes with gaps filled in.
struct Trajectory {
  int id = 0;
  std::vector<int> tracklet_ids;
  std::vector<FrameBox> boxes;
  double cost = 0.0;
};

/// Detections keyed by frame.
using FrameDetections = std::map<int, std::vector<Detection>>;

/// Identity -> frame-ordered boxes (ground truth or tracker output).
using TrackSet = std::map<int, std::vector<FrameBox>>;

// Elementary predicates.

bool temporal_overlap(const Tracklet& a, const Tracklet& b);

double iou(const Box& a, const Box& b);

double intersection_area(const Box& a, const Box& b);

/// Empty frames strictly between a and b; requires b.start() > a.end().
int gap_frames(const Tracklet& a, const Tracklet& b);

/// Flattens a trajectory list into a TrackSet keyed by trajectory id.
TrackSet to_track_set(const std::vector<Trajectory>& trajectories);

/// Flattens frame-grouped detections into a list ordered by frame.
std::vector<Detection> flatten(const FrameDetections& detections);

}  // namespace tracklink
