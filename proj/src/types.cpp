#include "tracklink/types.hpp"

#include <algorithm>
#include <string>

namespace tracklink {

bool Tracklet::has_features() const {
  return std::all_of(detections.begin(), detections.end(),
                     [](const Detection& d) { return d.feature.has_value(); });
}

void validate_tracklet(const Tracklet& t) {
  if (t.detections.empty()) {
    throw Error("tracklet " + std::to_string(t.id) + " has no detections");
  }
  for (std::size_t i = 0; i < t.detections.size(); ++i) {
    const Detection& d = t.detections[i];
    if (!(d.box.w > 0.0) || !(d.box.h > 0.0)) {
      throw Error("tracklet " + std::to_string(t.id) + " has a non-positive box at frame " +
                  std::to_string(d.frame));
    }
    if (i > 0 && d.frame != t.detections[i - 1].frame + 1) {
      throw Error("tracklet " + std::to_string(t.id) + " is not gapless at frame " +
                  std::to_string(d.frame));
    }
  }
}

bool temporal_overlap(const Tracklet& a, const Tracklet& b) {
  return a.start() <= b.end() && b.start() <= a.end();
}

double intersection_area(const Box& a, const Box& b) {
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  return ix * iy;
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) {
    return 0.0;
  }
  return inter / (a.area() + b.area() - inter);
}

int gap_frames(const Tracklet& a, const Tracklet& b) {
  if (b.start() <= a.end()) {
    throw Error("gap_frames: tracklet " + std::to_string(b.id) + " does not start after tracklet " +
                std::to_string(a.id) + " ends");
  }
  return b.start() - a.end() - 1;
}

TrackSet to_track_set(const std::vector<Trajectory>& trajectories) {
  TrackSet out;
  for (const auto& t : trajectories) {
    out[t.id] = t.boxes;
  }
  return out;
}

std::vector<Detection> flatten(const FrameDetections& detections) {
  std::vector<Detection> out;
  for (const auto& [frame, dets] : detections) {
    out.insert(out.end(), dets.begin(), dets.end());
  }
  return out;
}

}  // namespace tracklink
