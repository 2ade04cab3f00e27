#include "tracklink/exit_map.hpp"

#include <algorithm>
#include <cmath>

namespace tracklink {

ExitMap::ExitMap(double width, double height, double band_frac)
    : width_(width), height_(height), band_(std::max(1.0, band_frac * std::min(width, height))) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error("exit map: frame dimensions must be positive");
  }
}

ExitMap ExitMap::from_config(const RunConfig& cfg, const FrameDetections& detections) {
  double w = cfg.frame_width;
  double h = cfg.frame_height;
  if (w <= 0.0 || h <= 0.0) {
    double max_x = 1.0;
    double max_y = 1.0;
    for (const auto& [frame, dets] : detections) {
      for (const auto& d : dets) {
        max_x = std::max(max_x, d.box.x + d.box.w);
        max_y = std::max(max_y, d.box.y + d.box.h);
      }
    }
    if (w <= 0.0) w = std::ceil(max_x);
    if (h <= 0.0) h = std::ceil(max_y);
  }
  return {w, h, cfg.exit_band_frac};
}

bool ExitMap::contains(const Eigen::Vector2d& p) const {
  return p.x() < band_ || p.y() < band_ || p.x() > width_ - band_ || p.y() > height_ - band_;
}

bool exits(const Tracklet& t, const ExitMap& exit_map) {
  return exit_map.contains(t.detections.back().box.center());
}

}  // namespace tracklink
