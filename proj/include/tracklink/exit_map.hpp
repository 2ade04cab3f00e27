#pragma once

#include "tracklink/config.hpp"
#include "tracklink/types.hpp"

#include <Eigen/Dense>

namespace tracklink {

/// Static border band where targets may leave the scene.
class ExitMap {
 public:
  ExitMap(double width, double height, double band_frac);

  /// Uses cfg.frame_width/height, falling back to the detection extents when unset.
  static ExitMap from_config(const RunConfig& cfg, const FrameDetections& detections);

  bool contains(const Eigen::Vector2d& point) const;

  double width() const { return width_; }
  double height() const { return height_; }
  double band() const { return band_; }

 private:
  double width_;
  double height_;
  double band_;
};

/// True when the tracklet's last center lies in the exit band.
bool exits(const Tracklet& t, const ExitMap& exit_map);

}  // namespace tracklink
