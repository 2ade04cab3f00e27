#pragma once

#include "tracklink/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tracklink::io {

/// Reads a MOT-style detection CSV (frame,id,x,y,w,h,score[,...]).
///
/// Rows are grouped by frame and sorted by (frame, x, y). A positive id column is
/// kept as Detection::id_hint. When a sidecar path is given, each row
/// (frame, index, v_1..v_d) attaches a feature to the detection that appeared
/// at that 0-based position within its frame in the detection file. With
/// feature_dim == 0 the dimension is taken from the first sidecar row.
FrameDetections load_detections(const std::string& path,
                                const std::optional<std::string>& sidecar_path = std::nullopt,
                                int feature_dim = 0);

/// Same as load_detections, from in-memory text.
FrameDetections parse_detections(const std::string& det_text, const std::optional<std::string>& sidecar_text,
                                 int feature_dim = 0);

/// Reads identity-labelled boxes (frame,id,x,y,w,h[,...]); ids must be >= 1.
TrackSet load_ground_truth(const std::string& path);
TrackSet parse_ground_truth(const std::string& text);

/// Rows (frame,id,x,y,w,h,1,-1,-1,-1) sorted by (frame, id).
std::string format_tracks(const TrackSet& tracks);
void write_tracks(const TrackSet& tracks, const std::string& path);
void write_trajectories(const std::vector<Trajectory>& trajectories, const std::string& path);

/// Raw detection rows (frame,-1,x,y,w,h,score,-1,-1,-1) plus the matching sidecar text.
struct DetectionText {
  std::string detections;
  std::string features;
};
DetectionText format_detections(const FrameDetections& detections);

/// Reals are printed with 6 significant digits.
std::string format_real(double value);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace tracklink::io
