#include "tracklink/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace tracklink::io {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double to_double(const std::string& raw, const std::string& where) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(where + ": cannot parse '" + raw + "' as a number");
  }
  return out;
}

int to_int(const std::string& raw, const std::string& where) {
  const double v = to_double(raw, where);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw Error(where + ": expected an integer, got '" + raw + "'");
  }
  return static_cast<int>(v);
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string where(const std::string& file, int line) {
  return file + " line " + std::to_string(line);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw Error("failed writing '" + path + "'");
  }
}

FrameDetections parse_detections(const std::string& det_text, const std::optional<std::string>& sidecar_text,
                                 int feature_dim) {
  // Parse in file order first; the sidecar indexes by position within a frame.
  std::map<int, std::vector<Detection>> by_frame;
  {
    std::istringstream in(det_text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (blank(line)) continue;
      const auto w = where("detections", line_no);
      const auto cells = split_csv(line);
      if (cells.size() < 7) {
        throw Error(w + ": expected at least 7 columns, got " + std::to_string(cells.size()));
      }
      Detection d;
      d.frame = to_int(cells[0], w);
      const int id = to_int(cells[1], w);
      d.box = {to_double(cells[2], w), to_double(cells[3], w), to_double(cells[4], w), to_double(cells[5], w)};
      d.score = to_double(cells[6], w);
      if (d.frame < 1) throw Error(w + ": frame must be >= 1");
      if (!(d.box.w > 0.0) || !(d.box.h > 0.0)) throw Error(w + ": box width and height must be positive");
      if (!(d.score > 0.0 && d.score < 1.0)) throw Error(w + ": score must lie in (0,1); normalize scores first");
      if (id >= 1) d.id_hint = id;
      by_frame[d.frame].push_back(std::move(d));
    }
  }

  if (sidecar_text) {
    std::set<std::pair<int, int>> seen;
    std::istringstream in(*sidecar_text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (blank(line)) continue;
      const auto w = where("features", line_no);
      const auto cells = split_csv(line);
      if (cells.size() < 3) throw Error(w + ": expected frame, index and at least one value");
      const int frame = to_int(cells[0], w);
      const int index = to_int(cells[1], w);
      const int dim = static_cast<int>(cells.size()) - 2;
      if (feature_dim == 0) feature_dim = dim;
      if (dim != feature_dim) {
        throw Error(w + ": feature dimension " + std::to_string(dim) + " does not match " +
                    std::to_string(feature_dim));
      }
      const auto it = by_frame.find(frame);
      if (it == by_frame.end() || index < 0 || index >= static_cast<int>(it->second.size())) {
        throw Error(w + ": no detection " + std::to_string(index) + " in frame " + std::to_string(frame));
      }
      if (!seen.emplace(frame, index).second) throw Error(w + ": duplicate feature row");
      Eigen::VectorXd v(dim);
      for (int k = 0; k < dim; ++k) v[k] = to_double(cells[static_cast<std::size_t>(k + 2)], w);
      it->second[static_cast<std::size_t>(index)].feature = std::move(v);
    }
    for (const auto& [frame, dets] : by_frame) {
      for (std::size_t i = 0; i < dets.size(); ++i) {
        if (!dets[i].feature) {
          throw Error("features: missing row for frame " + std::to_string(frame) + " index " + std::to_string(i));
        }
      }
    }
  }

  for (auto& [frame, dets] : by_frame) {
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      return std::tie(a.box.x, a.box.y) < std::tie(b.box.x, b.box.y);
    });
  }
  return by_frame;
}

FrameDetections load_detections(const std::string& path, const std::optional<std::string>& sidecar_path,
                                int feature_dim) {
  std::optional<std::string> sidecar;
  if (sidecar_path) sidecar = read_text(*sidecar_path);
  return parse_detections(read_text(path), sidecar, feature_dim);
}

TrackSet parse_ground_truth(const std::string& text) {
  TrackSet out;
  std::set<std::pair<int, int>> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto w = where("ground truth", line_no);
    const auto cells = split_csv(line);
    if (cells.size() < 6) throw Error(w + ": expected at least 6 columns");
    FrameBox fb;
    fb.frame = to_int(cells[0], w);
    const int id = to_int(cells[1], w);
    fb.box = {to_double(cells[2], w), to_double(cells[3], w), to_double(cells[4], w), to_double(cells[5], w)};
    if (id < 1) throw Error(w + ": identity must be >= 1");
    if (fb.frame < 1) throw Error(w + ": frame must be >= 1");
    if (!(fb.box.w > 0.0) || !(fb.box.h > 0.0)) throw Error(w + ": box width and height must be positive");
    if (!seen.emplace(fb.frame, id).second) {
      throw Error(w + ": duplicate (frame, id) = (" + std::to_string(fb.frame) + ", " + std::to_string(id) + ")");
    }
    out[id].push_back(fb);
  }
  for (auto& [id, boxes] : out) {
    std::sort(boxes.begin(), boxes.end(), [](const FrameBox& a, const FrameBox& b) { return a.frame < b.frame; });
  }
  return out;
}

TrackSet load_ground_truth(const std::string& path) { return parse_ground_truth(read_text(path)); }

std::string format_tracks(const TrackSet& tracks) {
  std::vector<std::tuple<int, int, Box>> rows;
  for (const auto& [id, boxes] : tracks) {
    for (const auto& fb : boxes) rows.emplace_back(fb.frame, id, fb.box);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::string out;
  for (const auto& [frame, id, box] : rows) {
    out += std::to_string(frame) + ',' + std::to_string(id) + ',' + format_real(box.x) + ',' + format_real(box.y) +
           ',' + format_real(box.w) + ',' + format_real(box.h) + ",1,-1,-1,-1\n";
  }
  return out;
}

void write_tracks(const TrackSet& tracks, const std::string& path) { write_text(path, format_tracks(tracks)); }

void write_trajectories(const std::vector<Trajectory>& trajectories, const std::string& path) {
  write_tracks(to_track_set(trajectories), path);
}

DetectionText format_detections(const FrameDetections& detections) {
  DetectionText out;
  for (const auto& [frame, dets] : detections) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const Detection& d = dets[i];
      out.detections += std::to_string(frame) + ",-1," + format_real(d.box.x) + ',' + format_real(d.box.y) + ',' +
                        format_real(d.box.w) + ',' + format_real(d.box.h) + ',' + format_real(d.score) +
                        ",-1,-1,-1\n";
      if (d.feature) {
        out.features += std::to_string(frame) + ',' + std::to_string(i);
        for (Eigen::Index k = 0; k < d.feature->size(); ++k) out.features += ',' + format_real((*d.feature)[k]);
        out.features += '\n';
      }
    }
  }
  return out;
}

}  // namespace tracklink::io
