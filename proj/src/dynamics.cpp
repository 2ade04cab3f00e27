#include "tracklink/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace tracklink::dynamics {

int hankel_columns(int length) { return length - (length + 2) / 3 + 1; }

DynamicSequence sequence_of(const Tracklet& t) {
  DynamicSequence seq;
  seq.start_frame = t.start();
  seq.positions.reserve(t.detections.size());
  for (const auto& d : t.detections) seq.positions.push_back(d.box.center());
  return seq;
}

HankelMatrix build_hankel(const DynamicSequence& seq) {
  const int l = seq.length();
  if (l < 3) {
    throw Error("build_hankel: sequence of length " + std::to_string(l) + " is shorter than 3");
  }
  HankelMatrix h;
  h.columns = hankel_columns(l);
  h.block_rows = l - h.columns + 1;
  h.values.resize(2 * h.block_rows, h.columns);
  for (int i = 0; i < h.block_rows; ++i) {
    for (int j = 0; j < h.columns; ++j) {
      h.values.block<2, 1>(2 * i, j) = seq.positions[static_cast<std::size_t>(i + j)];
    }
  }
  return h;
}

double estimate_noise(const DynamicSequence& seq) {
  const int l = seq.length();
  if (l < 5) return 0.0;
  std::vector<double> dx;
  std::vector<double> dy;
  for (int q = 2; q < l; ++q) {
    const Eigen::Vector2d v = seq.positions[static_cast<std::size_t>(q)] -
                              2.0 * seq.positions[static_cast<std::size_t>(q - 1)] +
                              seq.positions[static_cast<std::size_t>(q - 2)];
    dx.push_back(v.x());
    dy.push_back(v.y());
  }
  const auto median = [](std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
  };
  // Each axis is centred on its own median so a constant acceleration is not read as noise.
  std::vector<double> dev;
  dev.reserve(dx.size() + dy.size());
  for (const auto* axis : {&dx, &dy}) {
    const double m = median(*axis);
    for (const double v : *axis) dev.push_back(std::abs(v - m));
  }
  // A second difference of white noise has variance 6 sigma^2.
  return median(dev) / 0.6744897501960817 / std::sqrt(6.0);
}

namespace {

int count_above(const Eigen::VectorXd& sv, double threshold) {
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > threshold) ++r;
  }
  return r;
}

}  // namespace

int estimate_rank(const HankelMatrix& h, double tol) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(h.values).singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  return count_above(sv, tol * sv[0]);
}

int sequence_rank(const DynamicSequence& seq, const RankOptions& opts) {
  DynamicSequence centred = seq;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : seq.positions) mean += p;
  mean /= static_cast<double>(seq.length());
  for (auto& p : centred.positions) p -= mean;

  const HankelMatrix h = build_hankel(centred);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(h.values).singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 1;
  const double floor = opts.noise_gain * estimate_noise(seq) *
                       (std::sqrt(static_cast<double>(h.values.rows())) + std::sqrt(static_cast<double>(h.values.cols())));
  return std::max(1, count_above(sv, std::max(opts.tol * sv[0], floor)));
}

DynamicSequence interpolate_gap(const Tracklet& a, const Tracklet& b) {
  const int gap = gap_frames(a, b);
  DynamicSequence seq = sequence_of(a);
  const Eigen::Vector2d from = a.detections.back().box.center();
  const Eigen::Vector2d to = b.detections.front().box.center();
  for (int k = 1; k <= gap; ++k) {
    seq.positions.push_back(from + (to - from) * (static_cast<double>(k) / static_cast<double>(gap + 1)));
  }
  for (const auto& d : b.detections) seq.positions.push_back(d.box.center());
  return seq;
}

double motion_similarity(const Tracklet& a, const Tracklet& b, const RankOptions& opts) {
  if (temporal_overlap(a, b) || b.start() <= a.end()) return kTemporalConflict;
  if (a.length() < 3 || b.length() < 3) return kShortTrackletSimilarity;
  const int ra = sequence_rank(sequence_of(a), opts);
  const int rb = sequence_rank(sequence_of(b), opts);
  const int rab = sequence_rank(interpolate_gap(a, b), opts);
  return static_cast<double>(ra + rb) / static_cast<double>(rab) - 1.0;
}

}  // namespace tracklink::dynamics
