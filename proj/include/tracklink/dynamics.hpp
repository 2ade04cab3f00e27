#pragma once

#include "tracklink/types.hpp"

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace tracklink::dynamics {

/// Frame-ordered 2-D positions (box centers), gapless.
struct DynamicSequence {
  int start_frame = 1;
  std::vector<Eigen::Vector2d> positions;

  int length() const { return static_cast<int>(positions.size()); }
};

/// Block Hankel matrix: block row i, column j holds y_{s+i+j} as an (x, y) pair.
struct HankelMatrix {
  Eigen::MatrixXd values;
  int columns = 0;
  int block_rows = 0;
};

struct RankOptions {
  double tol = 0.01;         ///< relative threshold on sigma_1
  double noise_gain = 2.0;   ///< 0 disables the noise floor
};

/// Motion similarity reported for tracklets too short to form a Hankel matrix.
inline constexpr double kShortTrackletSimilarity = 0.5;
inline constexpr double kTemporalConflict = -std::numeric_limits<double>::infinity();

/// Number of Hankel columns for a sequence of length l: l - ceil(l/3) + 1.
int hankel_columns(int length);

DynamicSequence sequence_of(const Tracklet& t);

/// Requires length >= 3.
HankelMatrix build_hankel(const DynamicSequence& seq);

/// Robust per-coordinate noise level from the median absolute deviation of second differences.
double estimate_noise(const DynamicSequence& seq);

/// Numerical rank: singular values above tol * sigma_1 (0 when sigma_1 == 0).
int estimate_rank(const HankelMatrix& h, double tol);

/// Rank of a sequence's dynamics.
///
/// The Hankel matrix is built on mean-centred positions, so the estimate does not
/// depend on where in the image the target is; a non-empty constant sequence has
/// rank 1. Singular values must clear both tol * sigma_1 and a noise floor of
/// noise_gain * sigma_noise * (sqrt(rows) + sqrt(cols)).
int sequence_rank(const DynamicSequence& seq, const RankOptions& opts);

/// Joint sequence: a's centers, the gap filled linearly, then b's centers.
DynamicSequence interpolate_gap(const Tracklet& a, const Tracklet& b);

/// (rank_a + rank_b) / rank_ab - 1 for a -> b; kTemporalConflict when b does not
/// start after a ends; kShortTrackletSimilarity when either has fewer than 3 frames.
double motion_similarity(const Tracklet& a, const Tracklet& b, const RankOptions& opts);

}  // namespace tracklink::dynamics
