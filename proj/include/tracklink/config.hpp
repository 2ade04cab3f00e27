#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tracklink {

/// Every tunable of a tracking run. Field names double as config-file keys.
struct RunConfig {
  int segment_len = 50;            ///< frames per local segment
  int probe_window = 8;            ///< leading frames assumed reliable
  int strongest_q = 4;             ///< training samples per tracklet
  int split_run = 5;               ///< consecutive outliers that trigger a split
  int refine_iters = 2;
  std::optional<double> distance_threshold;  ///< fixed split threshold; unset = per-tracklet estimate
  double split_iqr_gain = 1.5;     ///< estimated threshold = median + gain * IQR
  double rank_tol = 0.01;          ///< relative singular value threshold
  double rank_noise_gain = 2.0;    ///< multiplier on the estimated Hankel noise floor
  double overlap_eta = 0.3;
  int gap_bound = 20;              ///< upper gap of the first weighting level
  double lambda1 = 0.5;
  double lambda2 = 0.2;
  double exit_band_frac = 0.05;
  double entry_exit_prob = 0.1;
  int feature_dim = 0;             ///< 0 = take the dimension from the feature sidecar
  std::uint64_t rng_seed = 0;
  double det_threshold = 0.6;
  double frame_width = 0.0;        ///< 0 = infer from detection extents
  double frame_height = 0.0;
  bool use_appearance = true;
  int pair_cap = 2000;
  int max_columns = 32;
};

/// Throws tracklink::Error when an invariant on the fields is violated.
void validate(const RunConfig& cfg);

/// Parses key=value lines ('#' starts a comment). Unknown keys are errors.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Emits every key in parse_config's syntax.
std::string format_config(const RunConfig& cfg);

}  // namespace tracklink
