#pragma once

#include "tracklink/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tracklink::synth {

/// Velocity change at a frame. With random_heading the speed is kept and the
/// direction is drawn uniformly.
struct Maneuver {
  int frame = 1;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  bool random_heading = false;
};

struct TargetSpec {
  int id = 1;
  int first_frame = 1;
  int last_frame = 0;                                  ///< 0 = scenario end
  Eigen::Vector2d center = Eigen::Vector2d::Zero();    ///< at first_frame
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();  ///< pixels per frame
  Eigen::Vector2d acceleration = Eigen::Vector2d::Zero();
  double width = 40.0;
  double height = 100.0;
  std::vector<Maneuver> maneuvers;
};

/// Frames [first, last] in which `occluded` yields no detection. With merge the
/// occluder's detection grows to the union of both boxes.
struct Occlusion {
  int occluder = 0;
  int occluded = 0;
  int first = 1;
  int last = 1;
  bool merge = false;
};

struct ScenarioSpec {
  std::string name = "scenario";
  int frames = 100;
  double width = 640.0;
  double height = 480.0;
  int feature_dim = 32;
  double separation = 4.0;     ///< radius of the identity cluster centers
  double feature_noise = 1.0;  ///< per-dimension feature sigma
  double position_noise = 1.0; ///< per-coordinate box sigma in pixels
  double miss_prob = 0.0;
  double score_min = 0.75;
  double score_max = 0.95;
  std::vector<TargetSpec> targets;
  std::vector<Occlusion> occlusions;
};

struct Scenario {
  FrameDetections detections;  ///< id_hint carries the true identity
  TrackSet ground_truth;
};

/// Throws on duplicate target ids, unknown occlusion targets or bad ranges.
void validate(const ScenarioSpec& spec);

/// Centers on a sphere of the given radius. Up to dim centers form a randomly
/// rotated regular simplex, so every pair is equally separated (2 * radius for
/// two centers); beyond that they are independent Gaussian directions.
std::vector<Eigen::VectorXd> cluster_centers(int count, int dim, double radius, std::mt19937_64& rng);

/// Deterministic for a given spec and seed. Targets are visible while their box
/// center lies inside the frame.
Scenario synth_scenario(const ScenarioSpec& spec, std::uint64_t seed);

ScenarioSpec parse_scenario(const std::string& json_text);
std::string format_scenario(const ScenarioSpec& spec);

/// Two targets crossing at frame 50; the second is hidden for frames 45..54.
ScenarioSpec crossing_preset();

/// As crossing_preset, but the hidden target takes a random heading while hidden.
ScenarioSpec motion_unreliable_preset();

/// A few mixed scenes: crossing, parallel walkers, misses, an accelerating target.
std::vector<ScenarioSpec> standard_suite();

/// Looks up "crossing", "motion-unreliable" or "suite-<k>".
std::optional<ScenarioSpec> preset(const std::string& name);

/// Writes <prefix>det.csv, <prefix>features.csv and <prefix>gt.csv.
void write_scenario(const Scenario& s, const std::string& prefix);

}  // namespace tracklink::synth
