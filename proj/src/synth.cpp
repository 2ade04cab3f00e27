#include "tracklink/synth.hpp"

#include "tracklink/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace tracklink::synth {

using nlohmann::json;

namespace {

Eigen::Vector2d vec2(const json& j, const char* key, const Eigen::Vector2d& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw Error(std::string("scenario: '") + key + "' must be a 2-element array");
  return {v[0].get<double>(), v[1].get<double>()};
}

json to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

bool inside(const Eigen::Vector2d& c, const ScenarioSpec& spec) {
  return c.x() >= 0.0 && c.y() >= 0.0 && c.x() <= spec.width && c.y() <= spec.height;
}

Box union_box(const Box& a, const Box& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.x + a.w, b.x + b.w);
  const double y1 = std::max(a.y + a.h, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.frames < 1) throw Error("scenario: frames must be positive");
  if (!(spec.width > 0.0) || !(spec.height > 0.0)) throw Error("scenario: frame size must be positive");
  if (spec.feature_dim < 1) throw Error("scenario: feature_dim must be positive");
  if (spec.miss_prob < 0.0 || spec.miss_prob >= 1.0) throw Error("scenario: miss_prob must lie in [0, 1)");
  if (!(spec.score_min > 0.0) || !(spec.score_max < 1.0) || spec.score_min > spec.score_max) {
    throw Error("scenario: scores must satisfy 0 < score_min <= score_max < 1");
  }
  if (spec.feature_noise < 0.0 || spec.position_noise < 0.0 || spec.separation < 0.0) {
    throw Error("scenario: noise levels and separation must be non-negative");
  }
  std::set<int> ids;
  for (const auto& t : spec.targets) {
    if (t.id < 1) throw Error("scenario: target ids must be >= 1");
    if (!ids.insert(t.id).second) throw Error("scenario: duplicate target id " + std::to_string(t.id));
    const int last = t.last_frame == 0 ? spec.frames : t.last_frame;
    if (t.first_frame < 1 || last < t.first_frame || last > spec.frames) {
      throw Error("scenario: target " + std::to_string(t.id) + " has an invalid frame range");
    }
    if (!(t.width > 0.0) || !(t.height > 0.0)) throw Error("scenario: target boxes must be positive");
  }
  for (const auto& o : spec.occlusions) {
    if (!ids.contains(o.occluder) || !ids.contains(o.occluded)) throw Error("scenario: occlusion names an unknown target");
    if (o.occluder == o.occluded) throw Error("scenario: a target cannot occlude itself");
    if (o.first > o.last) throw Error("scenario: occlusion range is empty");
  }
}

std::vector<Eigen::VectorXd> cluster_centers(int count, int dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim, std::max(count, 1));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  std::vector<Eigen::VectorXd> out;
  if (count == 1 || count > dim) {
    for (int k = 0; k < count; ++k) out.push_back(radius * g.col(k).normalized());
    return out;
  }
  // Randomly rotated regular simplex: every pair of centers is equally far apart.
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() * Eigen::MatrixXd::Identity(dim, count);
  const Eigen::VectorXd mean = q.rowwise().mean();
  for (int k = 0; k < count; ++k) out.push_back(radius * (q.col(k) - mean).normalized());
  return out;
}

Scenario synth_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto centers = cluster_centers(static_cast<int>(spec.targets.size()), spec.feature_dim, spec.separation, rng);

  Scenario out;
  for (const auto& t : spec.targets) {
    const int last = t.last_frame == 0 ? spec.frames : t.last_frame;
    Eigen::Vector2d c = t.center;
    Eigen::Vector2d v = t.velocity;
    std::vector<FrameBox> boxes;
    for (int f = t.first_frame; f <= last; ++f) {
      for (const auto& m : t.maneuvers) {
        if (m.frame != f) continue;
        if (m.random_heading) {
          const double angle = 2.0 * std::numbers::pi * unit(rng);
          v = v.norm() * Eigen::Vector2d(std::cos(angle), std::sin(angle));
        } else {
          v = m.velocity;
        }
      }
      if (inside(c, spec)) boxes.push_back({f, {c.x() - 0.5 * t.width, c.y() - 0.5 * t.height, t.width, t.height}});
      c += v;
      v += t.acceleration;
    }
    if (!boxes.empty()) out.ground_truth[t.id] = std::move(boxes);
  }

  for (int f = 1; f <= spec.frames; ++f) {
    std::vector<Detection> dets;
    for (std::size_t k = 0; k < spec.targets.size(); ++k) {
      const auto& t = spec.targets[k];
      const auto gt = out.ground_truth.find(t.id);
      if (gt == out.ground_truth.end()) continue;
      const auto it = std::find_if(gt->second.begin(), gt->second.end(), [f](const FrameBox& b) { return b.frame == f; });
      if (it == gt->second.end()) continue;

      // Every draw happens whether or not the detection survives, so the stream
      // for one target does not depend on another target's occlusions.
      Box box = it->box;
      box.x += spec.position_noise * normal(rng);
      box.y += spec.position_noise * normal(rng);
      box.w = std::max(1.0, box.w + spec.position_noise * normal(rng));
      box.h = std::max(1.0, box.h + spec.position_noise * normal(rng));
      const double score = spec.score_min + (spec.score_max - spec.score_min) * unit(rng);
      const bool missed = unit(rng) < spec.miss_prob;
      Eigen::VectorXd feature(spec.feature_dim);
      for (int i = 0; i < spec.feature_dim; ++i) feature[i] = centers[k][i] + spec.feature_noise * normal(rng);

      bool hidden = false;
      for (const auto& o : spec.occlusions) {
        if (f < o.first || f > o.last) continue;
        if (o.occluded == t.id) hidden = true;
        if (o.occluder == t.id && o.merge) {
          const auto other = out.ground_truth.find(o.occluded);
          if (other == out.ground_truth.end()) continue;
          for (const auto& ob : other->second) {
            if (ob.frame == f) box = union_box(box, ob.box);
          }
        }
      }
      if (hidden || missed) continue;
      Detection d;
      d.frame = f;
      d.box = box;
      d.score = score;
      d.feature = std::move(feature);
      d.id_hint = t.id;
      dets.push_back(std::move(d));
    }
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      return a.box.x != b.box.x ? a.box.x < b.box.x : a.box.y < b.box.y;
    });
    if (!dets.empty()) out.detections[f] = std::move(dets);
  }
  return out;
}

ScenarioSpec parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: invalid JSON: ") + e.what());
  }
  ScenarioSpec s;
  try {
    s.name = j.value("name", s.name);
    s.frames = j.value("frames", s.frames);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.feature_dim = j.value("feature_dim", s.feature_dim);
    s.separation = j.value("separation", s.separation);
    s.feature_noise = j.value("feature_noise", s.feature_noise);
    s.position_noise = j.value("position_noise", s.position_noise);
    s.miss_prob = j.value("miss_prob", s.miss_prob);
    s.score_min = j.value("score_min", s.score_min);
    s.score_max = j.value("score_max", s.score_max);
    for (const auto& jt : j.value("targets", json::array())) {
      TargetSpec t;
      t.id = jt.at("id").get<int>();
      t.first_frame = jt.value("first_frame", t.first_frame);
      t.last_frame = jt.value("last_frame", t.last_frame);
      t.center = vec2(jt, "center", t.center);
      t.velocity = vec2(jt, "velocity", t.velocity);
      t.acceleration = vec2(jt, "acceleration", t.acceleration);
      t.width = jt.value("width", t.width);
      t.height = jt.value("height", t.height);
      for (const auto& jm : jt.value("maneuvers", json::array())) {
        Maneuver m;
        m.frame = jm.at("frame").get<int>();
        m.velocity = vec2(jm, "velocity", m.velocity);
        m.random_heading = jm.value("random_heading", false);
        t.maneuvers.push_back(m);
      }
      s.targets.push_back(std::move(t));
    }
    for (const auto& jo : j.value("occlusions", json::array())) {
      Occlusion o;
      o.occluder = jo.at("occluder").get<int>();
      o.occluded = jo.at("occluded").get<int>();
      o.first = jo.at("first").get<int>();
      o.last = jo.at("last").get<int>();
      o.merge = jo.value("merge", false);
      s.occlusions.push_back(o);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

std::string format_scenario(const ScenarioSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["frames"] = s.frames;
  j["width"] = s.width;
  j["height"] = s.height;
  j["feature_dim"] = s.feature_dim;
  j["separation"] = s.separation;
  j["feature_noise"] = s.feature_noise;
  j["position_noise"] = s.position_noise;
  j["miss_prob"] = s.miss_prob;
  j["score_min"] = s.score_min;
  j["score_max"] = s.score_max;
  j["targets"] = nlohmann::ordered_json::array();
  for (const auto& t : s.targets) {
    nlohmann::ordered_json jt;
    jt["id"] = t.id;
    jt["first_frame"] = t.first_frame;
    jt["last_frame"] = t.last_frame;
    jt["center"] = to_json(t.center);
    jt["velocity"] = to_json(t.velocity);
    jt["acceleration"] = to_json(t.acceleration);
    jt["width"] = t.width;
    jt["height"] = t.height;
    jt["maneuvers"] = nlohmann::ordered_json::array();
    for (const auto& m : t.maneuvers) {
      jt["maneuvers"].push_back({{"frame", m.frame}, {"velocity", to_json(m.velocity)}, {"random_heading", m.random_heading}});
    }
    j["targets"].push_back(std::move(jt));
  }
  j["occlusions"] = nlohmann::ordered_json::array();
  for (const auto& o : s.occlusions) {
    j["occlusions"].push_back(
        {{"occluder", o.occluder}, {"occluded", o.occluded}, {"first", o.first}, {"last", o.last}, {"merge", o.merge}});
  }
  return j.dump(2) + "\n";
}

ScenarioSpec crossing_preset() {
  ScenarioSpec s;
  s.name = "crossing";
  s.frames = 100;
  TargetSpec a;
  a.id = 1;
  a.center = {124.0, 44.0};
  a.velocity = {4.0, 4.0};
  TargetSpec b;
  b.id = 2;
  b.center = {124.0, 436.0};
  b.velocity = {4.0, -4.0};
  s.targets = {a, b};
  s.occlusions = {{1, 2, 45, 54, false}};
  return s;
}

ScenarioSpec motion_unreliable_preset() {
  ScenarioSpec s = crossing_preset();
  s.name = "motion-unreliable";
  s.targets[1].maneuvers.push_back({50, Eigen::Vector2d::Zero(), true});
  return s;
}

std::vector<ScenarioSpec> standard_suite() {
  std::vector<ScenarioSpec> out;
  out.push_back(crossing_preset());

  ScenarioSpec parallel;
  parallel.name = "parallel";
  parallel.frames = 120;
  parallel.miss_prob = 0.03;
  for (int k = 0; k < 3; ++k) {
    TargetSpec t;
    t.id = k + 1;
    t.center = {60.0 + 30.0 * k, 120.0 + 120.0 * k};
    t.velocity = {k % 2 == 0 ? 3.0 : 4.0, 0.0};
    parallel.targets.push_back(t);
  }
  out.push_back(parallel);

  ScenarioSpec mixed;
  mixed.name = "mixed";
  mixed.frames = 150;
  mixed.miss_prob = 0.02;
  TargetSpec a;
  a.id = 1;
  a.center = {80.0, 100.0};
  a.velocity = {3.0, 2.0};
  TargetSpec b;
  b.id = 2;
  b.center = {560.0, 100.0};
  b.velocity = {-3.0, 2.0};
  TargetSpec c;
  c.id = 3;
  c.center = {320.0, 420.0};
  c.velocity = {0.0, -1.0};
  c.acceleration = {0.0, -0.005};
  TargetSpec d;
  d.id = 4;
  d.first_frame = 30;
  d.center = {100.0, 400.0};
  d.velocity = {3.0, 0.0};
  d.maneuvers.push_back({90, Eigen::Vector2d(3.0, -2.0), false});
  mixed.targets = {a, b, c, d};
  mixed.occlusions = {{1, 2, 76, 85, false}, {3, 4, 70, 77, true}};
  out.push_back(mixed);
  return out;
}

std::optional<ScenarioSpec> preset(const std::string& name) {
  if (name == "crossing") return crossing_preset();
  if (name == "motion-unreliable") return motion_unreliable_preset();
  const std::string prefix = "suite-";
  if (name.rfind(prefix, 0) == 0) {
    const auto suite = standard_suite();
    try {
      const std::size_t k = std::stoul(name.substr(prefix.size()));
      if (k < suite.size()) return suite[k];
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

void write_scenario(const Scenario& s, const std::string& prefix) {
  const auto text = io::format_detections(s.detections);
  io::write_text(prefix + "det.csv", text.detections);
  io::write_text(prefix + "features.csv", text.features);
  io::write_tracks(s.ground_truth, prefix + "gt.csv");
}

}  // namespace tracklink::synth
