#include "tracklink/pipeline.hpp"

#include "tracklink/association.hpp"
#include "tracklink/tracklet_gen.hpp"

#include <algorithm>

namespace tracklink {

namespace {

void renumber(std::vector<Tracklet>& tracklets) {
  std::sort(tracklets.begin(), tracklets.end(), [](const Tracklet& a, const Tracklet& b) {
    const Box& ba = a.detections.front().box;
    const Box& bb = b.detections.front().box;
    if (a.start() != b.start()) return a.start() < b.start();
    if (ba.x != bb.x) return ba.x < bb.x;
    return ba.y < bb.y;
  });
  for (std::size_t k = 0; k < tracklets.size(); ++k) tracklets[k].id = static_cast<int>(k) + 1;
}

}  // namespace

Prepared prepare(const FrameDetections& detections, const RunConfig& cfg) {
  validate(cfg);
  Prepared p;
  p.exit_map = ExitMap::from_config(cfg, detections);
  p.initial = generate_initial_tracklets(detections, cfg);
  p.appearance = cfg.use_appearance && !p.initial.empty() &&
                 std::all_of(p.initial.begin(), p.initial.end(), [](const Tracklet& t) { return t.has_features(); });

  p.reliable = p.appearance ? metric::refine_iteratively(p.initial, cfg, p.exit_map) : p.initial;
  renumber(p.reliable);
  if (p.appearance) {
    p.metrics = metric::learn_metrics(p.reliable, metric::SamplePhase::reliable, cfg, p.exit_map);
    p.probes = metric::build_probe_set(p.reliable, cfg);
  }
  const auto candidates = candidate_pairs(p.reliable, cfg);
  p.table = affinity::build_table(p.reliable, candidates, p.metrics, p.probes, p.exit_map, cfg);
  return p;
}

std::vector<Trajectory> track(const FrameDetections& detections, const RunConfig& cfg) {
  const Prepared p = prepare(detections, cfg);
  return associate(p.reliable, p.table, cfg);
}

}  // namespace tracklink
