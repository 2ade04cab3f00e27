#include "tracklink/association.hpp"

#include "tracklink/flow.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace tracklink {

std::vector<FrameWindow> partition_segments(int last_frame, const RunConfig& cfg) {
  if (cfg.segment_len < 2) throw Error("partition_segments: segment_len must be at least 2");
  std::vector<FrameWindow> out;
  for (int first = 1; first <= last_frame; first += cfg.segment_len) {
    out.push_back({first, std::min(last_frame, first + cfg.segment_len - 1)});
  }
  return out;
}

int segment_index(int frame, const RunConfig& cfg) { return (frame - 1) / cfg.segment_len; }

std::vector<std::pair<int, int>> candidate_pairs(std::span<const Tracklet> tracklets, const RunConfig& cfg) {
  std::vector<std::pair<int, int>> out;
  for (const auto& a : tracklets) {
    const int seg = segment_index(a.end(), cfg);
    const int seg_last = (seg + 1) * cfg.segment_len;
    const bool near_boundary = a.end() > seg_last - cfg.gap_bound;
    for (const auto& b : tracklets) {
      if (b.start() <= a.end()) continue;
      const int other = segment_index(b.start(), cfg);
      const bool same = other == seg;
      const bool bridging = other == seg + 1 && near_boundary && b.start() <= seg_last + cfg.gap_bound;
      if (same || bridging) out.emplace_back(a.id, b.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FrameBox> interpolate_boxes(std::span<const Tracklet* const> members) {
  std::vector<FrameBox> out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const Tracklet& t = *members[k];
    if (k > 0) {
      const FrameBox from = out.back();
      const Box& to = t.detections.front().box;
      const int span = t.start() - from.frame;
      for (int f = from.frame + 1; f < t.start(); ++f) {
        const double a = static_cast<double>(f - from.frame) / static_cast<double>(span);
        out.push_back({f, {from.box.x + a * (to.x - from.box.x), from.box.y + a * (to.y - from.box.y),
                           from.box.w + a * (to.w - from.box.w), from.box.h + a * (to.h - from.box.h)}});
      }
    }
    for (const auto& d : t.detections) out.push_back({d.frame, d.box});
  }
  return out;
}

std::vector<Trajectory> associate(std::span<const Tracklet> tracklets, const affinity::AffinityTable& table,
                                  const RunConfig& cfg) {
  flow::FlowGraph graph;
  std::map<int, int> node_of;
  const double terminal = -std::log(cfg.entry_exit_prob);
  for (std::size_t k = 0; k < tracklets.size(); ++k) {
    const int v = graph.add_node(0.0, true);
    if (!node_of.emplace(tracklets[k].id, v).second) {
      throw Error("associate: duplicate tracklet id " + std::to_string(tracklets[k].id));
    }
    graph.add_edge(flow::FlowGraph::kSource, v, terminal);
    graph.add_edge(v, flow::FlowGraph::kSink, terminal);
  }
  for (const auto& row : table.rows) {
    if (std::isinf(row.cost)) continue;
    const auto a = node_of.find(row.from);
    const auto b = node_of.find(row.to);
    if (a == node_of.end() || b == node_of.end()) throw Error("associate: table references an unknown tracklet");
    graph.add_edge(a->second, b->second, row.cost);
  }
  const flow::Solution sol = flow::solve_paths(graph, flow::Mode::cover_all);

  std::map<std::pair<int, int>, double> link_cost;
  for (const auto& row : table.rows) {
    if (!std::isinf(row.cost)) link_cost[{row.from, row.to}] = row.cost;
  }
  std::vector<Trajectory> out;
  for (const auto& path : sol.paths) {
    Trajectory traj;
    std::vector<const Tracklet*> members;
    traj.cost = 2.0 * terminal;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const Tracklet& t = tracklets[static_cast<std::size_t>(path[k])];
      if (k > 0) traj.cost += link_cost.at({members.back()->id, t.id});
      members.push_back(&t);
      traj.tracklet_ids.push_back(t.id);
    }
    traj.boxes = interpolate_boxes(members);
    out.push_back(std::move(traj));
  }
  std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) {
    if (a.boxes.front().frame != b.boxes.front().frame) return a.boxes.front().frame < b.boxes.front().frame;
    return a.tracklet_ids.front() < b.tracklet_ids.front();
  });
  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = static_cast<int>(k) + 1;
  return out;
}

std::string format_summary(const std::vector<Trajectory>& trajectories) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : trajectories) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["tracklets"] = t.tracklet_ids;
    j["first_frame"] = t.boxes.front().frame;
    j["last_frame"] = t.boxes.back().frame;
    j["cost"] = t.cost;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace tracklink
