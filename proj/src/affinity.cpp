#include "tracklink/affinity.hpp"

#include "tracklink/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace tracklink::affinity {

double mean_probe_distance(const Tracklet& a, const metric::TargetMetric& metric_a, const Eigen::VectorXd& probe_b) {
  double sum = 0.0;
  for (const auto& d : a.detections) {
    if (!d.feature) throw Error("affinity: tracklet " + std::to_string(a.id) + " lacks features");
    sum += metric::distance(metric_a, *d.feature, probe_b);
  }
  return sum / static_cast<double>(a.detections.size());
}

double appearance_product(const Tracklet& a, const Tracklet& b, const metric::MetricSet& metrics,
                          const metric::ProbeSet& probes) {
  const auto ma = metrics.find(a.id);
  const auto mb = metrics.find(b.id);
  const auto ga = probes.find(a.id);
  const auto gb = probes.find(b.id);
  if (ma == metrics.end() || mb == metrics.end()) {
    throw Error("affinity: missing metric for tracklet " + std::to_string(ma == metrics.end() ? a.id : b.id));
  }
  if (ga == probes.end() || gb == probes.end()) {
    throw Error("affinity: missing probe for tracklet " + std::to_string(ga == probes.end() ? a.id : b.id));
  }
  return mean_probe_distance(a, ma->second, gb->second) * mean_probe_distance(b, mb->second, ga->second);
}

double appearance_affinity(double product, double gamma) {
  if (product <= 0.0) return 1.0;
  return gamma / product;
}

int temporal_constraint(const Tracklet& a, const Tracklet& b) { return temporal_overlap(a, b) ? 0 : 1; }

int exit_constraint(const Tracklet& from, const Tracklet& to, const ExitMap& exit_map) {
  return to.start() > from.end() && !exits(from, exit_map) ? 1 : 0;
}

int limiting(const Tracklet& from, const Tracklet& to, const ExitMap& exit_map) {
  return temporal_constraint(from, to) * exit_constraint(from, to, exit_map);
}

std::set<int> assess_difficult(std::span<const Tracklet> tracklets, const RunConfig& cfg) {
  std::set<int> flagged;
  for (std::size_t i = 0; i < tracklets.size(); ++i) {
    for (std::size_t k = i + 1; k < tracklets.size(); ++k) {
      const Tracklet& a = tracklets[i];
      const Tracklet& b = tracklets[k];
      if (!temporal_overlap(a, b)) continue;
      for (const int f : {a.start(), a.end(), b.start(), b.end()}) {
        if (!a.covers(f) || !b.covers(f)) continue;
        const Box& ba = a.at_frame(f).box;
        const Box& bb = b.at_frame(f).box;
        if (intersection_area(ba, bb) >= cfg.overlap_eta * std::min(ba.area(), bb.area())) {
          flagged.insert(a.id);
          flagged.insert(b.id);
          break;
        }
      }
    }
  }
  return flagged;
}

int weight_level(bool flagged, int gap, const RunConfig& cfg) {
  if (!flagged || gap < 1) return 0;
  return gap <= cfg.gap_bound ? 1 : 2;
}

double level_lambda(int level, double lambda1, double lambda2) {
  switch (level) {
    case 1: return lambda1;
    case 2: return lambda2;
    default: return 1.0;
  }
}

double fused_score(double p_m, double p_a, int limiting_value, double lambda) {
  if (limiting_value == 0 || (std::isinf(p_m) && p_m < 0.0)) return 0.0;
  const double m = std::clamp(p_m, 0.0, 1.0);
  const double weighted = lambda == 0.0 ? 1.0 : std::pow(m, lambda);
  return weighted * p_a;
}

double fused_score(double p_m, double p_a, int limiting_value, bool flagged, int gap, const RunConfig& cfg) {
  return fused_score(p_m, p_a, limiting_value, level_lambda(weight_level(flagged, gap, cfg), cfg.lambda1, cfg.lambda2));
}

double transition_cost(double score) {
  if (!(score >= kScoreFloor)) return kNoEdge;
  return -std::log(score);
}

AffinityTable build_table(std::span<const Tracklet> tracklets, std::span<const std::pair<int, int>> candidates,
                          const metric::MetricSet& metrics, const metric::ProbeSet& probes,
                          const ExitMap& exit_map, const RunConfig& cfg) {
  std::map<int, const Tracklet*> by_id;
  for (const auto& t : tracklets) by_id[t.id] = &t;
  const auto get = [&](int id) -> const Tracklet& {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("affinity: unknown tracklet id " + std::to_string(id));
    return *it->second;
  };

  AffinityTable table;
  table.flagged = assess_difficult(tracklets, cfg);
  const bool appearance = !metrics.empty();
  const dynamics::RankOptions rank{cfg.rank_tol, cfg.rank_noise_gain};

  std::vector<double> products;
  for (const auto& [from_id, to_id] : candidates) {
    const Tracklet& a = get(from_id);
    const Tracklet& b = get(to_id);
    AffinityRow row;
    row.segment = (a.end() - 1) / cfg.segment_len;
    row.from = a.id;
    row.to = b.id;
    row.c_t = temporal_constraint(a, b);
    row.c_e = exit_constraint(a, b, exit_map);
    row.p_m = dynamics::motion_similarity(a, b, rank);
    row.gap = b.start() > a.end() ? gap_frames(a, b) : 0;
    const bool flagged = table.flagged.contains(a.id) || table.flagged.contains(b.id);
    row.level = weight_level(flagged, row.gap, cfg);
    double product = 0.0;
    if (appearance && row.c_t * row.c_e == 1) product = appearance_product(a, b, metrics, probes);
    products.push_back(product);
    table.rows.push_back(row);
  }

  if (appearance) {
    std::map<int, double> gamma;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      const auto& row = table.rows[k];
      if (row.c_t * row.c_e == 0 || std::isinf(row.p_m) || products[k] <= 0.0) continue;
      const auto [it, inserted] = gamma.emplace(row.segment, products[k]);
      if (!inserted) it->second = std::min(it->second, products[k]);
    }
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      auto& row = table.rows[k];
      const auto it = gamma.find(row.segment);
      row.p_a = it == gamma.end() ? 1.0 : appearance_affinity(products[k], it->second);
    }
  }
  rescore(table, cfg.lambda1, cfg.lambda2);
  return table;
}

void rescore(AffinityTable& table, double lambda1, double lambda2) {
  for (auto& row : table.rows) {
    row.lambda = level_lambda(row.level, lambda1, lambda2);
    row.score = fused_score(row.p_m, row.p_a, row.c_t * row.c_e, row.lambda);
    row.cost = transition_cost(row.score);
  }
}

std::string format_table(const AffinityTable& table) {
  std::ostringstream out;
  out << "segment,from,to,gap,p_m,p_a,c_t,c_e,flagged,lambda,score,cost\n";
  for (const auto& r : table.rows) {
    const bool flagged = table.flagged.contains(r.from) || table.flagged.contains(r.to);
    out << r.segment << ',' << r.from << ',' << r.to << ',' << r.gap << ',' << io::format_real(r.p_m) << ','
        << io::format_real(r.p_a) << ',' << r.c_t << ',' << r.c_e << ',' << (flagged ? 1 : 0) << ','
        << io::format_real(r.lambda) << ',' << io::format_real(r.score) << ','
        << (std::isinf(r.cost) ? std::string("inf") : io::format_real(r.cost)) << '\n';
  }
  return out.str();
}

}  // namespace tracklink::affinity
