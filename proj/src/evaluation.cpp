#include "tracklink/evaluation.hpp"

#include "tracklink/association.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace tracklink {

namespace {

constexpr double kMatchIou = 0.5;
constexpr double kForbidden = 1e6;

// Shortest augmenting path with row/column potentials; requires rows <= cols.
std::vector<int> hungarian_wide(const std::vector<std::vector<double>>& a, int n, int m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return row_to_col;
}

struct Observation {
  int id = 0;
  Box box;
};

std::map<int, std::vector<Observation>> by_frame(const TrackSet& tracks) {
  std::map<int, std::vector<Observation>> out;
  for (const auto& [id, boxes] : tracks) {
    for (const auto& fb : boxes) out[fb.frame].push_back({id, fb.box});
  }
  return out;
}

bool better(const MetricReport& candidate, const MetricReport& incumbent) {
  if (candidate.mota > incumbent.mota) return true;
  return candidate.mota == incumbent.mota && candidate.ids < incumbent.ids;
}

}  // namespace

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost.front().size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != m) throw Error("hungarian: ragged cost matrix");
  }
  if (m == 0) return std::vector<int>(static_cast<std::size_t>(n), -1);
  if (n <= m) return hungarian_wide(cost, n, m);
  std::vector<std::vector<double>> t(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) t[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const std::vector<int> col_to_row = hungarian_wide(t, m, n);
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < m; ++j) {
    if (col_to_row[static_cast<std::size_t>(j)] >= 0) out[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(j)])] = j;
  }
  return out;
}

MetricReport evaluate(const TrackSet& result, const TrackSet& ground_truth) {
  const auto gt_frames = by_frame(ground_truth);
  if (gt_frames.empty()) throw Error("evaluate: ground truth is empty");
  const auto hyp_frames = by_frame(result);

  std::set<int> frames;
  for (const auto& [f, obs] : gt_frames) frames.insert(f);
  for (const auto& [f, obs] : hyp_frames) frames.insert(f);

  MetricReport r;
  r.gt = static_cast<int>(ground_truth.size());
  r.frames = *frames.rbegin() - *frames.begin() + 1;

  std::map<int, int> previous;       // gt id -> hyp id matched in the previous frame
  std::map<int, int> last_matched;   // gt id -> most recent hyp id
  std::map<int, int> matched_frames; // gt id -> frames matched
  std::map<int, bool> interrupted;   // gt id -> unmatched since its last match
  double iou_sum = 0.0;
  static const std::vector<Observation> kNone;

  for (const int f : frames) {
    const auto gi = gt_frames.find(f);
    const auto hi = hyp_frames.find(f);
    const auto& gts = gi == gt_frames.end() ? kNone : gi->second;
    const auto& hyps = hi == hyp_frames.end() ? kNone : hi->second;

    std::map<int, int> current;
    std::set<int> used_hyp;
    for (const auto& g : gts) {
      const auto prev = previous.find(g.id);
      if (prev == previous.end()) continue;
      for (const auto& h : hyps) {
        if (h.id == prev->second && !used_hyp.contains(h.id) && iou(g.box, h.box) > kMatchIou) {
          current[g.id] = h.id;
          used_hyp.insert(h.id);
          break;
        }
      }
    }

    std::vector<const Observation*> open_gt;
    std::vector<const Observation*> open_hyp;
    for (const auto& g : gts) {
      if (!current.contains(g.id)) open_gt.push_back(&g);
    }
    for (const auto& h : hyps) {
      if (!used_hyp.contains(h.id)) open_hyp.push_back(&h);
    }
    if (!open_gt.empty() && !open_hyp.empty()) {
      std::vector<std::vector<double>> cost(open_gt.size(), std::vector<double>(open_hyp.size(), kForbidden));
      for (std::size_t i = 0; i < open_gt.size(); ++i) {
        for (std::size_t j = 0; j < open_hyp.size(); ++j) {
          const double v = iou(open_gt[i]->box, open_hyp[j]->box);
          if (v > kMatchIou) cost[i][j] = 1.0 - v;
        }
      }
      const auto assign = hungarian(cost);
      for (std::size_t i = 0; i < open_gt.size(); ++i) {
        const int j = assign[i];
        if (j < 0 || cost[i][static_cast<std::size_t>(j)] >= kForbidden) continue;
        current[open_gt[i]->id] = open_hyp[static_cast<std::size_t>(j)]->id;
      }
    }

    for (const auto& g : gts) {
      const auto m = current.find(g.id);
      if (m == current.end()) {
        if (last_matched.contains(g.id)) interrupted[g.id] = true;
        continue;
      }
      const auto last = last_matched.find(g.id);
      if (last != last_matched.end() && last->second != m->second) ++r.ids;
      if (interrupted[g.id]) {
        ++r.frag;
        interrupted[g.id] = false;
      }
      last_matched[g.id] = m->second;
      ++matched_frames[g.id];
      for (const auto& h : hyps) {
        if (h.id == m->second) {
          iou_sum += iou(g.box, h.box);
          break;
        }
      }
    }

    r.gt_detections += static_cast<int>(gts.size());
    r.matched_count += static_cast<int>(current.size());
    r.false_negatives += static_cast<int>(gts.size() - current.size());
    r.false_positives += static_cast<int>(hyps.size() - current.size());
    previous = std::move(current);
  }

  for (const auto& [id, boxes] : ground_truth) {
    const double coverage = static_cast<double>(matched_frames[id]) / static_cast<double>(boxes.size());
    if (coverage >= 0.8) {
      ++r.mt;
    } else if (coverage < 0.2) {
      ++r.ml;
    } else {
      ++r.pt;
    }
  }

  const double gt_dets = static_cast<double>(r.gt_detections);
  r.mota = 1.0 - static_cast<double>(r.false_negatives + r.false_positives + r.ids) / gt_dets;
  r.motp = r.matched_count > 0 ? iou_sum / static_cast<double>(r.matched_count) : 0.0;
  r.recall = static_cast<double>(r.matched_count) / gt_dets;
  const int hyp_total = r.matched_count + r.false_positives;
  r.precision = hyp_total > 0 ? static_cast<double>(r.matched_count) / static_cast<double>(hyp_total) : 0.0;
  r.faf = static_cast<double>(r.false_positives) / static_cast<double>(r.frames);
  r.ids_per_match = r.matched_count > 0 ? static_cast<double>(r.ids) / static_cast<double>(r.matched_count) : 0.0;
  return r;
}

std::string format_report(const MetricReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%8s %8s %8s %9s %8s %5s %5s %5s %5s %6s %5s\n"
                "%7.2f%% %7.2f%% %7.2f%% %8.2f%% %8.4f %5d %5d %5d %5d %6d %5d\n",
                "MOTA", "MOTP", "Recall", "Precision", "FAF", "GT", "MT", "PT", "ML", "Frag", "IDS", 100.0 * r.mota,
                100.0 * r.motp, 100.0 * r.recall, 100.0 * r.precision, r.faf, r.gt, r.mt, r.pt, r.ml, r.frag, r.ids);
  return buf;
}

std::string format_report_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["MOTA"] = r.mota;
  j["MOTP"] = r.motp;
  j["Recall"] = r.recall;
  j["Precision"] = r.precision;
  j["FAF"] = r.faf;
  j["GT"] = r.gt;
  j["MT"] = r.mt;
  j["PT"] = r.pt;
  j["ML"] = r.ml;
  j["Frag"] = r.frag;
  j["IDS"] = r.ids;
  j["matched_count"] = r.matched_count;
  j["ids_per_match"] = r.ids_per_match;
  j["FN"] = r.false_negatives;
  j["FP"] = r.false_positives;
  j["gt_detections"] = r.gt_detections;
  return j.dump(2) + "\n";
}

WeightResult learn_weights(std::span<const Tracklet> tracklets, affinity::AffinityTable table,
                           const TrackSet& ground_truth, const RunConfig& cfg) {
  WeightResult out;
  bool have = false;
  for (int level = 1; level <= 2; ++level) {
    double chosen = 0.0;
    for (int step = 0; step <= 10; ++step) {
      const double value = step / 10.0;
      const double l1 = level == 1 ? value : out.lambda1;
      const double l2 = level == 1 ? 0.0 : value;
      affinity::rescore(table, l1, l2);
      const MetricReport report = evaluate(to_track_set(associate(tracklets, table, cfg)), ground_truth);
      out.sweep.push_back({level, l1, l2, report.mota, report.ids});
      if (!have || better(report, out.report)) {
        have = true;
        out.report = report;
        chosen = value;
      }
    }
    if (level == 1) {
      out.lambda1 = chosen;
    } else {
      out.lambda2 = chosen;
    }
  }
  return out;
}

}  // namespace tracklink
