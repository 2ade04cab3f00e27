#include "tracklink/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tracklink::metric {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStepTol = 1e-6;
constexpr double kColumnTol = 1e-4;
constexpr int kMaxStepsPerColumn = 200;
constexpr int kMaxBacktracks = 60;

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Type-7 quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<int, int> segment_window(int frame, int segment_len) {
  const int first = ((frame - 1) / segment_len) * segment_len + 1;
  return {first, first + segment_len - 1};
}

const Eigen::VectorXd& feature_of(const Detection& d, int tracklet_id) {
  if (!d.feature) {
    throw Error("metric: tracklet " + std::to_string(tracklet_id) + " has a detection without features");
  }
  return *d.feature;
}

// Loss over the pair list with precomputed squared distances under the accepted
// columns. Each unique vector is projected once per evaluation.
class ColumnObjective {
 public:
  ColumnObjective(const PairSet& pairs, std::vector<std::pair<int, int>> index, const Eigen::MatrixXd& basis)
      : index_(std::move(index)) {
    const auto d = pairs.positives.front().size();
    xp_.resize(d, static_cast<Eigen::Index>(pairs.positives.size()));
    xn_.resize(d, static_cast<Eigen::Index>(pairs.negatives.size()));
    for (std::size_t i = 0; i < pairs.positives.size(); ++i) xp_.col(static_cast<Eigen::Index>(i)) = pairs.positives[i];
    for (std::size_t i = 0; i < pairs.negatives.size(); ++i) xn_.col(static_cast<Eigen::Index>(i)) = pairs.negatives[i];
    if (basis.cols() > 0) {
      base_p_ = (basis.transpose() * xp_).colwise().squaredNorm().transpose();
      base_n_ = (basis.transpose() * xn_).colwise().squaredNorm().transpose();
    } else {
      base_p_ = Eigen::VectorXd::Zero(xp_.cols());
      base_n_ = Eigen::VectorXd::Zero(xn_.cols());
    }
  }

  double loss(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd pp = xp_.transpose() * w;
    const Eigen::VectorXd pn = xn_.transpose() * w;
    double total = 0.0;
    for (const auto& [p, n] : index_) {
      total += softplus(base_p_[p] + pp[p] * pp[p] - base_n_[n] - pn[n] * pn[n]);
    }
    return total;
  }

  double loss_and_gradient(const Eigen::VectorXd& w, Eigen::VectorXd& grad) const {
    const Eigen::VectorXd pp = xp_.transpose() * w;
    const Eigen::VectorXd pn = xn_.transpose() * w;
    Eigen::VectorXd cp = Eigen::VectorXd::Zero(pp.size());
    Eigen::VectorXd cn = Eigen::VectorXd::Zero(pn.size());
    double total = 0.0;
    for (const auto& [p, n] : index_) {
      const double arg = base_p_[p] + pp[p] * pp[p] - base_n_[n] - pn[n] * pn[n];
      total += softplus(arg);
      const double s = sigmoid(arg);
      cp[p] += s;
      cn[n] += s;
    }
    grad = 2.0 * (xp_ * cp.cwiseProduct(pp)) - 2.0 * (xn_ * cn.cwiseProduct(pn));
    return total;
  }

  // Sum over the selected pairs of x_n x_n^T - x_p x_p^T.
  Eigen::MatrixXd pair_scatter() const {
    Eigen::VectorXd wp = Eigen::VectorXd::Zero(xp_.cols());
    Eigen::VectorXd wn = Eigen::VectorXd::Zero(xn_.cols());
    for (const auto& [p, n] : index_) {
      wp[p] += 1.0;
      wn[n] += 1.0;
    }
    return xn_ * wn.asDiagonal() * xn_.transpose() - xp_ * wp.asDiagonal() * xp_.transpose();
  }

  const Eigen::MatrixXd& positives() const { return xp_; }
  const Eigen::MatrixXd& negatives() const { return xn_; }

 private:
  std::vector<std::pair<int, int>> index_;
  Eigen::MatrixXd xp_;
  Eigen::MatrixXd xn_;
  Eigen::VectorXd base_p_;
  Eigen::VectorXd base_n_;
};

Eigen::VectorXd project_out(const Eigen::MatrixXd& basis, Eigen::VectorXd v) {
  if (basis.cols() == 0) return v;
  // Two passes keep the result orthogonal to working precision.
  v -= basis * (basis.transpose() * v);
  v -= basis * (basis.transpose() * v);
  return v;
}

Eigen::VectorXd initial_column(const ColumnObjective& obj, const Eigen::MatrixXd& basis) {
  const Eigen::Index d = obj.positives().rows();
  Eigen::MatrixXd c = obj.pair_scatter();
  if (basis.cols() > 0) {
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d) - basis * basis.transpose();
    c = p * c * p;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  Eigen::VectorXd v = project_out(basis, eig.eigenvectors().col(d - 1));
  if (v.norm() < 1e-12) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double n = project_out(basis, Eigen::VectorXd::Unit(d, k)).norm();
      if (n > best_norm + 1e-12) {
        best_norm = n;
        best = k;
      }
    }
    v = project_out(basis, Eigen::VectorXd::Unit(d, best));
  }
  v.normalize();
  // Deterministic sign: largest-magnitude entry positive.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
  return v;
}

// Index of the probe detection: strongest score in the first probe_window frames.
std::size_t probe_index(const Tracklet& t, const RunConfig& cfg) {
  const std::size_t window = std::min(t.detections.size(), static_cast<std::size_t>(cfg.probe_window));
  std::size_t best = 0;
  for (std::size_t k = 1; k < window; ++k) {
    if (t.detections[k].score > t.detections[best].score) best = k;
  }
  return best;
}

// Same-identity reference distances: every pair inside a tracklet's probe
// window. Each is distributed like a detection's distance to its own probe,
// and there are far more of them than probe distances alone.
std::vector<double> probe_window_distances(const TargetMetric& m, std::span<const Tracklet* const> group,
                                           const RunConfig& cfg) {
  std::vector<double> out;
  for (const Tracklet* t : group) {
    const std::size_t window = std::min(t->detections.size(), static_cast<std::size_t>(cfg.probe_window));
    for (std::size_t i = 0; i < window; ++i) {
      for (std::size_t k = i + 1; k < window; ++k) {
        out.push_back(distance(m, *t->detections[i].feature, *t->detections[k].feature));
      }
    }
  }
  return out;
}

// The run start is only where the head probe stops matching; a noisy last
// head detection can open the run one frame early. Near the cut, each frame
// goes to whichever side it is closer to: the head probe or the mean of the
// rest of the run.
std::size_t settle_cut(const Tracklet& t, const TargetMetric& m, const Eigen::VectorXd& probe, std::size_t cut,
                       const RunConfig& cfg) {
  const auto run = static_cast<std::size_t>(cfg.split_run);
  const std::size_t end = std::min(t.detections.size(), cut + run);
  if (end <= cut + 1) return cut;
  Eigen::VectorXd tail = Eigen::VectorXd::Zero(probe.size());
  for (std::size_t k = cut + 1; k < end; ++k) tail += *t.detections[k].feature;
  tail /= static_cast<double>(end - cut - 1);

  const std::size_t lo = cut + 1 > run ? cut + 1 - run : 1;
  const auto cost = [&](std::size_t c) {
    double sum = 0.0;
    for (std::size_t k = lo; k <= cut; ++k) {
      sum += distance(m, *t.detections[k].feature, k < c ? probe : tail);
    }
    return sum;
  };
  std::size_t best = cut;
  double best_cost = cost(cut);
  for (std::size_t c = lo; c <= cut + 1; ++c) {
    const double v = cost(c);
    if (v < best_cost) {
      best = c;
      best_cost = v;
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> strongest_samples(const Tracklet& t, SamplePhase phase, const RunConfig& cfg) {
  std::size_t window = t.detections.size();
  if (phase == SamplePhase::initial) window = std::min(window, static_cast<std::size_t>(cfg.probe_window));
  std::vector<std::size_t> idx(window);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return t.detections[a].score > t.detections[b].score; });
  idx.resize(std::min(idx.size(), static_cast<std::size_t>(cfg.strongest_q)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

bool distinct_targets(const Tracklet& a, const Tracklet& b, SamplePhase phase, const RunConfig& cfg,
                      const ExitMap& exit_map) {
  if (phase == SamplePhase::initial) {
    const int a_last = std::min(a.end(), a.start() + cfg.probe_window - 1);
    const int b_last = std::min(b.end(), b.start() + cfg.probe_window - 1);
    if (a.start() <= b_last && b.start() <= a_last) return true;
  } else if (temporal_overlap(a, b)) {
    return true;
  }
  if (temporal_overlap(a, b)) return false;
  const Tracklet& earlier = a.end() < b.start() ? a : b;
  return exits(earlier, exit_map);
}

PairSet collect_pairs(const Tracklet& target, std::span<const Tracklet> others, SamplePhase phase,
                      const RunConfig& cfg, const ExitMap& exit_map) {
  PairSet out;
  const auto own = strongest_samples(target, phase, cfg);
  for (std::size_t i = 0; i < own.size(); ++i) {
    for (std::size_t j = i + 1; j < own.size(); ++j) {
      out.positives.push_back((feature_of(target.detections[own[i]], target.id) -
                               feature_of(target.detections[own[j]], target.id))
                                  .cwiseAbs());
    }
  }
  for (const auto& other : others) {
    if (other.id == target.id || !distinct_targets(target, other, phase, cfg, exit_map)) continue;
    const auto theirs = strongest_samples(other, phase, cfg);
    for (const std::size_t i : own) {
      for (const std::size_t j : theirs) {
        const auto& a = feature_of(target.detections[i], target.id);
        const auto& b = feature_of(other.detections[j], other.id);
        if (a.size() != b.size()) throw Error("metric: feature dimension mismatch");
        out.negatives.push_back((a - b).cwiseAbs());
      }
    }
  }
  return out;
}

TargetMetric learn_metric(const PairSet& pairs, const RunConfig& cfg, std::uint64_t seed) {
  if (pairs.positives.empty() || pairs.negatives.empty()) {
    throw Error("learn_metric: needs at least one positive and one negative pair");
  }
  const auto d = pairs.positives.front().size();
  for (const auto* side : {&pairs.positives, &pairs.negatives}) {
    for (const auto& x : *side) {
      if (x.size() != d) throw Error("learn_metric: inconsistent pair dimensions");
      if (!x.allFinite()) throw Error("learn_metric: non-finite difference vector");
    }
  }

  const std::size_t np = pairs.positives.size();
  const std::size_t nn = pairs.negatives.size();
  const std::size_t total = np * nn;
  const auto cap = static_cast<std::size_t>(cfg.pair_cap);
  std::vector<std::size_t> chosen;
  if (total <= cap) {
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  } else {
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates over a virtual index range.
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, total - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cap));
    std::sort(chosen.begin(), chosen.end());
  }
  std::vector<std::pair<int, int>> index;
  index.reserve(chosen.size());
  for (const std::size_t k : chosen) index.emplace_back(static_cast<int>(k / nn), static_cast<int>(k % nn));

  const int r_max = std::min(static_cast<int>(d), cfg.max_columns);
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(d), 0);
  TargetMetric m;
  double current = ColumnObjective(pairs, index, basis).loss(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)));
  if (!std::isfinite(current)) throw Error("learn_metric: non-finite loss");
  m.loss_trace.push_back(current);

  while (basis.cols() < r_max) {
    const ColumnObjective obj(pairs, index, basis);
    const Eigen::VectorXd dir = initial_column(obj, basis);
    // Scale the starting direction by the best power of two; the loss at scale 0
    // equals the incumbent, so a useful direction always finds a start below it.
    Eigen::VectorXd w = dir * std::ldexp(1.0, -20);
    double f = obj.loss(w);
    for (int e = -10; e <= 6; ++e) {
      const Eigen::VectorXd cand = dir * std::ldexp(1.0, e);
      const double fc = obj.loss(cand);
      if (std::isfinite(fc) && fc < f) {
        f = fc;
        w = cand;
      }
    }
    std::vector<double> trace{f};
    Eigen::VectorXd grad;
    f = obj.loss_and_gradient(w, grad);
    for (int step = 0; step < kMaxStepsPerColumn; ++step) {
      const Eigen::VectorXd g = project_out(basis, grad);
      const double g2 = g.squaredNorm();
      if (g2 <= 1e-30) break;
      double t = 1.0;
      bool accepted = false;
      Eigen::VectorXd next;
      double f_next = f;
      for (int b = 0; b < kMaxBacktracks; ++b, t *= 0.5) {
        next = w - t * g;
        f_next = obj.loss(next);
        if (std::isfinite(f_next) && f_next <= f - kArmijo * t * g2) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      const double gain = (f - f_next) / std::max(std::abs(f), 1e-300);
      w = project_out(basis, next);
      f = obj.loss_and_gradient(w, grad);
      trace.push_back(f);
      if (gain < kStepTol) break;
    }
    if (!std::isfinite(f)) throw Error("learn_metric: non-finite loss");

    const bool first = basis.cols() == 0;
    const double rel = (current - f) / std::max(std::abs(current), 1e-300);
    if (!first && !(rel >= kColumnTol)) break;
    if (w.norm() == 0.0) w = dir * std::ldexp(1.0, -20);
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = w.normalized();
    m.W.conservativeResize(static_cast<Eigen::Index>(d), basis.cols());
    m.W.col(m.W.cols() - 1) = w;
    m.loss_trace.insert(m.loss_trace.end(), trace.begin(), trace.end());
    current = f;
    if (rel < kColumnTol) break;
  }
  m.loss = current;
  return m;
}

TargetMetric identity_metric(int feature_dim) {
  if (feature_dim < 1) throw Error("identity_metric: feature dimension must be positive");
  TargetMetric m;
  m.W = Eigen::MatrixXd::Identity(feature_dim, feature_dim);
  return m;
}

double distance(const TargetMetric& m, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() != m.W.rows()) {
    throw Error("distance: dimension mismatch (" + std::to_string(a.size()) + ", " + std::to_string(b.size()) +
                " vs metric " + std::to_string(m.W.rows()) + ")");
  }
  return (m.W.transpose() * (a - b).cwiseAbs()).squaredNorm();
}

ProbeSet build_probe_set(std::span<const Tracklet> tracklets, const RunConfig& cfg) {
  ProbeSet probes;
  for (const auto& t : tracklets) {
    if (t.has_features()) probes[t.id] = *t.detections[probe_index(t, cfg)].feature;
  }
  return probes;
}

void calibrate(TargetMetric& m, std::span<const Tracklet* const> group, const RunConfig& cfg) {
  std::vector<double> ref = probe_window_distances(m, group, cfg);
  std::sort(ref.begin(), ref.end());
  const double median = ref.empty() ? 0.0 : quantile(ref, 0.5);
  if (median > 0.0 && std::isfinite(median)) {
    m.W /= std::sqrt(median);
    for (double& v : ref) v /= median;
  }
  if (cfg.distance_threshold) {
    m.split_threshold = *cfg.distance_threshold;
  } else if (ref.empty()) {
    m.split_threshold = std::numeric_limits<double>::infinity();
  } else {
    m.split_threshold = quantile(ref, 0.5) + cfg.split_iqr_gain * (quantile(ref, 0.75) - quantile(ref, 0.25));
  }
}

MetricSet learn_metrics(std::span<const Tracklet> tracklets, SamplePhase phase, const RunConfig& cfg,
                        const ExitMap& exit_map) {
  MetricSet out;
  for (const auto& t : tracklets) {
    if (!t.has_features()) continue;
    const auto [lo, hi] = segment_window(t.start(), cfg.segment_len);
    std::vector<Tracklet> local;
    std::vector<const Tracklet*> group{&t};
    for (const auto& o : tracklets) {
      if (o.id != t.id && o.has_features() && o.end() >= lo && o.start() <= hi) {
        local.push_back(o);
        group.push_back(&o);
      }
    }
    const PairSet pairs = collect_pairs(t, local, phase, cfg, exit_map);
    TargetMetric m;
    if (pairs.negatives.empty() || pairs.positives.empty()) {
      m = identity_metric(static_cast<int>(t.detections.front().feature->size()));
    } else {
      const std::uint64_t seed = cfg.rng_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(t.id);
      m = learn_metric(pairs, cfg, seed);
    }
    m.tracklet_id = t.id;
    calibrate(m, group, cfg);
    out.emplace(t.id, std::move(m));
  }
  return out;
}

std::vector<Tracklet> refine_tracklets(std::span<const Tracklet> tracklets, const MetricSet& metrics,
                                       const ProbeSet& probes, const RunConfig& cfg, int& next_id) {
  std::vector<Tracklet> out;
  for (const auto& t : tracklets) {
    const auto m = metrics.find(t.id);
    const auto g = probes.find(t.id);
    if (m == metrics.end() || g == probes.end()) {
      out.push_back(t);
      continue;
    }
    std::size_t cut = 0;
    int run = 0;
    for (std::size_t k = 0; k < t.detections.size(); ++k) {
      if (distance(m->second, *t.detections[k].feature, g->second) > m->second.split_threshold) {
        if (++run == cfg.split_run) {
          cut = k + 1 - static_cast<std::size_t>(cfg.split_run);
          break;
        }
      } else {
        run = 0;
      }
    }
    if (cut == 0) {
      out.push_back(t);
      continue;
    }
    cut = settle_cut(t, m->second, g->second, cut, cfg);
    Tracklet head{t.id, {t.detections.begin(), t.detections.begin() + static_cast<std::ptrdiff_t>(cut)}};
    Tracklet tail{0, {t.detections.begin() + static_cast<std::ptrdiff_t>(cut), t.detections.end()}};
    if (head.detections.size() >= 2) out.push_back(std::move(head));
    if (tail.detections.size() >= 2) {
      tail.id = next_id++;
      out.push_back(std::move(tail));
    }
  }
  return out;
}

std::vector<Tracklet> refine_iteratively(std::vector<Tracklet> tracklets, const RunConfig& cfg,
                                         const ExitMap& exit_map) {
  int next_id = 1;
  for (const auto& t : tracklets) next_id = std::max(next_id, t.id + 1);
  for (int iter = 0; iter < cfg.refine_iters; ++iter) {
    const ProbeSet probes = build_probe_set(tracklets, cfg);
    const MetricSet metrics = learn_metrics(tracklets, SamplePhase::initial, cfg, exit_map);
    const int before = next_id;
    std::size_t count_before = tracklets.size();
    tracklets = refine_tracklets(tracklets, metrics, probes, cfg, next_id);
    if (next_id == before && tracklets.size() == count_before) break;
  }
  return tracklets;
}

}  // namespace tracklink::metric
