#include "tracklink/association.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "test_util.hpp"

using namespace tracklink;

namespace {

affinity::AffinityRow row(int from, int to, double cost) {
  affinity::AffinityRow r;
  r.from = from;
  r.to = to;
  r.cost = cost;
  r.score = std::isinf(cost) ? 0.0 : std::exp(-cost);
  return r;
}

double total_cost(const std::vector<Trajectory>& ts) {
  double c = 0.0;
  for (const auto& t : ts) c += t.cost;
  return c;
}

// Every tracklet chooses a successor among its finite rows or none; successors
// must be distinct. Each chain pays the entry and exit cost once.
double brute_force(int n, const std::vector<affinity::AffinityRow>& rows, double terminal) {
  std::vector<std::vector<std::pair<int, double>>> options(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) options[static_cast<std::size_t>(v)].push_back({-1, 0.0});
  for (const auto& r : rows) {
    if (!std::isinf(r.cost)) options[static_cast<std::size_t>(r.from - 1)].push_back({r.to - 1, r.cost});
  }
  double best = INFINITY;
  std::vector<int> succ(static_cast<std::size_t>(n));
  std::function<void(int, double)> rec = [&](int v, double acc) {
    if (v == n) {
      std::vector<int> pred(static_cast<std::size_t>(n), 0);
      int chains = n;
      for (const int s : succ) {
        if (s < 0) continue;
        if (++pred[static_cast<std::size_t>(s)] > 1) return;
        --chains;
      }
      best = std::min(best, acc + 2.0 * terminal * chains);
      return;
    }
    for (const auto& [s, c] : options[static_cast<std::size_t>(v)]) {
      succ[static_cast<std::size_t>(v)] = s;
      rec(v + 1, acc + c);
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace

TEST_CASE("segment partition") {
  const RunConfig cfg;
  CHECK(partition_segments(120, cfg) == std::vector<FrameWindow>{{1, 50}, {51, 100}, {101, 120}});
  CHECK(partition_segments(50, cfg) == std::vector<FrameWindow>{{1, 50}});
  CHECK(partition_segments(1, cfg) == std::vector<FrameWindow>{{1, 1}});
  CHECK(segment_index(50, cfg) == 0);
  CHECK(segment_index(51, cfg) == 1);
  RunConfig tiny;
  tiny.segment_len = 1;
  CHECK_THROWS_AS(partition_segments(10, tiny), Error);
}

TEST_CASE("candidate pairs stay local or bridge one boundary") {
  const RunConfig cfg;
  const std::vector<Tracklet> ts{
      test::line_tracklet(1, 1, 10, {0, 0}, {1, 0}),   // ends 10
      test::line_tracklet(2, 20, 15, {0, 0}, {1, 0}),  // 20..34, ends inside the last 20 frames
      test::line_tracklet(3, 40, 10, {0, 0}, {1, 0}),  // ends 49
      test::line_tracklet(4, 60, 10, {0, 0}, {1, 0}),  // next segment, within 20 frames
      test::line_tracklet(5, 75, 10, {0, 0}, {1, 0}),  // next segment, too late to bridge
      test::line_tracklet(6, 5, 10, {0, 0}, {1, 0}),   // overlaps 1
  };
  const auto pairs = candidate_pairs(ts, cfg);
  CHECK(pairs == std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {4, 5}, {6, 2}, {6, 3}});
}

TEST_CASE("two linkable tracklets form one trajectory") {
  const RunConfig cfg;
  const std::vector<Tracklet> ts{test::line_tracklet(1, 1, 5, {100, 100}, {2, 0}),
                                 test::line_tracklet(2, 8, 5, {114, 100}, {2, 0})};
  affinity::AffinityTable table;
  table.rows.push_back(row(1, 2, 0.0));
  const auto out = associate(ts, table, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].tracklet_ids == std::vector<int>{1, 2});
  CHECK(out[0].cost == doctest::Approx(-2.0 * std::log(0.1)));
  REQUIRE(out[0].boxes.size() == 12);
  for (std::size_t k = 0; k < out[0].boxes.size(); ++k) {
    CHECK(out[0].boxes[k].frame == 1 + static_cast<int>(k));
    CHECK(out[0].boxes[k].box.center().x() == doctest::Approx(100 + 2.0 * static_cast<double>(k)));
  }

  table.rows[0].cost = affinity::kNoEdge;
  const auto split = associate(ts, table, cfg);
  REQUIRE(split.size() == 2);
  CHECK(split[0].tracklet_ids == std::vector<int>{1});
  CHECK(split[1].tracklet_ids == std::vector<int>{2});

  affinity::AffinityTable unknown;
  unknown.rows.push_back(row(1, 7, 0.0));
  CHECK_THROWS_AS(associate(ts, unknown, cfg), Error);
}

TEST_CASE("association matches brute force and is monotone in link costs") {
  const RunConfig cfg;
  const double terminal = -std::log(cfg.entry_exit_prob);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cost(0.0, 6.0);
  std::bernoulli_distribution edge(0.5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 5;
    std::vector<Tracklet> ts;
    for (int k = 0; k < n; ++k) ts.push_back(test::line_tracklet(k + 1, 1 + 6 * k, 4, {100, 100}, {1, 0}));
    affinity::AffinityTable table;
    for (int a = 1; a <= n; ++a) {
      for (int b = a + 1; b <= n; ++b) {
        if (edge(rng)) table.rows.push_back(row(a, b, cost(rng)));
      }
    }
    const auto out = associate(ts, table, cfg);
    const double got = total_cost(out);
    CHECK(got == doctest::Approx(brute_force(n, table.rows, terminal)));
    std::set<int> members;
    for (const auto& t : out) {
      for (const int id : t.tracklet_ids) CHECK(members.insert(id).second);
      for (std::size_t k = 1; k < t.boxes.size(); ++k) CHECK(t.boxes[k].frame == t.boxes[k - 1].frame + 1);
    }
    CHECK(static_cast<int>(members.size()) == n);
    if (!table.rows.empty()) {
      auto lowered = table;
      lowered.rows[static_cast<std::size_t>(trial) % lowered.rows.size()].cost *= 0.5;
      CHECK(total_cost(associate(ts, lowered, cfg)) <= got + 1e-12);
    }
  }
}

TEST_CASE("trajectory summary json") {
  Trajectory t;
  t.id = 1;
  t.tracklet_ids = {3, 5};
  t.boxes = {{4, {0, 0, 1, 1}}, {9, {0, 0, 1, 1}}};
  t.cost = 1.5;
  const auto j = nlohmann::json::parse(format_summary({t}));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["id"] == 1);
  CHECK(j[0]["tracklets"] == std::vector<int>{3, 5});
  CHECK(j[0]["first_frame"] == 4);
  CHECK(j[0]["last_frame"] == 9);
  CHECK(j[0]["cost"] == 1.5);
}
