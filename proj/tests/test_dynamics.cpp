#include "tracklink/dynamics.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace tracklink;
using namespace tracklink::dynamics;

namespace {

DynamicSequence seq_of(const std::vector<Eigen::Vector2d>& p) { return DynamicSequence{1, p}; }

std::vector<Eigen::Vector2d> poly(int n, Eigen::Vector2d c0, Eigen::Vector2d c1, Eigen::Vector2d c2 = {0, 0}) {
  std::vector<Eigen::Vector2d> out;
  for (int t = 1; t <= n; ++t) out.push_back(c0 + t * c1 + t * t * c2);
  return out;
}

// Independent numerical rank of an explicitly written block Hankel matrix.
int oracle_rank(const std::vector<Eigen::Vector2d>& p, double tol) {
  const int l = static_cast<int>(p.size());
  const int n = l - (l + 2) / 3 + 1;
  const int rows = l - n + 1;
  Eigen::MatrixXd h(2 * rows, n);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) {
      h(2 * i, j) = p[static_cast<std::size_t>(i + j)].x();
      h(2 * i + 1, j) = p[static_cast<std::size_t>(i + j)].y();
    }
  }
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(h).singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k) r += s(k) > tol * s(0) ? 1 : 0;
  return r;
}

}  // namespace

TEST_CASE("hankel column count") {
  CHECK(hankel_columns(9) == 7);
  CHECK(hankel_columns(10) == 7);
  CHECK(hankel_columns(3) == 3);
}

TEST_CASE("hankel layout") {
  const auto p = poly(9, {0, 0}, {1, 10});
  const auto h = build_hankel(seq_of(p));
  CHECK(h.columns == 7);
  CHECK(h.block_rows == 3);
  REQUIRE(h.values.rows() == 6);
  REQUIRE(h.values.cols() == 7);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 7; ++j) {
      CHECK(h.values(2 * i, j) == p[static_cast<std::size_t>(i + j)].x());
      CHECK(h.values(2 * i + 1, j) == p[static_cast<std::size_t>(i + j)].y());
    }
  }
  const auto c = build_hankel(seq_of(std::vector<Eigen::Vector2d>(8, Eigen::Vector2d(5, 5))));
  for (int j = 1; j < c.columns; ++j) CHECK(c.values.col(j) == c.values.col(0));
  CHECK_THROWS_AS(build_hankel(seq_of(poly(2, {0, 0}, {1, 1}))), Error);
}

TEST_CASE("raw rank of noise-free polynomial trajectories") {
  const double tol = 0.01;
  CHECK(estimate_rank(build_hankel(seq_of(std::vector<Eigen::Vector2d>(12, Eigen::Vector2d(5, 5)))), tol) == 1);
  const auto cv = poly(12, {0, 0}, {1, 2});
  CHECK(estimate_rank(build_hankel(seq_of(cv)), tol) == 2);
  CHECK(oracle_rank(cv, tol) == 2);
  const auto quad = poly(15, {0, 0}, {-8, 6}, {1, -0.5});
  CHECK(estimate_rank(build_hankel(seq_of(quad)), tol) == 3);
  CHECK(oracle_rank(quad, tol) == 3);
  CHECK(estimate_rank(HankelMatrix{Eigen::MatrixXd::Zero(4, 3), 3, 2}, tol) == 0);
}

TEST_CASE("sequence rank is centred and translation invariant") {
  const RankOptions opts;
  CHECK(sequence_rank(seq_of(std::vector<Eigen::Vector2d>(12, Eigen::Vector2d(5, 5))), opts) == 1);
  CHECK(sequence_rank(seq_of(poly(12, {0, 0}, {1, 2})), opts) == 2);
  CHECK(sequence_rank(seq_of(poly(12, {300, 200}, {1, 2})), opts) == 2);
  CHECK(sequence_rank(seq_of(poly(15, {3, 1}, {1, -2}, {0.5, 0.25})), opts) == 3);
  CHECK(sequence_rank(seq_of(poly(15, {300, 100}, {1, -2}, {0.5, 0.25})), opts) == 3);
}

TEST_CASE("constant-velocity rank under pixel noise") {
  const RankOptions opts;
  int correct = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> noise(0.0, 0.5);
    auto p = poly(30, {100, 100}, {3, 2});
    for (auto& q : p) q += Eigen::Vector2d(noise(rng), noise(rng));
    correct += sequence_rank(seq_of(p), opts) == 2 ? 1 : 0;
  }
  CHECK(correct >= 90);
}

TEST_CASE("gap interpolation") {
  const Tracklet a = test::from_centers(1, 9, {{-2, -2}, {0, 0}});
  const Tracklet b = test::from_centers(2, 12, {{4, 4}, {6, 6}});
  const auto s = interpolate_gap(a, b);
  CHECK(s.start_frame == 9);
  REQUIRE(s.length() == 5);
  CHECK(s.positions[2].isApprox(Eigen::Vector2d(2, 2)));

  const Tracklet c = test::from_centers(3, 11, {{1, 1}});
  const auto adj = interpolate_gap(a, c);
  CHECK(adj.length() == 3);
  CHECK(adj.positions[2] == Eigen::Vector2d(1, 1));

  const Tracklet d = test::from_centers(4, 14, {{8, 0}});
  const auto g3 = interpolate_gap(a, d);
  REQUIRE(g3.length() == 6);
  CHECK(g3.positions[2].isApprox(Eigen::Vector2d(2, 0)));
  CHECK(g3.positions[3].isApprox(Eigen::Vector2d(4, 0)));
  CHECK(g3.positions[4].isApprox(Eigen::Vector2d(6, 0)));

  CHECK_THROWS_AS(interpolate_gap(b, a), Error);
}

TEST_CASE("motion similarity") {
  const RankOptions opts;
  // One line split in two, with a gap between the halves.
  const Tracklet first = test::line_tracklet(1, 1, 15, {100, 100}, {3, 1});
  const Tracklet second = test::line_tracklet(2, 20, 15, Eigen::Vector2d(100, 100) + 19 * Eigen::Vector2d(3, 1), {3, 1});
  CHECK(motion_similarity(first, second, opts) == doctest::Approx(1.0).epsilon(0.02));

  // Two lines with different headings.
  const Tracklet other = test::line_tracklet(3, 20, 15, {400, 50}, {-2, 4});
  CHECK(motion_similarity(first, other, opts) <= 0.1);

  CHECK(motion_similarity(first, test::line_tracklet(4, 10, 10, {0, 0}, {1, 1}), opts) == kTemporalConflict);
  CHECK(motion_similarity(second, first, opts) == kTemporalConflict);
  CHECK(motion_similarity(first, test::line_tracklet(5, 20, 2, {0, 0}, {1, 1}), opts) == kShortTrackletSimilarity);

  // Translation and scale invariance.
  const auto shift = [](Tracklet t, double s, Eigen::Vector2d d) {
    for (auto& det : t.detections) {
      const Eigen::Vector2d c = det.box.center() * s + d;
      det.box = Box{c.x() - 5, c.y() - 5, 10, 10};
    }
    return t;
  };
  const double base = motion_similarity(first, other, opts);
  CHECK(motion_similarity(shift(first, 1, {50, -20}), shift(other, 1, {50, -20}), opts) == doctest::Approx(base));
  CHECK(motion_similarity(shift(first, 2, {0, 0}), shift(other, 2, {0, 0}), opts) == doctest::Approx(base));
}

TEST_CASE("split polynomial trajectories have similarity 1") {
  const RankOptions opts;
  const auto check_cuts = [&](const std::vector<Eigen::Vector2d>& p, int first_cut, int last_cut) {
    for (int cut = first_cut; cut <= last_cut; ++cut) {
      const Tracklet a = test::from_centers(1, 1, {p.begin(), p.begin() + cut});
      const Tracklet b = test::from_centers(2, cut + 1, {p.begin() + cut, p.end()});
      CHECK(motion_similarity(a, b, opts) == doctest::Approx(1.0));
    }
  };
  check_cuts(poly(24, {200, 150}, {0, 0}), 6, 18);
  check_cuts(poly(24, {200, 150}, {2, 1}), 6, 18);
  check_cuts(poly(24, {200, 150}, {-3, 0.5}), 6, 18);
  // A quadratic piece reads as rank 3 only while its curvature clears the
  // relative threshold; late pieces of this path move too fast for that.
  check_cuts(poly(24, {200, 150}, {1, -1}, {0.2, 0.1}), 6, 10);
}
