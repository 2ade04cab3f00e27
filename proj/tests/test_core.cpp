#include "tracklink/config.hpp"
#include "tracklink/types.hpp"

#include <doctest.h>

#include "test_util.hpp"

using namespace tracklink;

TEST_CASE("box geometry") {
  const Box a{0, 0, 10, 10};
  const Box b{5, 5, 10, 10};
  CHECK(a.area() == 100.0);
  CHECK(a.center() == Eigen::Vector2d(5, 5));
  CHECK(intersection_area(a, b) == 25.0);
  CHECK(iou(a, b) == doctest::Approx(25.0 / 175.0));
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, Box{10, 0, 5, 5}) == 0.0);  // touching edges share no area
}

TEST_CASE("temporal overlap and gaps") {
  const Tracklet a = test::line_tracklet(1, 1, 10, {0, 0}, {1, 0});
  const Tracklet b = test::line_tracklet(2, 12, 5, {0, 0}, {1, 0});
  const Tracklet c = test::line_tracklet(3, 10, 5, {0, 0}, {1, 0});
  CHECK_FALSE(temporal_overlap(a, b));
  CHECK(temporal_overlap(a, c));
  CHECK(temporal_overlap(c, a));
  CHECK(gap_frames(a, b) == 1);
  CHECK(gap_frames(a, test::line_tracklet(4, 11, 3, {0, 0}, {1, 0})) == 0);
  CHECK_THROWS_AS(gap_frames(a, c), Error);
}

TEST_CASE("tracklet validation") {
  Tracklet t = test::line_tracklet(1, 3, 4, {0, 0}, {1, 1});
  CHECK_NOTHROW(validate_tracklet(t));
  CHECK(t.start() == 3);
  CHECK(t.end() == 6);
  CHECK(t.length() == 4);
  CHECK(t.at_frame(5).frame == 5);
  t.detections[2].frame = 9;
  CHECK_THROWS_AS(validate_tracklet(t), Error);
  CHECK_THROWS_AS(validate_tracklet(Tracklet{7, {}}), Error);
  Tracklet bad = test::line_tracklet(1, 1, 2, {0, 0}, {1, 1});
  bad.detections[1].box.w = 0;
  CHECK_THROWS_AS(validate_tracklet(bad), Error);
}

TEST_CASE("config parse, format and validation") {
  const RunConfig defaults;
  CHECK(defaults.segment_len == 50);
  CHECK(defaults.probe_window == 8);
  CHECK(defaults.strongest_q == 4);
  CHECK(defaults.split_run == 5);
  CHECK(defaults.gap_bound == 20);
  CHECK(defaults.lambda1 == 0.5);
  CHECK(defaults.lambda2 == 0.2);

  const RunConfig cfg = parse_config("# comment\nsegment_len = 40\nlambda1=0.3\n\ndistance_threshold=2.5\nuse_appearance=false\n");
  CHECK(cfg.segment_len == 40);
  CHECK(cfg.lambda1 == 0.3);
  REQUIRE(cfg.distance_threshold);
  CHECK(*cfg.distance_threshold == 2.5);
  CHECK_FALSE(cfg.use_appearance);

  const RunConfig again = parse_config(format_config(cfg));
  CHECK(format_config(again) == format_config(cfg));

  CHECK_THROWS_AS(parse_config("segmnt_len=40\n"), Error);
  CHECK_THROWS_AS(parse_config("segment_len\n"), Error);
  CHECK_THROWS_AS(parse_config("segment_len=abc\n"), Error);
  CHECK_THROWS_AS(parse_config("lambda1=1.5\n"), Error);
  CHECK_THROWS_AS(parse_config("segment_len=1\n"), Error);
}
