#include "tracklink/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace tracklink;

TEST_CASE("detections are grouped by frame and sorted by position") {
  const auto dets = io::parse_detections("2,-1,5,5,10,10,0.8\n1,-1,50,0,10,10,0.9\n1,-1,20,0,10,10,0.7\n", std::nullopt);
  REQUIRE(dets.size() == 2);
  REQUIRE(dets.at(1).size() == 2);
  CHECK(dets.at(1)[0].box.x == 20.0);
  CHECK(dets.at(1)[1].box.x == 50.0);
  CHECK(dets.at(2).size() == 1);
  CHECK_FALSE(dets.at(1)[0].id_hint);
}

TEST_CASE("empty detection file is an empty map") {
  CHECK(io::parse_detections("", std::nullopt).empty());
}

TEST_CASE("malformed detection rows name the line") {
  try {
    io::parse_detections("1,-1,0,0,10,10,0.9\n1,-1,0,0,-5,10,0.9\n", std::nullopt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10\n", std::nullopt), Error);
  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10,10,1.5\n", std::nullopt), Error);
  CHECK_THROWS_AS(io::parse_detections("0,-1,0,0,10,10,0.5\n", std::nullopt), Error);
}

TEST_CASE("sidecar rows attach by position in the detection file") {
  // File order in frame 1 is x=50 then x=20; index 0 refers to x=50.
  const auto dets = io::parse_detections("1,3,50,0,10,10,0.9\n1,4,20,0,10,10,0.7\n",
                                         std::string("1,0,1.0,2.0\n1,1,3.0,4.0\n"));
  const auto& f = dets.at(1);
  CHECK(f[0].box.x == 20.0);
  CHECK((*f[0].feature)(0) == 3.0);
  CHECK((*f[1].feature)(1) == 2.0);
  CHECK(*f[0].id_hint == 4);

  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10,10,0.9\n", std::string("1,0,1,2\n"), 3), Error);
  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10,10,0.9\n", std::string("1,0,1,2\n1,0,1,2\n")), Error);
  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10,10,0.9\n1,-1,30,0,10,10,0.9\n", std::string("1,0,1,2\n")),
                  Error);
  CHECK_THROWS_AS(io::parse_detections("1,-1,0,0,10,10,0.9\n", std::string("1,0,1\n1,5,1\n")), Error);
}

TEST_CASE("ground truth parsing") {
  std::string text;
  for (int f = 1; f <= 10; ++f) {
    text += std::to_string(f) + ",1,0,0,10,10\n" + std::to_string(f) + ",2,50,0,10,10\n";
  }
  const auto gt = io::parse_ground_truth(text);
  REQUIRE(gt.size() == 2);
  CHECK(gt.at(1).size() == 10);
  CHECK(gt.at(2).size() == 10);

  const auto gapped = io::parse_ground_truth("9,1,0,0,1,1\n1,1,0,0,1,1\n2,1,0,0,1,1\n");
  REQUIRE(gapped.at(1).size() == 3);
  CHECK(gapped.at(1)[0].frame == 1);
  CHECK(gapped.at(1)[2].frame == 9);

  CHECK_THROWS_AS(io::parse_ground_truth("1,-1,0,0,1,1\n"), Error);
  CHECK_THROWS_AS(io::parse_ground_truth("1,1,0,0,1,1\n1,1,5,0,1,1\n"), Error);
}

TEST_CASE("track output format") {
  TrackSet tracks;
  tracks[2] = {{1, {1, 2, 3, 4}}};
  tracks[1] = {{1, {0, 0, 1, 1}}, {2, {0.5, 0, 1, 1}}, {3, {1, 0, 1, 1}}};
  const std::string text = io::format_tracks(tracks);
  CHECK(text ==
        "1,1,0,0,1,1,1,-1,-1,-1\n"
        "1,2,1,2,3,4,1,-1,-1,-1\n"
        "2,1,0.5,0,1,1,1,-1,-1,-1\n"
        "3,1,1,0,1,1,1,-1,-1,-1\n");
  CHECK(io::format_tracks({}).empty());
  CHECK(io::format_real(1.0 / 3.0) == "0.333333");
  CHECK(io::parse_ground_truth(text) == tracks);
}

TEST_CASE("detection round trip") {
  const std::string det = "1,-1,10,20,30,40,0.9\n1,-1,0,0,5,5,0.8\n2,-1,1.5,2.5,3,4,0.7\n";
  const std::string feat = "1,0,0.25,-1\n1,1,2,3\n2,0,4,5\n";
  const auto a = io::parse_detections(det, feat);
  const auto text = io::format_detections(a);
  const auto b = io::parse_detections(text.detections, text.features);
  REQUIRE(a.size() == b.size());
  for (const auto& [frame, list] : a) {
    REQUIRE(b.at(frame).size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(b.at(frame)[i].box == list[i].box);
      CHECK(b.at(frame)[i].score == list[i].score);
      CHECK(*b.at(frame)[i].feature == *list[i].feature);
    }
  }
}

TEST_CASE("file helpers") {
  const auto path = (std::filesystem::temp_directory_path() / "tracklink_io_test.txt").string();
  io::write_text(path, "abc\n");
  CHECK(io::read_text(path) == "abc\n");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(io::read_text(path), Error);
  CHECK_THROWS_AS(io::write_text("/nonexistent-dir/x.csv", "x"), Error);
}
