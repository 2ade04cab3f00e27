#include "tracklink/io.hpp"
#include "tracklink/synth.hpp"

#include <doctest.h>

#include <filesystem>

using namespace tracklink;
using namespace tracklink::synth;

TEST_CASE("crossing scenario construction") {
  const auto s = synth_scenario(crossing_preset(), 1);
  REQUIRE(s.ground_truth.size() == 2);
  CHECK(s.ground_truth.at(1).size() == 100);
  CHECK(s.ground_truth.at(2).size() == 100);
  int hidden = 0;
  for (int f = 1; f <= 100; ++f) {
    int seen = 0;
    for (const auto& d : s.detections.count(f) ? s.detections.at(f) : std::vector<Detection>{}) {
      seen += *d.id_hint == 2 ? 1 : 0;
      CHECK(d.feature->size() == 32);
      CHECK(d.score >= 0.75);
      CHECK(d.score <= 0.95);
    }
    if (seen == 0) {
      ++hidden;
      CHECK(f >= 45);
      CHECK(f <= 54);
    }
  }
  CHECK(hidden == 10);
}

TEST_CASE("noise-free detections equal ground truth") {
  auto spec = crossing_preset();
  spec.position_noise = 0.0;
  spec.occlusions.clear();
  const auto s = synth_scenario(spec, 4);
  for (const auto& [id, boxes] : s.ground_truth) {
    for (const auto& fb : boxes) {
      bool found = false;
      for (const auto& d : s.detections.at(fb.frame)) found = found || (*d.id_hint == id && d.box == fb.box);
      CHECK(found);
    }
  }
}

TEST_CASE("generation is deterministic per seed") {
  const auto spec = standard_suite()[2];
  const auto a = io::format_detections(synth_scenario(spec, 8).detections);
  const auto b = io::format_detections(synth_scenario(spec, 8).detections);
  const auto c = io::format_detections(synth_scenario(spec, 9).detections);
  CHECK(a.detections == b.detections);
  CHECK(a.features == b.features);
  CHECK(a.features != c.features);
}

TEST_CASE("cluster centers") {
  std::mt19937_64 rng(2);
  const auto two = cluster_centers(2, 32, 4.0, rng);
  REQUIRE(two.size() == 2);
  CHECK(two[0].norm() == doctest::Approx(4.0));
  CHECK((two[0] - two[1]).norm() == doctest::Approx(8.0));
  const auto four = cluster_centers(4, 8, 3.0, rng);
  const double d01 = (four[0] - four[1]).norm();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(four[i].norm() == doctest::Approx(3.0));
    for (std::size_t j = i + 1; j < 4; ++j) CHECK((four[i] - four[j]).norm() == doctest::Approx(d01));
  }
  const auto many = cluster_centers(5, 3, 2.0, rng);
  REQUIRE(many.size() == 5);
  for (const auto& c : many) CHECK(c.norm() == doctest::Approx(2.0));
}

TEST_CASE("scenario validation") {
  auto spec = crossing_preset();
  spec.targets[1].id = 1;
  CHECK_THROWS_AS(validate(spec), Error);
  spec = crossing_preset();
  spec.occlusions[0].occluded = 9;
  CHECK_THROWS_AS(validate(spec), Error);
  spec = crossing_preset();
  spec.miss_prob = 1.0;
  CHECK_THROWS_AS(synth_scenario(spec, 1), Error);
}

TEST_CASE("scenario json round trip and presets") {
  const auto spec = motion_unreliable_preset();
  const auto text = format_scenario(spec);
  CHECK(format_scenario(parse_scenario(text)) == text);
  CHECK(io::format_detections(synth_scenario(parse_scenario(text), 3).detections).features ==
        io::format_detections(synth_scenario(spec, 3).detections).features);
  CHECK_THROWS_AS(parse_scenario("{"), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"targets": [{"id": 1, "center": [1]}]})"), Error);

  CHECK(preset("crossing"));
  CHECK(preset("motion-unreliable"));
  CHECK(preset("suite-0"));
  CHECK(preset("suite-2"));
  CHECK_FALSE(preset("suite-9"));
  CHECK_FALSE(preset("nope"));
  CHECK(standard_suite().size() == 3);
}

TEST_CASE("scenario files load back") {
  const auto s = synth_scenario(crossing_preset(), 5);
  const auto prefix = (std::filesystem::temp_directory_path() / "tracklink_synth_").string();
  write_scenario(s, prefix);
  const auto dets = io::load_detections(prefix + "det.csv", prefix + "features.csv");
  const auto gt = io::load_ground_truth(prefix + "gt.csv");
  CHECK(gt.size() == 2);
  CHECK(dets.size() == s.detections.size());
  CHECK(dets.at(1)[0].feature->isApprox(*s.detections.at(1)[0].feature, 1e-5));
  for (const char* f : {"det.csv", "features.csv", "gt.csv"}) std::filesystem::remove(prefix + f);
}
