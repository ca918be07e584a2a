// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "fishtrack/metrics.hpp"
#include "fishtrack/simulator.hpp"
#include "fishtrack/tracker.hpp"

using namespace fishtrack;

TEST_CASE("empty input stays empty") {
  Tracker tracker;
  CHECK(tracker.step({}, 1).empty());
  CHECK(tracker.tracks().empty());
}

TEST_CASE("an overlapping detection keeps its identity") {
  Tracker tracker;
  const auto first = tracker.step({{{0, 0, 10, 10}, 1.0}}, 1);
  REQUIRE(first.size() == 1);
  CHECK(first[0].identity == 1);
  CHECK_FALSE(first[0].coasting);

  // intersection 90, union 110: IOU 9/11 clears the 0.5 threshold
  const auto second = tracker.step({{{1, 0, 10, 10}, 1.0}}, 2);
  REQUIRE(second.size() == 1);
  CHECK(second[0].identity == 1);
  CHECK(second[0].box == BoundingBox{1, 0, 10, 10});
}

TEST_CASE("a retired identity is never reused") {
  TrackerConfig config;
  config.miss_tolerance = 2;
  Tracker tracker(config);
  const Detection det{{0, 0, 10, 10}, 1.0};

  REQUIRE(tracker.step({det}, 1).size() == 1);
  CHECK(tracker.step({}, 2).size() == 1);  // coasting, miss 1
  CHECK(tracker.step({}, 3).size() == 1);  // coasting, miss 2
  CHECK(tracker.step({}, 4).empty());      // miss 3 > 2: retired

  const auto revived = tracker.step({det}, 5);
  REQUIRE(revived.size() == 1);
  CHECK(revived[0].identity == 2);
}

TEST_CASE("coasting tracks are flagged and keep moving") {
  Tracker tracker;
  tracker.step({{{0, 0, 20, 10}, 1.0}}, 1);
  tracker.step({{{4, 0, 20, 10}, 1.0}}, 2);  // velocity smooths to (2, 0)
  const auto coasted = tracker.step({}, 3);
  REQUIRE(coasted.size() == 1);
  CHECK(coasted[0].coasting);
  CHECK(coasted[0].box.x == Catch::Approx(6.0));  // advanced by vx = 2

  // Re-match after the gap: same identity, velocity carried the box along.
  const auto rematched = tracker.step({{{8, 0, 20, 10}, 1.0}}, 4);
  REQUIRE(rematched.size() == 1);
  CHECK(rematched[0].identity == 1);
  CHECK_FALSE(rematched[0].coasting);
}

TEST_CASE("low-confidence detections are discarded") {
  TrackerConfig config;
  config.min_confidence = 0.3;
  Tracker tracker(config);
  CHECK(tracker.step({{{0, 0, 10, 10}, 0.2}}, 1).empty());
  CHECK(tracker.step({{{0, 0, 10, 10}, 0.3}}, 2).size() == 1);
}

TEST_CASE("non-overlapping detections mint separate identities") {
  Tracker tracker;
  const auto out =
      tracker.step({{{0, 0, 10, 10}, 1.0}, {{100, 100, 10, 10}, 1.0}}, 1);
  REQUIRE(out.size() == 2);
  CHECK(out[0].identity == 1);
  CHECK(out[1].identity == 2);

  // Swapped input order matches by overlap, not by position in the list.
  const auto next =
      tracker.step({{{100, 100, 10, 10}, 1.0}, {{0, 0, 10, 10}, 1.0}}, 2);
  REQUIRE(next.size() == 2);
  CHECK(next[0].identity == 1);
  CHECK(next[0].box.x == 0.0);
  CHECK(next[1].identity == 2);
  CHECK(next[1].box.x == 100.0);
}

TEST_CASE("frame indices must strictly increase") {
  Tracker tracker;
  tracker.step({}, 5);
  CHECK_THROWS_AS(tracker.step({}, 5), std::logic_error);
  CHECK_THROWS_AS(tracker.step({}, 4), std::logic_error);
  CHECK_NOTHROW(tracker.step({}, 6));
}

TEST_CASE("invalid configuration is rejected") {
  TrackerConfig config;
  config.miss_tolerance = -1;
  CHECK_THROWS_AS(Tracker(config), std::invalid_argument);
  config.miss_tolerance = 0;
  config.iou_match_threshold = 2.0;
  CHECK_THROWS_AS(Tracker(config), std::invalid_argument);
}

TEST_CASE("noiseless simulated scenes map each fish to exactly one identity") {
  SceneConfig config;
  config.fish_count = 6;
  config.duration_frames = 200;
  config.occlusion_iou = 1.0;
  config.seed = 5;
  const SceneOutput scene = simulate(config);

  Tracker tracker;
  std::map<TrackId, Trajectory> by_id;
  for (int f = 0; f < config.duration_frames; ++f) {
    for (const TrackOutput& t : tracker.step(scene.detections[f], f + 1)) {
      if (t.coasting) continue;
      by_id[t.identity].identity = t.identity;
      by_id[t.identity].boxes[f + 1] = t.box;
    }
  }
  REQUIRE(by_id.size() == 6);

  // Each ground-truth trajectory is reproduced box for box by one identity.
  for (const Trajectory& g : scene.gt) {
    int exact_matches = 0;
    for (const auto& [id, p] : by_id) {
      if (p.boxes == g.boxes) ++exact_matches;
    }
    REQUIRE(exact_matches == 1);
  }
}

TEST_CASE("identical runs produce identical outputs") {
  const std::vector<std::vector<Detection>> frames = {
      {{{0, 0, 10, 10}, 1.0}, {{30, 30, 12, 12}, 0.8}},
      {{{2, 0, 10, 10}, 1.0}},
      {{{4, 0, 10, 10}, 1.0}, {{31, 31, 12, 12}, 0.9}},
  };
  auto run = [&frames]() {
    Tracker tracker;
    std::vector<std::vector<TrackOutput>> all;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      all.push_back(tracker.step(frames[f], static_cast<int>(f + 1)));
    }
    return all;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t f = 0; f < a.size(); ++f) {
    REQUIRE(a[f].size() == b[f].size());
    for (std::size_t i = 0; i < a[f].size(); ++i) {
      CHECK(a[f][i].identity == b[f][i].identity);
      CHECK(a[f][i].box == b[f][i].box);
      CHECK(a[f][i].coasting == b[f][i].coasting);
    }
  }
}
