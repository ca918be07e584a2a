// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <clocale>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "fishtrack/io.hpp"

using namespace fishtrack;

TEST_CASE("read_mot parses the canonical line") {
  std::istringstream in("1,1,10,20,30,40,1,-1,-1,-1\n");
  const std::vector<MotRecord> records = read_mot(in);
  REQUIRE(records.size() == 1);
  CHECK(records[0].frame == 1);
  CHECK(records[0].id == 1);
  CHECK(records[0].box() == BoundingBox{10, 20, 30, 40});
  CHECK(records[0].conf == 1.0);
}

TEST_CASE("read_mot tolerates blank lines and empty input") {
  std::istringstream empty("");
  CHECK(read_mot(empty).empty());
  std::istringstream padded("1,1,0,0,5,5,1,-1,-1,-1\n\n\n");
  CHECK(read_mot(padded).size() == 1);
}

TEST_CASE("read_mot reports the offending line") {
  std::istringstream in("1,1,0,0,5,5,1,-1,-1,-1\n1,1,10\n");
  try {
    read_mot(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.text() == "1,1,10");
  }

  std::istringstream bad_frame("0,1,0,0,5,5,1,-1,-1,-1\n");
  CHECK_THROWS_AS(read_mot(bad_frame), ParseError);
  std::istringstream bad_number("1,1,zero,0,5,5,1,-1,-1,-1\n");
  CHECK_THROWS_AS(read_mot(bad_number), ParseError);
  std::istringstream negative_width("1,1,0,0,-5,5,1,-1,-1,-1\n");
  CHECK_THROWS_AS(read_mot(negative_width), ParseError);
}

TEST_CASE("write_mot emits sorted records and round-trips") {
  std::vector<MotRecord> records;
  MotRecord r;
  r.frame = 2;
  r.id = 1;
  r.bb_left = 1.5;
  r.bb_top = 2.25;
  r.bb_width = 3.125;
  r.bb_height = 4;
  r.conf = 0.875;
  records.push_back(r);
  r.frame = 1;
  r.id = 7;
  records.push_back(r);
  r.frame = 1;
  r.id = 3;
  records.push_back(r);

  std::ostringstream out;
  write_mot(records, out);
  std::istringstream in(out.str());
  const std::vector<MotRecord> reread = read_mot(in);
  REQUIRE(reread.size() == 3);
  CHECK(reread[0].frame == 1);
  CHECK(reread[0].id == 3);
  CHECK(reread[1].id == 7);
  CHECK(reread[2].frame == 2);
  CHECK(reread[0].bb_left == 1.5);  // fractional values survive exactly
}

TEST_CASE("mot round-trip identity on random records") {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<int> frame(1, 500);
  std::uniform_int_distribution<long long> id(-1, 40);
  std::uniform_real_distribution<double> coord(-100.0, 2000.0);
  std::uniform_real_distribution<double> size(0.0, 300.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);

  std::vector<MotRecord> records;
  for (int i = 0; i < 500; ++i) {
    MotRecord r;
    r.frame = frame(rng);
    r.id = id(rng);
    r.bb_left = coord(rng);
    r.bb_top = coord(rng);
    r.bb_width = size(rng);
    r.bb_height = size(rng);
    r.conf = conf(rng);
    records.push_back(r);
  }

  std::ostringstream out;
  write_mot(records, out);
  std::istringstream in(out.str());
  const std::vector<MotRecord> reread = read_mot(in);
  REQUIRE(reread.size() == records.size());

  std::vector<MotRecord> expected = records;
  std::stable_sort(expected.begin(), expected.end(),
                   [](const MotRecord& a, const MotRecord& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return a.id < b.id;
                   });
  REQUIRE(reread == expected);

  // A second pass is byte-identical: formatting is canonical.
  std::ostringstream again;
  write_mot(reread, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("trajectory conversion groups by identity") {
  std::istringstream in(
      "1,2,0,0,10,10,1,-1,-1,-1\n"
      "2,2,1,0,10,10,1,-1,-1,-1\n"
      "1,1,50,50,10,10,1,-1,-1,-1\n");
  const std::vector<Trajectory> trajectories = records_to_trajectories(read_mot(in));
  REQUIRE(trajectories.size() == 2);
  CHECK(trajectories[0].identity == 1);
  CHECK(trajectories[1].identity == 2);
  CHECK(trajectories[1].boxes.size() == 2);

  const std::vector<MotRecord> back = trajectories_to_records(trajectories);
  CHECK(back.size() == 3);
}

TEST_CASE("trajectory conversion rejects bad input") {
  std::istringstream raw("1,-1,0,0,10,10,1,-1,-1,-1\n");
  CHECK_THROWS_AS(records_to_trajectories(read_mot(raw)), std::runtime_error);
  std::istringstream dup(
      "1,2,0,0,10,10,1,-1,-1,-1\n"
      "1,2,5,5,10,10,1,-1,-1,-1\n");
  CHECK_THROWS_AS(records_to_trajectories(read_mot(dup)), std::runtime_error);
}

TEST_CASE("detection conversion keeps frame order") {
  std::istringstream in(
      "3,-1,0,0,10,10,0.5,-1,-1,-1\n"
      "1,-1,5,5,10,10,0.9,-1,-1,-1\n");
  const auto detections = records_to_detections(read_mot(in));
  REQUIRE(detections.size() == 3);
  CHECK(detections[0].size() == 1);
  CHECK(detections[1].empty());
  CHECK(detections[2].size() == 1);
  CHECK(detections[0][0].confidence == 0.9);

  const std::vector<MotRecord> back = detections_to_records(detections);
  REQUIRE(back.size() == 2);
  CHECK(back[0].frame == 1);
  CHECK(back[0].id == -1);
}

TEST_CASE("report round-trip and aggregation") {
  ReportData a;
  a.mota = 0.9;
  a.motp = 0.125;
  a.idf1 = 0.8;
  a.idp = 0.75;
  a.idr = 0.85;
  a.false_negatives = 5;
  a.false_positives = 3;
  a.id_switches = 2;
  a.total_gt = 100;
  a.match_count = 95;
  a.distance_sum = 11.875;
  a.idtp = 90;
  a.idfp = 8;
  a.idfn = 10;

  std::ostringstream out;
  write_report(a, out);
  std::istringstream in(out.str());
  const ReportData reread = read_report(in);
  CHECK(reread.mota == a.mota);
  CHECK(reread.motp == a.motp);
  CHECK(reread.distance_sum == a.distance_sum);
  CHECK(reread.idtp == a.idtp);
  CHECK(reread.motp_defined == a.motp_defined);

  // Aggregating a report with itself doubles the counts and keeps ratios.
  const ReportData twice = aggregate_reports({a, a});
  CHECK(twice.total_gt == 200);
  CHECK(twice.false_negatives == 10);
  CHECK(twice.mota == Catch::Approx(0.9).margin(1e-12));
  CHECK(twice.motp == Catch::Approx(0.125).margin(1e-12));
  CHECK(twice.idf1 == Catch::Approx(2.0 * 90 / (180.0 + 8 + 10)).margin(1e-12));

  CHECK_THROWS_AS(aggregate_reports({}), std::runtime_error);
}

TEST_CASE("report parsing failures") {
  std::istringstream garbage("not a report\n");
  CHECK_THROWS_AS(read_report(garbage), ParseError);
  std::istringstream missing("mota: 1\n");
  CHECK_THROWS_AS(read_report(missing), std::runtime_error);
}

TEST_CASE("scene config files") {
  std::istringstream in(
      "# a comment\n"
      "tank_width = 640\n"
      "tank_height = 480\n"
      "fish_count = 3\n"
      "duration_frames = 60   # trailing comment\n"
      "fn_rate = 0.25\n"
      "seed = 99\n");
  const SceneConfig config = read_scene_config(in);
  CHECK(config.tank_width == 640.0);
  CHECK(config.tank_height == 480.0);
  CHECK(config.fish_count == 3);
  CHECK(config.duration_frames == 60);
  CHECK(config.fn_rate == 0.25);
  CHECK(config.seed == 99);
  CHECK(config.fps == 30.0);  // untouched default

  std::istringstream unknown("swim_speed = 3\n");
  CHECK_THROWS_AS(read_scene_config(unknown), ParseError);
  std::istringstream malformed("fish_count 3\n");
  CHECK_THROWS_AS(read_scene_config(malformed), ParseError);
  std::istringstream out_of_range("fn_rate = 2.0\n");
  CHECK_THROWS_AS(read_scene_config(out_of_range), std::invalid_argument);
}

TEST_CASE("format_number is minimal and exact") {
  CHECK(format_number(10.0) == "10");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(-1.0) == "-1");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("parsing and formatting ignore the global locale") {
  // Only a decimal point is ever read or written, whatever the locale says.
  const char* previous = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  std::istringstream in("1,-1,0.5,0,5,5,0.25,-1,-1,-1\n");
  const std::vector<MotRecord> records = read_mot(in);
  REQUIRE(records.size() == 1);
  CHECK(records[0].bb_left == 0.5);
  CHECK(records[0].conf == 0.25);
  CHECK(format_number(0.5) == "0.5");
  std::setlocale(LC_NUMERIC, previous != nullptr ? "de_DE.UTF-8" : "C");
  std::setlocale(LC_NUMERIC, "C");
}

TEST_CASE("aggregation refuses mixed motp conventions") {
  ReportData a, b;
  a.total_gt = 1;
  b.total_gt = 1;
  b.motp_as_overlap = true;
  CHECK_THROWS_AS(aggregate_reports({a, b}), std::runtime_error);
}
