// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fishtrack/geometry.hpp"
#include "fishtrack/metrics.hpp"
#include "fishtrack/simulator.hpp"

namespace fishtrack {

/// Parse failure carrying the 1-based line number and the offending text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string text, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what +
                           " (got \"" + text + "\")"),
        line_(line),
        text_(std::move(text)) {}

  std::size_t line() const { return line_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t line_;
  std::string text_;
};

/// One line of the comma-separated MOT exchange format:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z.
/// Raw detections use id -1; trajectories use positive ids. x, y, z are
/// placeholders kept at -1.
struct MotRecord {
  int frame = 1;
  long long id = -1;
  double bb_left = 0.0;
  double bb_top = 0.0;
  double bb_width = 0.0;
  double bb_height = 0.0;
  double conf = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  BoundingBox box() const { return {bb_left, bb_top, bb_width, bb_height}; }

  friend bool operator==(const MotRecord&, const MotRecord&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline bool parse_integer(std::string_view token, long long& out) {
  token = trim(token);
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

/// Shortest decimal form that parses back to the same value; integral
/// values print without a decimal point.
inline std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

/// Reads the whole stream; blank lines are tolerated. Any malformed line
/// raises ParseError with its line number.
inline std::vector<MotRecord> read_mot(std::istream& in) {
  std::vector<MotRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string_view> tokens = detail::split(line, ',');
    if (tokens.size() != 10) {
      throw ParseError(line_number, line, "expected 10 comma-separated fields");
    }
    MotRecord r;
    long long frame = 0;
    if (!detail::parse_integer(tokens[0], frame) || frame < 1) {
      throw ParseError(line_number, line, "frame must be an integer >= 1");
    }
    r.frame = static_cast<int>(frame);
    if (!detail::parse_integer(tokens[1], r.id)) {
      throw ParseError(line_number, line, "id must be an integer");
    }
    double* fields[8] = {&r.bb_left, &r.bb_top, &r.bb_width, &r.bb_height,
                         &r.conf,    &r.x,      &r.y,        &r.z};
    for (int i = 0; i < 8; ++i) {
      if (!detail::parse_double(tokens[i + 2], *fields[i])) {
        throw ParseError(line_number, line, "field " + std::to_string(i + 3) +
                                                " is not a finite number");
      }
    }
    if (r.bb_width < 0.0 || r.bb_height < 0.0) {
      throw ParseError(line_number, line, "box width and height must be >= 0");
    }
    records.push_back(r);
  }
  return records;
}

/// Writes records ordered by (frame, id); the ordering is stable so equal
/// keys keep their input order. read_mot(write_mot(r)) == sorted r.
inline void write_mot(std::vector<MotRecord> records, std::ostream& out) {
  std::stable_sort(records.begin(), records.end(),
                   [](const MotRecord& a, const MotRecord& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return a.id < b.id;
                   });
  for (const MotRecord& r : records) {
    out << r.frame << ',' << r.id << ',' << format_number(r.bb_left) << ','
        << format_number(r.bb_top) << ',' << format_number(r.bb_width) << ','
        << format_number(r.bb_height) << ',' << format_number(r.conf) << ','
        << format_number(r.x) << ',' << format_number(r.y) << ','
        << format_number(r.z) << '\n';
  }
}

/// Groups records with positive ids into trajectories, sorted by identity.
/// Raw-detection ids (-1) and duplicate (frame, id) pairs are rejected.
inline std::vector<Trajectory> records_to_trajectories(
    const std::vector<MotRecord>& records) {
  std::map<TrackId, Trajectory> by_id;
  for (const MotRecord& r : records) {
    if (r.id < 1) {
      throw std::runtime_error(
          "trajectory records need positive ids; found id " + std::to_string(r.id) +
          " at frame " + std::to_string(r.frame));
    }
    Trajectory& t = by_id[r.id];
    t.identity = r.id;
    if (!t.boxes.emplace(r.frame, r.box()).second) {
      throw std::runtime_error("duplicate box for id " + std::to_string(r.id) +
                               " at frame " + std::to_string(r.frame));
    }
  }
  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  return out;
}

inline std::vector<MotRecord> trajectories_to_records(
    const std::vector<Trajectory>& trajectories, double conf = 1.0) {
  std::vector<MotRecord> records;
  for (const Trajectory& t : trajectories) {
    for (const auto& [frame, box] : t.boxes) {
      MotRecord r;
      r.frame = frame;
      r.id = t.identity;
      r.bb_left = box.x;
      r.bb_top = box.y;
      r.bb_width = box.w;
      r.bb_height = box.h;
      r.conf = conf;
      records.push_back(r);
    }
  }
  return records;
}

/// Per-frame detection lists from raw records (any id accepted, id ignored).
/// Index f holds frame f+1; the vector spans up to the last populated frame.
inline std::vector<std::vector<Detection>> records_to_detections(
    const std::vector<MotRecord>& records) {
  int max_frame = 0;
  for (const MotRecord& r : records) max_frame = std::max(max_frame, r.frame);
  std::vector<std::vector<Detection>> out(max_frame);
  std::vector<MotRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MotRecord& a, const MotRecord& b) {
                     return a.frame < b.frame;
                   });
  for (const MotRecord& r : sorted) {
    out[r.frame - 1].push_back({r.box(), r.conf});
  }
  return out;
}

inline std::vector<MotRecord> detections_to_records(
    const std::vector<std::vector<Detection>>& detections) {
  std::vector<MotRecord> records;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    for (const Detection& d : detections[f]) {
      MotRecord r;
      r.frame = static_cast<int>(f + 1);
      r.id = -1;
      r.bb_left = d.box.x;
      r.bb_top = d.box.y;
      r.bb_width = d.box.w;
      r.bb_height = d.box.h;
      r.conf = d.confidence;
      records.push_back(r);
    }
  }
  return records;
}

/// Flat, aggregatable form of an evaluation report. The serialized report
/// stores the match distances as (count, sum), which is sufficient for
/// every derived metric.
struct ReportData {
  double mota = 0.0;
  double motp = 0.0;
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  bool motp_defined = true;
  bool idp_defined = true;
  bool idr_defined = true;
  bool motp_as_overlap = false;
  long long false_negatives = 0;
  long long false_positives = 0;
  long long id_switches = 0;
  long long total_gt = 0;
  long long match_count = 0;
  double distance_sum = 0.0;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
};

inline ReportData to_report_data(const EvalReport& report) {
  ReportData d;
  d.mota = report.mota;
  d.motp = report.motp;
  d.idf1 = report.idf1;
  d.idp = report.idp;
  d.idr = report.idr;
  d.motp_defined = report.motp_defined;
  d.idp_defined = report.idp_defined;
  d.idr_defined = report.idr_defined;
  d.motp_as_overlap = report.motp_as_overlap;
  d.false_negatives = report.counts.false_negatives;
  d.false_positives = report.counts.false_positives;
  d.id_switches = report.counts.id_switches;
  d.total_gt = report.counts.total_gt;
  d.match_count = report.counts.match_count();
  d.distance_sum = report.counts.distance_sum();
  d.idtp = report.counts.idtp;
  d.idfp = report.counts.idfp;
  d.idfn = report.counts.idfn;
  return d;
}

/// `key: value` lines in a fixed order, so reports diff cleanly.
inline void write_report(const ReportData& d, std::ostream& out) {
  out << "mota: " << format_number(d.mota) << '\n';
  out << "motp: " << format_number(d.motp) << '\n';
  out << "motp_defined: " << (d.motp_defined ? 1 : 0) << '\n';
  out << "motp_mode: " << (d.motp_as_overlap ? "overlap" : "distance") << '\n';
  out << "idf1: " << format_number(d.idf1) << '\n';
  out << "idp: " << format_number(d.idp) << '\n';
  out << "idp_defined: " << (d.idp_defined ? 1 : 0) << '\n';
  out << "idr: " << format_number(d.idr) << '\n';
  out << "idr_defined: " << (d.idr_defined ? 1 : 0) << '\n';
  out << "false_negatives: " << d.false_negatives << '\n';
  out << "false_positives: " << d.false_positives << '\n';
  out << "id_switches: " << d.id_switches << '\n';
  out << "total_gt: " << d.total_gt << '\n';
  out << "match_count: " << d.match_count << '\n';
  out << "distance_sum: " << format_number(d.distance_sum) << '\n';
  out << "idtp: " << d.idtp << '\n';
  out << "idfp: " << d.idfp << '\n';
  out << "idfn: " << d.idfn << '\n';
}

inline void write_report(const EvalReport& report, std::ostream& out) {
  write_report(to_report_data(report), out);
}

inline ReportData read_report(std::istream& in) {
  std::map<std::string, std::string> fields;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const std::size_t colon = trimmed.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_number, line, "expected `key: value`");
    }
    fields[std::string(detail::trim(trimmed.substr(0, colon)))] =
        std::string(detail::trim(trimmed.substr(colon + 1)));
  }

  ReportData d;
  auto take = [&fields](const char* key) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw std::runtime_error(std::string("report missing key: ") + key);
    }
    return it->second;
  };
  auto take_double = [&take](const char* key) {
    double v = 0.0;
    if (!detail::parse_double(take(key), v)) {
      throw std::runtime_error(std::string("report key is not a number: ") + key);
    }
    return v;
  };
  auto take_integer = [&take](const char* key) {
    long long v = 0;
    if (!detail::parse_integer(take(key), v)) {
      throw std::runtime_error(std::string("report key is not an integer: ") + key);
    }
    return v;
  };
  d.mota = take_double("mota");
  d.motp = take_double("motp");
  d.motp_defined = take_integer("motp_defined") != 0;
  d.motp_as_overlap = take("motp_mode") == "overlap";
  d.idf1 = take_double("idf1");
  d.idp = take_double("idp");
  d.idp_defined = take_integer("idp_defined") != 0;
  d.idr = take_double("idr");
  d.idr_defined = take_integer("idr_defined") != 0;
  d.false_negatives = take_integer("false_negatives");
  d.false_positives = take_integer("false_positives");
  d.id_switches = take_integer("id_switches");
  d.total_gt = take_integer("total_gt");
  d.match_count = take_integer("match_count");
  d.distance_sum = take_double("distance_sum");
  d.idtp = take_integer("idtp");
  d.idfp = take_integer("idfp");
  d.idfn = take_integer("idfn");
  return d;
}

/// Commutative fold over per-sequence reports: counts add, metrics are
/// recomputed from the summed counts. All inputs must share the MOTP
/// convention.
inline ReportData aggregate_reports(const std::vector<ReportData>& reports) {
  if (reports.empty()) {
    throw std::runtime_error("aggregate_reports: no reports given");
  }
  ReportData total;
  total.motp_as_overlap = reports.front().motp_as_overlap;
  for (const ReportData& r : reports) {
    if (r.motp_as_overlap != total.motp_as_overlap) {
      throw std::runtime_error("aggregate_reports: mixed motp conventions");
    }
    total.false_negatives += r.false_negatives;
    total.false_positives += r.false_positives;
    total.id_switches += r.id_switches;
    total.total_gt += r.total_gt;
    total.match_count += r.match_count;
    total.distance_sum += r.distance_sum;
    total.idtp += r.idtp;
    total.idfp += r.idfp;
    total.idfn += r.idfn;
  }
  if (total.total_gt <= 0) {
    throw std::runtime_error("aggregate_reports: no ground-truth boxes");
  }
  total.mota = 1.0 - static_cast<double>(total.false_negatives +
                                         total.false_positives + total.id_switches) /
                         static_cast<double>(total.total_gt);
  if (total.match_count > 0) {
    const double mean_distance =
        total.distance_sum / static_cast<double>(total.match_count);
    total.motp = total.motp_as_overlap ? 1.0 - mean_distance : mean_distance;
  } else {
    total.motp_defined = false;
  }
  total.idf1 = 2.0 * static_cast<double>(total.idtp) /
               static_cast<double>(2 * total.idtp + total.idfp + total.idfn);
  if (total.idtp + total.idfp > 0) {
    total.idp = static_cast<double>(total.idtp) /
                static_cast<double>(total.idtp + total.idfp);
  } else {
    total.idp_defined = false;
  }
  if (total.idtp + total.idfn > 0) {
    total.idr = static_cast<double>(total.idtp) /
                static_cast<double>(total.idtp + total.idfn);
  } else {
    total.idr_defined = false;
  }
  return total;
}

/// Scene configuration files: `key = value` lines, `#` starts a comment,
/// unknown keys are errors, omitted keys keep their defaults.
inline SceneConfig read_scene_config(std::istream& in) {
  SceneConfig config;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view body(line);
    const std::size_t hash = body.find('#');
    if (hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_number, line, "expected `key = value`");
    }
    const std::string key(detail::trim(body.substr(0, eq)));
    const std::string_view value = detail::trim(body.substr(eq + 1));

    double number = 0.0;
    if (!detail::parse_double(value, number)) {
      throw ParseError(line_number, line, "value is not a finite number");
    }
    auto as_int = [&](long long lo, long long hi) {
      long long v = 0;
      if (!detail::parse_integer(value, v) || v < lo || v > hi) {
        throw ParseError(line_number, line, "value for " + key +
                                                " must be an integer in range");
      }
      return v;
    };
    if (key == "tank_width") {
      config.tank_width = number;
    } else if (key == "tank_height") {
      config.tank_height = number;
    } else if (key == "fps") {
      config.fps = number;
    } else if (key == "duration_frames") {
      config.duration_frames = static_cast<int>(as_int(1, 1'000'000));
    } else if (key == "fish_count") {
      config.fish_count = static_cast<int>(as_int(0, 100'000));
    } else if (key == "fish_size_mean") {
      config.fish_size_mean = number;
    } else if (key == "fish_size_stddev") {
      config.fish_size_stddev = number;
    } else if (key == "speed_max") {
      config.speed_max = number;
    } else if (key == "turn_rate") {
      config.turn_rate = number;
    } else if (key == "occlusion_iou") {
      config.occlusion_iou = number;
    } else if (key == "fn_rate") {
      config.fn_rate = number;
    } else if (key == "fp_rate") {
      config.fp_rate = number;
    } else if (key == "jitter_std") {
      config.jitter_std = number;
    } else if (key == "clutter_count") {
      config.clutter_count = static_cast<int>(as_int(0, 100'000));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(as_int(0, 0x7fffffffffffffffll));
    } else {
      throw ParseError(line_number, line, "unknown configuration key: " + key);
    }
  }
  detail::validate_scene_config(config);
  return config;
}

}  // namespace fishtrack
