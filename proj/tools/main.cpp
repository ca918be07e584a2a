// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single binary with the simulate / track / eval / qtsi-trace / report
// subcommands. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fishtrack/fishtrack.hpp"

namespace {

using namespace fishtrack;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

std::vector<MotRecord> read_mot_file(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return read_mot(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_events(const std::vector<SceneEvent>& events, std::ostream& out) {
  for (const SceneEvent& e : events) {
    switch (e.kind) {
      case SceneEventKind::Occlusion:
        out << "occlusion frame=" << e.frame << " fish=" << e.fish
            << " occluder=" << e.occluder << " iou=" << format_number(e.iou)
            << '\n';
        break;
      case SceneEventKind::FalseNegative:
        out << "fn frame=" << e.frame << " fish=" << e.fish << '\n';
        break;
      case SceneEventKind::FalsePositive:
        out << "fp frame=" << e.frame << " box=" << format_number(e.box.x) << ','
            << format_number(e.box.y) << ',' << format_number(e.box.w) << ','
            << format_number(e.box.h) << " conf=" << format_number(e.confidence)
            << '\n';
        break;
      case SceneEventKind::Jitter:
        out << "jitter frame=" << e.frame << " fish=" << e.fish
            << " box=" << format_number(e.box.x) << ',' << format_number(e.box.y)
            << ',' << format_number(e.box.w) << ',' << format_number(e.box.h)
            << '\n';
        break;
    }
  }
}

struct SimulateArgs {
  std::string config_path;
  std::string out_gt;
  std::string out_det;
  std::string out_events;
  std::int64_t seed = 1;
  bool seed_given = false;
};

int run_simulate(const SimulateArgs& args) {
  SceneConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in = open_input(args.config_path);
    try {
      config = read_scene_config(in);
    } catch (const ParseError& e) {
      throw std::runtime_error(args.config_path + ": " + e.what());
    }
  }
  if (args.seed_given) config.seed = static_cast<std::uint64_t>(args.seed);

  const SceneOutput scene = simulate(config);
  {
    std::ofstream out = open_output(args.out_gt);
    write_mot(trajectories_to_records(scene.gt), out);
  }
  {
    std::ofstream out = open_output(args.out_det);
    write_mot(detections_to_records(scene.detections), out);
  }
  if (!args.out_events.empty()) {
    std::ofstream out = open_output(args.out_events);
    write_events(scene.events, out);
  }
  return 0;
}

struct TrackArgs {
  std::string det_path;
  std::string out_path;
  double iou_thresh = 0.5;
  int miss_tolerance = 100;
  double min_conf = 0.1;
  bool include_coasting = false;
};

int run_track(const TrackArgs& args) {
  const std::vector<std::vector<Detection>> detections =
      records_to_detections(read_mot_file(args.det_path));

  TrackerConfig config;
  config.iou_match_threshold = args.iou_thresh;
  config.miss_tolerance = args.miss_tolerance;
  config.min_confidence = args.min_conf;
  Tracker tracker(config);

  std::vector<MotRecord> records;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    const int frame = static_cast<int>(f + 1);
    for (const TrackOutput& t : tracker.step(detections[f], frame)) {
      if (t.coasting && !args.include_coasting) continue;
      MotRecord r;
      r.frame = frame;
      r.id = t.identity;
      r.bb_left = t.box.x;
      r.bb_top = t.box.y;
      r.bb_width = t.box.w;
      r.bb_height = t.box.h;
      r.conf = t.confidence;
      records.push_back(r);
    }
  }
  std::ofstream out = open_output(args.out_path);
  write_mot(records, out);
  return 0;
}

struct EvalArgs {
  std::string gt_path;
  std::string pred_path;
  std::string report_path;
  double iou_thresh = 0.5;
  bool motp_overlap = false;
};

int run_eval(const EvalArgs& args) {
  const std::vector<Trajectory> gt =
      records_to_trajectories(read_mot_file(args.gt_path));
  const std::vector<Trajectory> pred =
      records_to_trajectories(read_mot_file(args.pred_path));

  EvalOptions options;
  options.iou_threshold = args.iou_thresh;
  options.motp_as_overlap = args.motp_overlap;
  const ReportData report = to_report_data(evaluate(gt, pred, options));

  write_report(report, std::cout);
  if (!args.report_path.empty()) {
    std::ofstream out = open_output(args.report_path);
    write_report(report, out);
  }
  return 0;
}

struct QtsiTraceArgs {
  std::string det_path;
  std::string track_path;
  std::string gt_path;
  std::string out_path;
  double phi = 0.5;
  double tie_margin = 0.0;
};

Query query_from_record(const MotRecord& r, QueryKind kind) {
  Query q;
  q.kind = kind;
  q.box = r.box();
  if (r.id >= 1) q.identity = r.id;
  q.confidence = std::clamp(r.conf, 0.0, 1.0);
  return q;
}

int run_qtsi_trace(const QtsiTraceArgs& args, std::ostream& out) {
  std::map<int, std::vector<Query>> detect_by_frame, track_by_frame;
  std::map<int, std::vector<BoundingBox>> real_by_frame;
  for (const MotRecord& r : read_mot_file(args.det_path)) {
    detect_by_frame[r.frame].push_back(query_from_record(r, QueryKind::Detect));
  }
  for (const MotRecord& r : read_mot_file(args.track_path)) {
    track_by_frame[r.frame].push_back(query_from_record(r, QueryKind::Track));
  }
  for (const MotRecord& r : read_mot_file(args.gt_path)) {
    real_by_frame[r.frame].push_back(r.box());
  }

  QtsiConfig config;
  config.iou_threshold = args.phi;
  config.tie_margin = args.tie_margin;

  static const std::vector<Query> kNoNewMatches;
  for (const auto& [frame, real_boxes] : real_by_frame) {
    const auto det_it = detect_by_frame.find(frame);
    const auto trk_it = track_by_frame.find(frame);
    const std::vector<Query>& detect =
        det_it != detect_by_frame.end() ? det_it->second : kNoNewMatches;
    const std::vector<Query>& track =
        trk_it != track_by_frame.end() ? trk_it->second : kNoNewMatches;
    const QtsiResult result =
        qtsi_merge(detect, track, real_boxes, kNoNewMatches, config);
    for (const QtsiDecision& d : result.decisions) {
      out << "frame=" << frame << " real=" << d.real_index;
      if (d.source == QtsiSource::Unmatched) {
        out << " source=none best_iou=" << format_number(d.iou) << '\n';
        continue;
      }
      const bool from_detect = d.source == QtsiSource::FromDetect;
      out << " source=" << (from_detect ? "detect" : "track")
          << " query=" << *d.query_index << " iou=" << format_number(d.iou);
      const std::vector<Query>& source_list = from_detect ? detect : track;
      std::optional<TrackId> identity = source_list[*d.query_index].identity;
      if (!identity.has_value()) identity = d.inherited_identity;
      out << " identity=";
      if (identity.has_value()) {
        out << *identity;
      } else {
        out << '-';
      }
      out << '\n';
    }
  }
  return 0;
}

struct ReportArgs {
  std::vector<std::string> inputs;
};

int run_report(const ReportArgs& args) {
  std::vector<ReportData> reports;
  for (const std::string& path : args.inputs) {
    std::ifstream in = open_input(path);
    try {
      reports.push_back(read_report(in));
    } catch (const ParseError& e) {
      throw std::runtime_error(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  write_report(aggregate_reports(reports), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fishtrack: multi-fish tracking, evaluation and simulation toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a synthetic scene: ground truth plus detections");
  sim->add_option("--config", sim_args.config_path,
                  "Scene configuration file (key = value lines); defaults used when omitted");
  sim->add_option("--out-gt", sim_args.out_gt, "Ground-truth output (MOT format)")
      ->required();
  sim->add_option("--out-det", sim_args.out_det, "Detections output (MOT format, id -1)")
      ->required();
  sim->add_option("--out-events", sim_args.out_events,
                  "Optional event-log output (injected drops, jitter, clutter)");
  CLI::Option* seed_opt =
      sim->add_option("--seed", sim_args.seed, "Scene seed; overrides the config file")
          ->capture_default_str();

  TrackArgs track_args;
  CLI::App* track = app.add_subcommand("track", "Run the online tracker over detections");
  track->add_option("--det", track_args.det_path, "Detections input (MOT format)")
      ->required();
  track->add_option("--out", track_args.out_path, "Tracker output (MOT format)")
      ->required();
  track->add_option("--iou-thresh", track_args.iou_thresh,
                    "Association IOU threshold; pairs at or below it never match")
      ->capture_default_str();
  track->add_option("--miss-tolerance", track_args.miss_tolerance,
                    "Consecutive unmatched frames before a track retires")
      ->capture_default_str();
  track->add_option("--min-conf", track_args.min_conf,
                    "Detections below this confidence are discarded")
      ->capture_default_str();
  track->add_flag("--include-coasting", track_args.include_coasting,
                  "Also emit unmatched-but-live tracks carried by the motion model");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a tracker output against ground truth");
  eval->add_option("--gt", eval_args.gt_path, "Ground-truth input (MOT format)")->required();
  eval->add_option("--pred", eval_args.pred_path, "Prediction input (MOT format)")
      ->required();
  eval->add_option("--iou-thresh", eval_args.iou_thresh, "Match IOU threshold")
      ->capture_default_str();
  eval->add_option("--report", eval_args.report_path,
                   "Also write the report to this file (always printed to stdout)");
  eval->add_flag("--motp-overlap", eval_args.motp_overlap,
                 "Report MOTP as mean raw overlap instead of mean 1 - IOU");

  QtsiTraceArgs qtsi_args;
  CLI::App* qtsi = app.add_subcommand(
      "qtsi-trace", "Trace the query merge procedure frame by frame");
  qtsi->add_option("--det", qtsi_args.det_path, "Detect queries (MOT format)")->required();
  qtsi->add_option("--track", qtsi_args.track_path, "Track queries (MOT format, positive ids)")
      ->required();
  qtsi->add_option("--gt", qtsi_args.gt_path, "Real boxes (MOT format)")->required();
  qtsi->add_option("--phi", qtsi_args.phi,
                   "Carry-over IOU threshold; winners must strictly exceed it")
      ->capture_default_str();
  qtsi->add_option("--tie-margin", qtsi_args.tie_margin,
                   "Detect queries win near-ties within this margin")
      ->capture_default_str();
  qtsi->add_option("--out", qtsi_args.out_path, "Write the trace here instead of stdout");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Aggregate evaluation reports");
  report->add_option("--in", report_args.inputs, "Report files to aggregate")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) {
      sim_args.seed_given = seed_opt->count() > 0;
      return run_simulate(sim_args);
    }
    if (track->parsed()) return run_track(track_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (qtsi->parsed()) {
      if (qtsi_args.out_path.empty()) return run_qtsi_trace(qtsi_args, std::cout);
      std::ofstream out = open_output(qtsi_args.out_path);
      return run_qtsi_trace(qtsi_args, out);
    }
    if (report->parsed()) return run_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
