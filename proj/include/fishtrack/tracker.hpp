// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fishtrack/assignment.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/qtsi.hpp"

namespace fishtrack {

/// Live track bookkeeping. Velocity is in pixels/frame of the box origin.
struct TrackState {
  TrackId identity = 0;
  BoundingBox box;
  double vx = 0.0;
  double vy = 0.0;
  int miss_count = 0;
  int age = 1;
  double confidence = 1.0;
};

struct TrackerConfig {
  double iou_match_threshold = 0.5;
  int miss_tolerance = 100;
  double min_confidence = 0.1;
};

/// One emitted box. Coasting outputs are unmatched-but-live tracks carried
/// by the motion model; callers decide whether to keep them.
struct TrackOutput {
  TrackId identity = 0;
  BoundingBox box;
  double confidence = 1.0;
  bool coasting = false;
};

/// Online IOU tracker over one sequence. Per frame: live boxes advance by
/// their velocity, detections associate by min-cost assignment on 1 - IOU
/// (pairs at or below iou_match_threshold are forbidden), matched tracks
/// refresh, unmatched tracks coast until miss_count exceeds miss_tolerance,
/// and leftover detections mint fresh monotonically increasing identities.
/// Identities are never reused within a sequence.
class Tracker {
 public:
  explicit Tracker(const TrackerConfig& config = {}) : config_(config) {
    if (config.miss_tolerance < 0) {
      throw std::invalid_argument("Tracker: miss_tolerance must be >= 0");
    }
    if (!(config.iou_match_threshold >= 0.0 && config.iou_match_threshold <= 1.0)) {
      throw std::invalid_argument("Tracker: iou_match_threshold outside [0, 1]");
    }
  }

  const TrackerConfig& config() const { return config_; }
  const std::vector<TrackState>& tracks() const { return tracks_; }

  std::vector<TrackOutput> step(const std::vector<Detection>& detections,
                                int frame_index) {
    if (last_frame_.has_value() && frame_index <= *last_frame_) {
      throw std::logic_error("Tracker::step: frame_index must strictly increase");
    }
    last_frame_ = frame_index;

    std::vector<Detection> kept;
    kept.reserve(detections.size());
    for (const Detection& d : detections) {
      if (d.confidence >= config_.min_confidence) kept.push_back(d);
    }

    // Constant-velocity prediction; the pre-advance origin feeds the
    // velocity observation below.
    std::vector<double> prev_x(tracks_.size()), prev_y(tracks_.size());
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      prev_x[t] = tracks_[t].box.x;
      prev_y[t] = tracks_[t].box.y;
      tracks_[t].box.x += tracks_[t].vx;
      tracks_[t].box.y += tracks_[t].vy;
    }

    CostMatrix costs(tracks_.size(), kept.size());
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      for (std::size_t d = 0; d < kept.size(); ++d) {
        const double v = iou(tracks_[t].box, kept[d].box);
        costs.at(t, d) = v > config_.iou_match_threshold ? 1.0 - v : kForbidden;
      }
    }
    const Matching match = solve_min_cost(costs);

    std::vector<char> track_matched(tracks_.size(), 0);
    std::vector<char> det_matched(kept.size(), 0);
    for (const auto& [t, d] : match.pairs) {
      track_matched[t] = 1;
      det_matched[d] = 1;
      TrackState& track = tracks_[t];
      track.vx = 0.5 * track.vx + 0.5 * (kept[d].box.x - prev_x[t]);
      track.vy = 0.5 * track.vy + 0.5 * (kept[d].box.y - prev_y[t]);
      track.box = kept[d].box;
      track.confidence = kept[d].confidence;
      track.miss_count = 0;
      track.age += 1;
    }

    std::vector<TrackState> survivors;
    survivors.reserve(tracks_.size());
    std::vector<TrackOutput> outputs;
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      TrackState& track = tracks_[t];
      if (!track_matched[t]) {
        track.miss_count += 1;
        track.age += 1;
        if (track.miss_count > config_.miss_tolerance) continue;  // retired
        outputs.push_back({track.identity, track.box, track.confidence, true});
      } else {
        outputs.push_back({track.identity, track.box, track.confidence, false});
      }
      survivors.push_back(track);
    }
    for (std::size_t d = 0; d < kept.size(); ++d) {
      if (det_matched[d]) continue;
      TrackState fresh;
      fresh.identity = next_identity_++;
      fresh.box = kept[d].box;
      fresh.confidence = kept[d].confidence;
      survivors.push_back(fresh);
      outputs.push_back({fresh.identity, fresh.box, fresh.confidence, false});
    }
    tracks_ = std::move(survivors);

    std::sort(outputs.begin(), outputs.end(),
              [](const TrackOutput& a, const TrackOutput& b) {
                return a.identity < b.identity;
              });
    return outputs;
  }

 private:
  TrackerConfig config_;
  std::vector<TrackState> tracks_;
  TrackId next_identity_ = 1;
  std::optional<int> last_frame_;
};

}  // namespace fishtrack
