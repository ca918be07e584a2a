// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fishtrack/geometry.hpp"
#include "fishtrack/metrics.hpp"

namespace fishtrack {

/// Synthetic tank scene parameters. Defaults model a 1920x1080 camera at
/// 30 FPS over a 15 s clip. fps is carried as clip metadata; the dynamics
/// are expressed per frame.
struct SceneConfig {
  double tank_width = 1920.0;
  double tank_height = 1080.0;
  double fps = 30.0;
  int duration_frames = 450;
  int fish_count = 8;
  double fish_size_mean = 80.0;
  double fish_size_stddev = 10.0;
  double speed_max = 6.0;      // pixels/frame
  double turn_rate = 0.2;      // radians/frame of bounded heading noise
  double occlusion_iou = 0.6;  // overlap above which the smaller fish drops
  double fn_rate = 0.0;
  double fp_rate = 0.0;
  double jitter_std = 0.0;  // pixels, detection position noise
  int clutter_count = 0;    // static distractors that seed false positives
  std::uint64_t seed = 1;
};

enum class SceneEventKind { Occlusion, FalseNegative, FalsePositive, Jitter };

/// One injected discrepancy between ground truth and the detections.
/// Occlusion/FalseNegative drop fish `fish` in `frame`; Jitter replaces its
/// box with `box`; FalsePositive adds `box` with `confidence`.
struct SceneEvent {
  SceneEventKind kind = SceneEventKind::FalseNegative;
  int frame = 0;      // 1-based
  int fish = -1;      // 0-based index into gt; -1 for clutter
  int occluder = -1;  // larger partner for Occlusion events
  double iou = 0.0;   // overlap that triggered an Occlusion
  BoundingBox box;
  double confidence = 0.0;
};

struct SceneOutput {
  std::vector<Trajectory> gt;                      // identity i+1 for fish i
  std::vector<std::vector<Detection>> detections;  // index frame-1
  std::vector<SceneEvent> events;
};

/// Portable draws on top of mt19937_64 so identical seeds give identical
/// scenes on every platform. uniform() scales the top 53 bits; normal() is
/// a plain Box-Muller transform.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline void validate_scene_config(const SceneConfig& c) {
  const bool rates_ok = c.occlusion_iou >= 0.0 && c.occlusion_iou <= 1.0 &&
                        c.fn_rate >= 0.0 && c.fn_rate <= 1.0 &&
                        c.fp_rate >= 0.0 && c.fp_rate <= 1.0;
  if (!rates_ok) {
    throw std::invalid_argument("SceneConfig: rates must lie in [0, 1]");
  }
  if (!(c.tank_width > 0.0) || !(c.tank_height > 0.0)) {
    throw std::invalid_argument("SceneConfig: tank dimensions must be positive");
  }
  if (c.duration_frames < 1) {
    throw std::invalid_argument("SceneConfig: duration_frames must be >= 1");
  }
  if (c.fish_count < 0 || c.clutter_count < 0) {
    throw std::invalid_argument("SceneConfig: counts must be >= 0");
  }
  if (!(c.fish_size_mean > 0.0) || c.fish_size_stddev < 0.0 ||
      c.speed_max < 0.0 || c.turn_rate < 0.0 || c.jitter_std < 0.0) {
    throw std::invalid_argument("SceneConfig: negative dynamics parameter");
  }
}

// Corruption draws come from a stream decoupled from the dynamics stream,
// so the two stages reproduce independently.
inline std::uint64_t corruption_seed(std::uint64_t seed) {
  return seed ^ 0xD2B74407B1CE6E93ull;
}

inline BoundingBox clip_to_tank(BoundingBox b, const SceneConfig& config) {
  const double left = std::max(b.x, 0.0);
  const double top = std::max(b.y, 0.0);
  const double right = std::min(b.x + b.w, config.tank_width);
  const double bottom = std::min(b.y + b.h, config.tank_height);
  return {left, top, std::max(right - left, 0.0), std::max(bottom - top, 0.0)};
}

}  // namespace detail

/// Smooth random-heading fish dynamics: per frame each heading integrates
/// bounded noise plus a soft separation steer away from close neighbours
/// (fish school without stacking), speed stays fixed per fish below
/// speed_max, and walls reflect. Every fish yields exactly one in-bounds
/// box per frame.
inline std::vector<Trajectory> simulate_trajectories(const SceneConfig& config) {
  detail::validate_scene_config(config);
  SceneRng rng(config.seed);

  struct Fish {
    double cx, cy, heading, speed, half;
  };
  std::vector<Fish> fish(config.fish_count);
  for (Fish& f : fish) {
    const double max_size =
        std::max(0.9 * std::min(config.tank_width, config.tank_height), 1.0);
    const double size = std::clamp(
        rng.normal(config.fish_size_mean, config.fish_size_stddev),
        std::min(4.0, max_size), max_size);
    f.half = size / 2.0;
    f.cx = rng.uniform(f.half, std::max(config.tank_width - f.half, f.half));
    f.cy = rng.uniform(f.half, std::max(config.tank_height - f.half, f.half));
    f.heading = rng.uniform(0.0, 6.283185307179586);
    f.speed = rng.uniform(0.4, 1.0) * config.speed_max;
  }

  std::vector<Trajectory> gt(config.fish_count);
  for (int i = 0; i < config.fish_count; ++i) gt[i].identity = i + 1;

  for (int frame = 1; frame <= config.duration_frames; ++frame) {
    for (int i = 0; i < config.fish_count; ++i) {
      const Fish& f = fish[i];
      gt[i].boxes[frame] = {f.cx - f.half, f.cy - f.half, 2.0 * f.half, 2.0 * f.half};
    }
    if (frame == config.duration_frames) break;

    const std::vector<Fish> snapshot = fish;
    for (int i = 0; i < config.fish_count; ++i) {
      Fish& f = fish[i];
      f.heading += rng.uniform(-config.turn_rate, config.turn_rate);

      double repel_x = 0.0, repel_y = 0.0;
      for (int j = 0; j < config.fish_count; ++j) {
        if (j == i) continue;
        const double dx = snapshot[i].cx - snapshot[j].cx;
        const double dy = snapshot[i].cy - snapshot[j].cy;
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double reach = 1.8 * (snapshot[i].half + snapshot[j].half);
        if (dist >= reach || dist <= 1e-9) continue;
        const double push = (reach - dist) / reach;
        repel_x += push * dx / dist;
        repel_y += push * dy / dist;
      }
      if (repel_x != 0.0 || repel_y != 0.0) {
        const double dir_x = std::cos(f.heading) + 2.0 * repel_x;
        const double dir_y = std::sin(f.heading) + 2.0 * repel_y;
        if (dir_x != 0.0 || dir_y != 0.0) f.heading = std::atan2(dir_y, dir_x);
      }

      f.cx += f.speed * std::cos(f.heading);
      f.cy += f.speed * std::sin(f.heading);
      const double lo_x = f.half, hi_x = std::max(config.tank_width - f.half, f.half);
      const double lo_y = f.half, hi_y = std::max(config.tank_height - f.half, f.half);
      if (f.cx < lo_x) {
        f.cx = 2.0 * lo_x - f.cx;
        f.heading = 3.141592653589793 - f.heading;
      } else if (f.cx > hi_x) {
        f.cx = 2.0 * hi_x - f.cx;
        f.heading = 3.141592653589793 - f.heading;
      }
      if (f.cy < lo_y) {
        f.cy = 2.0 * lo_y - f.cy;
        f.heading = -f.heading;
      } else if (f.cy > hi_y) {
        f.cy = 2.0 * hi_y - f.cy;
        f.heading = -f.heading;
      }
      f.cx = std::clamp(f.cx, lo_x, hi_x);
      f.cy = std::clamp(f.cy, lo_y, hi_y);
    }
  }
  return gt;
}

struct CorruptionResult {
  std::vector<std::vector<Detection>> detections;
  std::vector<SceneEvent> events;
};

/// Detector-noise stage, factored out so the drop/jitter/clutter rules can
/// run against constructed trajectories. Per frame: the smaller fish of
/// any pair overlapping above occlusion_iou drops; survivors drop with
/// probability fn_rate; remaining boxes take Gaussian position jitter and
/// clip to the tank; each clutter point emits a spurious box with
/// probability fp_rate. True detections carry confidence 1. Every
/// discrepancy lands in the event log.
inline CorruptionResult corrupt_detections(const std::vector<Trajectory>& gt,
                                           const SceneConfig& config) {
  detail::validate_scene_config(config);
  SceneRng rng(detail::corruption_seed(config.seed));

  struct Clutter {
    double cx, cy, size;
  };
  std::vector<Clutter> clutter(config.clutter_count);
  for (Clutter& c : clutter) {
    c.cx = rng.uniform(0.0, config.tank_width);
    c.cy = rng.uniform(0.0, config.tank_height);
    c.size = rng.uniform(0.4, 0.9) * config.fish_size_mean;
  }

  CorruptionResult result;
  result.detections.resize(config.duration_frames);
  const int n = static_cast<int>(gt.size());

  for (int frame = 1; frame <= config.duration_frames; ++frame) {
    std::vector<const BoundingBox*> boxes(n, nullptr);
    for (int i = 0; i < n; ++i) {
      const auto it = gt[i].boxes.find(frame);
      if (it != gt[i].boxes.end()) boxes[i] = &it->second;
    }

    std::vector<char> dropped(n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (boxes[i] == nullptr || boxes[j] == nullptr) continue;
        const double v = iou(*boxes[i], *boxes[j]);
        if (v <= config.occlusion_iou) continue;
        const bool drop_j = boxes[j]->area() <= boxes[i]->area();
        const int victim = drop_j ? j : i;
        const int occluder = drop_j ? i : j;
        if (dropped[victim]) continue;
        dropped[victim] = 1;
        result.events.push_back({SceneEventKind::Occlusion, frame, victim,
                                 occluder, v, *boxes[victim], 0.0});
      }
    }

    for (int i = 0; i < n; ++i) {
      if (boxes[i] == nullptr || dropped[i]) continue;
      if (config.fn_rate > 0.0 && rng.uniform() < config.fn_rate) {
        result.events.push_back(
            {SceneEventKind::FalseNegative, frame, i, -1, 0.0, *boxes[i], 0.0});
        continue;
      }
      BoundingBox box = *boxes[i];
      if (config.jitter_std > 0.0) {
        box.x += rng.normal(0.0, config.jitter_std);
        box.y += rng.normal(0.0, config.jitter_std);
        box = detail::clip_to_tank(box, config);
        result.events.push_back(
            {SceneEventKind::Jitter, frame, i, -1, 0.0, box, 1.0});
      }
      result.detections[frame - 1].push_back({box, 1.0});
    }

    for (const Clutter& c : clutter) {
      if (config.fp_rate <= 0.0 || rng.uniform() >= config.fp_rate) continue;
      BoundingBox box{c.cx - c.size / 2.0 + rng.normal(0.0, 2.0),
                      c.cy - c.size / 2.0 + rng.normal(0.0, 2.0), c.size, c.size};
      box = detail::clip_to_tank(box, config);
      const double conf = rng.uniform(0.3, 0.9);
      result.events.push_back(
          {SceneEventKind::FalsePositive, frame, -1, -1, 0.0, box, conf});
      result.detections[frame - 1].push_back({box, conf});
    }
  }
  return result;
}

/// Full scene generation: trajectories plus corrupted detections plus the
/// event log. Deterministic for a fixed config.
inline SceneOutput simulate(const SceneConfig& config) {
  SceneOutput out;
  out.gt = simulate_trajectories(config);
  CorruptionResult corrupted = corrupt_detections(out.gt, config);
  out.detections = std::move(corrupted.detections);
  out.events = std::move(corrupted.events);
  return out;
}

/// Reconstructs the detection stream from ground truth plus the event log;
/// the result must equal SceneOutput::detections exactly.
inline std::vector<std::vector<Detection>> replay_events(
    const std::vector<Trajectory>& gt, const std::vector<SceneEvent>& events,
    int duration_frames) {
  const int n = static_cast<int>(gt.size());
  std::vector<std::vector<Detection>> detections(duration_frames);
  for (int frame = 1; frame <= duration_frames; ++frame) {
    std::vector<char> dropped(n, 0);
    std::vector<const BoundingBox*> replacement(n, nullptr);
    for (const SceneEvent& e : events) {
      if (e.frame != frame) continue;
      if (e.kind == SceneEventKind::Occlusion || e.kind == SceneEventKind::FalseNegative) {
        dropped[e.fish] = 1;
      } else if (e.kind == SceneEventKind::Jitter) {
        replacement[e.fish] = &e.box;
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto it = gt[i].boxes.find(frame);
      if (it == gt[i].boxes.end() || dropped[i]) continue;
      detections[frame - 1].push_back(
          {replacement[i] != nullptr ? *replacement[i] : it->second, 1.0});
    }
    for (const SceneEvent& e : events) {
      if (e.frame == frame && e.kind == SceneEventKind::FalsePositive) {
        detections[frame - 1].push_back({e.box, e.confidence});
      }
    }
  }
  return detections;
}

}  // namespace fishtrack
