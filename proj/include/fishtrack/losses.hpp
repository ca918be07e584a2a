// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fishtrack/geometry.hpp"

namespace fishtrack {

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before any
/// logarithm.
inline constexpr double kProbEpsilon = 1e-7;

struct LossWeights {
  double lambda_cls = 2.0;
  double lambda_l1 = 5.0;
  double lambda_giou = 2.0;
};

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

/// Focal classification loss for a single prediction.
/// Positive: -alpha * (1-p)^gamma * ln(p); negative: -(1-alpha) * p^gamma * ln(1-p).
inline double focal_loss(double predicted_prob, bool is_positive,
                         double alpha = 0.25, double gamma = 2.0) {
  const double p = std::clamp(predicted_prob, kProbEpsilon, 1.0 - kProbEpsilon);
  if (is_positive) {
    return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
}

/// A prediction already matched to its ground-truth box.
struct MatchedPair {
  BoundingBox predicted;
  double probability = 1.0;
  BoundingBox ground_truth;
};

/// Weighted single-frame loss over matched pairs:
/// lambda_cls * mean focal + lambda_l1 * mean per-coordinate |difference|
/// (coordinates normalized by the image size) + lambda_giou * mean (1 - giou).
/// An empty pair list yields 0.
inline double frame_loss(const std::vector<MatchedPair>& matched_pairs,
                         double image_width, double image_height,
                         const LossWeights& weights = {},
                         const FocalParams& focal = {}) {
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw std::invalid_argument("frame_loss: image dimensions must be positive");
  }
  if (matched_pairs.empty()) return 0.0;

  double cls_sum = 0.0, l1_sum = 0.0, giou_sum = 0.0;
  for (const MatchedPair& pair : matched_pairs) {
    cls_sum += focal_loss(pair.probability, true, focal.alpha, focal.gamma);
    const double dx = std::abs(pair.predicted.x - pair.ground_truth.x) / image_width;
    const double dy = std::abs(pair.predicted.y - pair.ground_truth.y) / image_height;
    const double dw = std::abs(pair.predicted.w - pair.ground_truth.w) / image_width;
    const double dh = std::abs(pair.predicted.h - pair.ground_truth.h) / image_height;
    l1_sum += (dx + dy + dw + dh) / 4.0;
    giou_sum += 1.0 - giou(pair.predicted, pair.ground_truth);
  }
  const double n = static_cast<double>(matched_pairs.size());
  return weights.lambda_cls * (cls_sum / n) + weights.lambda_l1 * (l1_sum / n) +
         weights.lambda_giou * (giou_sum / n);
}

/// Per-frame totals feeding the sequence-level average.
struct FrameLossStats {
  double track_loss = 0.0;
  double detect_loss = 0.0;
  long long v_track = 0;   // ground truths matched against track queries
  long long v_detect = 0;  // ground truths matched against detect queries
};

/// Sequence-level joint average: the frame losses summed over the clip,
/// divided by the total ground-truth count. Invariant under frame
/// reordering and under splitting a frame's stats across frames.
inline double joint_average_loss(const std::vector<FrameLossStats>& frames) {
  double loss_sum = 0.0;
  long long gt_sum = 0;
  for (const FrameLossStats& f : frames) {
    if (f.v_track < 0 || f.v_detect < 0) {
      throw std::invalid_argument("joint_average_loss: negative ground-truth count");
    }
    loss_sum += f.track_loss + f.detect_loss;
    gt_sum += f.v_track + f.v_detect;
  }
  if (gt_sum == 0) {
    throw std::domain_error("joint_average_loss: undefined, no ground truths");
  }
  return loss_sum / static_cast<double>(gt_sum);
}

}  // namespace fishtrack
