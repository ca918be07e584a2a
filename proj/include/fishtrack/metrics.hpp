// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "fishtrack/assignment.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/qtsi.hpp"

namespace fishtrack {

/// One identity's boxes, keyed by frame index. Ground-truth and predicted
/// tracks share this shape.
struct Trajectory {
  TrackId identity = 0;
  std::map<int, BoundingBox> boxes;
};

/// Accumulators behind every reported metric. match_distances holds
/// 1 - IOU for each frame-level match, in accumulation order.
struct EvalCounts {
  long long false_negatives = 0;
  long long false_positives = 0;
  long long id_switches = 0;
  long long total_gt = 0;
  std::vector<double> match_distances;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;

  long long match_count() const {
    return static_cast<long long>(match_distances.size());
  }
  double distance_sum() const {
    return std::accumulate(match_distances.begin(), match_distances.end(), 0.0);
  }
};

/// Frame-by-frame CLEAR-MOT accumulation. Correspondences from earlier
/// frames are carried forward while they still overlap above the
/// threshold; the remainder is matched per frame by min-cost assignment on
/// 1 - IOU with pairs at or below the threshold forbidden. A switch is
/// counted whenever a ground-truth identity's matched prediction differs
/// from its most recent matched prediction, across any gap.
inline EvalCounts clear_mot(const std::vector<Trajectory>& gt,
                            const std::vector<Trajectory>& pred,
                            double iou_threshold = 0.5) {
  EvalCounts counts;

  std::set<int> frames;
  for (const Trajectory& t : gt) {
    for (const auto& [f, box] : t.boxes) frames.insert(f);
  }
  for (const Trajectory& t : pred) {
    for (const auto& [f, box] : t.boxes) frames.insert(f);
  }

  std::map<TrackId, TrackId> last_match;  // gt identity -> prediction identity
  for (const int frame : frames) {
    std::vector<std::size_t> gt_here, pred_here;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i].boxes.count(frame)) gt_here.push_back(i);
    }
    for (std::size_t j = 0; j < pred.size(); ++j) {
      if (pred[j].boxes.count(frame)) pred_here.push_back(j);
    }
    counts.total_gt += static_cast<long long>(gt_here.size());

    std::vector<char> gt_claimed(gt_here.size(), 0);
    std::vector<char> pred_claimed(pred_here.size(), 0);

    // Carry-forward: an existing correspondence keeps priority while it
    // still clears the threshold.
    for (std::size_t gi = 0; gi < gt_here.size(); ++gi) {
      const Trajectory& g = gt[gt_here[gi]];
      const auto carried = last_match.find(g.identity);
      if (carried == last_match.end()) continue;
      for (std::size_t pj = 0; pj < pred_here.size(); ++pj) {
        if (pred_claimed[pj]) continue;
        const Trajectory& p = pred[pred_here[pj]];
        if (p.identity != carried->second) continue;
        const double v = iou(g.boxes.at(frame), p.boxes.at(frame));
        if (v > iou_threshold) {
          gt_claimed[gi] = 1;
          pred_claimed[pj] = 1;
          counts.match_distances.push_back(1.0 - v);
          // last_match already holds this pairing; no switch possible.
        }
        break;
      }
    }

    // Assign the rest.
    std::vector<std::size_t> free_gt, free_pred;
    for (std::size_t gi = 0; gi < gt_here.size(); ++gi) {
      if (!gt_claimed[gi]) free_gt.push_back(gi);
    }
    for (std::size_t pj = 0; pj < pred_here.size(); ++pj) {
      if (!pred_claimed[pj]) free_pred.push_back(pj);
    }
    CostMatrix costs(free_gt.size(), free_pred.size());
    for (std::size_t r = 0; r < free_gt.size(); ++r) {
      const BoundingBox& gb = gt[gt_here[free_gt[r]]].boxes.at(frame);
      for (std::size_t c = 0; c < free_pred.size(); ++c) {
        const BoundingBox& pb = pred[pred_here[free_pred[c]]].boxes.at(frame);
        const double v = iou(gb, pb);
        costs.at(r, c) = v > iou_threshold ? 1.0 - v : kForbidden;
      }
    }
    const Matching assigned = solve_min_cost(costs);
    for (const auto& [r, c] : assigned.pairs) {
      const Trajectory& g = gt[gt_here[free_gt[r]]];
      const Trajectory& p = pred[pred_here[free_pred[c]]];
      gt_claimed[free_gt[r]] = 1;
      pred_claimed[free_pred[c]] = 1;
      counts.match_distances.push_back(costs.at(r, c));
      const auto previous = last_match.find(g.identity);
      if (previous != last_match.end() && previous->second != p.identity) {
        counts.id_switches += 1;
      }
      last_match[g.identity] = p.identity;
    }

    for (const char claimed : gt_claimed) {
      if (!claimed) counts.false_negatives += 1;
    }
    for (const char claimed : pred_claimed) {
      if (!claimed) counts.false_positives += 1;
    }
  }
  return counts;
}

/// 1 - (FN + FP + switches) / T. May be negative; undefined without ground truth.
inline double mota(const EvalCounts& counts) {
  if (counts.total_gt <= 0) {
    throw std::domain_error("mota: undefined, no ground-truth boxes");
  }
  return 1.0 - static_cast<double>(counts.false_negatives +
                                   counts.false_positives + counts.id_switches) /
                   static_cast<double>(counts.total_gt);
}

/// Mean match distance, with distance 1 - IOU (lower is better).
inline double motp(const EvalCounts& counts) {
  if (counts.match_count() == 0) {
    throw std::domain_error("motp: undefined, no matches");
  }
  return counts.distance_sum() / static_cast<double>(counts.match_count());
}

/// Mean raw overlap of the matches (higher is better); the alternate
/// convention exposed for comparison.
inline double motp_overlap(const EvalCounts& counts) {
  if (counts.match_count() == 0) {
    throw std::domain_error("motp: undefined, no matches");
  }
  return 1.0 - counts.distance_sum() / static_cast<double>(counts.match_count());
}

struct IdMetrics {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  bool idp_defined = true;
  bool idr_defined = true;
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
};

/// Identity-aware metrics under the globally optimal pairing of
/// ground-truth and prediction identities. The pairing cost of (g, p) is
/// its false-positive plus false-negative box count len(g) + len(p) -
/// 2 * colocated(g, p); dummy rows and columns charge unpaired identities
/// their full length. IDTP is the colocated-frame total of the optimal
/// pairing.
inline IdMetrics id_metrics(const std::vector<Trajectory>& gt,
                            const std::vector<Trajectory>& pred,
                            double iou_threshold = 0.5) {
  long long total_gt_boxes = 0, total_pred_boxes = 0;
  for (const Trajectory& t : gt) total_gt_boxes += static_cast<long long>(t.boxes.size());
  for (const Trajectory& t : pred) total_pred_boxes += static_cast<long long>(t.boxes.size());
  if (total_gt_boxes == 0 && total_pred_boxes == 0) {
    throw std::domain_error("id_metrics: undefined, both trajectory sets empty");
  }

  const std::size_t n_gt = gt.size();
  const std::size_t n_pred = pred.size();
  std::vector<long long> coloc(n_gt * n_pred, 0);
  for (std::size_t i = 0; i < n_gt; ++i) {
    for (std::size_t j = 0; j < n_pred; ++j) {
      long long count = 0;
      for (const auto& [frame, gb] : gt[i].boxes) {
        const auto it = pred[j].boxes.find(frame);
        if (it != pred[j].boxes.end() && iou(gb, it->second) > iou_threshold) {
          ++count;
        }
      }
      coloc[i * n_pred + j] = count;
    }
  }

  // Square matrix with one dummy column per ground-truth identity and one
  // dummy row per prediction identity.
  const std::size_t dim = n_gt + n_pred;
  CostMatrix costs(dim, dim, kForbidden);
  for (std::size_t i = 0; i < n_gt; ++i) {
    const auto len_g = static_cast<double>(gt[i].boxes.size());
    for (std::size_t j = 0; j < n_pred; ++j) {
      const auto len_p = static_cast<double>(pred[j].boxes.size());
      costs.at(i, j) = len_g + len_p - 2.0 * static_cast<double>(coloc[i * n_pred + j]);
    }
    costs.at(i, n_pred + i) = len_g;  // identity left unpaired: all boxes missed
  }
  for (std::size_t j = 0; j < n_pred; ++j) {
    costs.at(n_gt + j, j) = static_cast<double>(pred[j].boxes.size());
    for (std::size_t i = 0; i < n_gt; ++i) costs.at(n_gt + j, n_pred + i) = 0.0;
  }

  const Matching pairing = solve_min_cost(costs);
  IdMetrics m;
  for (const auto& [r, c] : pairing.pairs) {
    if (r < n_gt && c < n_pred) m.idtp += coloc[r * n_pred + c];
  }
  m.idfp = total_pred_boxes - m.idtp;
  m.idfn = total_gt_boxes - m.idtp;

  m.idf1 = 2.0 * static_cast<double>(m.idtp) /
           static_cast<double>(2 * m.idtp + m.idfp + m.idfn);
  if (m.idtp + m.idfp > 0) {
    m.idp = static_cast<double>(m.idtp) / static_cast<double>(m.idtp + m.idfp);
  } else {
    m.idp_defined = false;
  }
  if (m.idtp + m.idfn > 0) {
    m.idr = static_cast<double>(m.idtp) / static_cast<double>(m.idtp + m.idfn);
  } else {
    m.idr_defined = false;
  }
  return m;
}

struct EvalOptions {
  double iou_threshold = 0.5;
  /// Report MOTP as mean raw overlap instead of mean 1 - IOU.
  bool motp_as_overlap = false;
};

struct EvalReport {
  double mota = 0.0;
  double motp = 0.0;
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  bool motp_defined = true;
  bool idp_defined = true;
  bool idr_defined = true;
  bool motp_as_overlap = false;
  EvalCounts counts;
};

/// Full evaluation of one sequence: CLEAR-MOT accumulation plus identity
/// metrics. Requires at least one ground-truth box.
inline EvalReport evaluate(const std::vector<Trajectory>& gt,
                           const std::vector<Trajectory>& pred,
                           const EvalOptions& options = {}) {
  EvalReport report;
  report.motp_as_overlap = options.motp_as_overlap;
  report.counts = clear_mot(gt, pred, options.iou_threshold);
  const IdMetrics ids = id_metrics(gt, pred, options.iou_threshold);
  report.counts.idtp = ids.idtp;
  report.counts.idfp = ids.idfp;
  report.counts.idfn = ids.idfn;

  report.mota = mota(report.counts);
  if (report.counts.match_count() > 0) {
    report.motp = options.motp_as_overlap ? motp_overlap(report.counts)
                                          : motp(report.counts);
  } else {
    report.motp_defined = false;
  }
  report.idf1 = ids.idf1;
  report.idp = ids.idp;
  report.idr = ids.idr;
  report.idp_defined = ids.idp_defined;
  report.idr_defined = ids.idr_defined;
  return report;
}

}  // namespace fishtrack
