// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fishtrack/geometry.hpp"

namespace fishtrack {

using TrackId = std::int64_t;

enum class QueryKind { Detect, Track };

/// A tracked or detected object hypothesis. Track queries carry the
/// identity they have been following; detect queries are fresh per-frame
/// hypotheses and normally have none. The payload is an opaque feature
/// handle carried through unmodified.
struct Query {
  QueryKind kind = QueryKind::Detect;
  BoundingBox box;
  std::optional<TrackId> identity;
  double confidence = 1.0;
  std::uint64_t payload = 0;

  friend bool operator==(const Query&, const Query&) = default;
};

struct QtsiConfig {
  /// A candidate query is carried over only if its winning overlap strictly
  /// exceeds this threshold.
  double iou_threshold = 0.5;
  /// When the best detect and best track overlaps for a box differ by at
  /// most this margin, the detect query is preferred.
  double tie_margin = 0.0;
};

enum class QtsiSource { FromDetect, FromTrack, Unmatched };

/// Outcome of the overlap competition for one real (annotated) box.
/// query_index points into detect_queries or track_queries depending on
/// source. For Unmatched boxes, iou records the best candidate score that
/// failed to clear the threshold (0 when no candidate existed).
struct QtsiDecision {
  std::size_t real_index = 0;
  QtsiSource source = QtsiSource::Unmatched;
  std::optional<std::size_t> query_index;
  double iou = 0.0;
  std::optional<TrackId> inherited_identity;
};

struct QtsiResult {
  std::vector<Query> merged;
  std::vector<QtsiDecision> decisions;
};

namespace detail {

struct QtsiChampion {
  bool found = false;
  bool from_detect = false;
  std::size_t index = 0;
  double score = -1.0;
};

// Best remaining candidate for one real box: the maximum-IOU detect query
// and the maximum-IOU track query compete, with detect preferred when the
// two scores are within tie_margin. Lower indices win exact ties inside a
// list.
inline QtsiChampion qtsi_champion(const BoundingBox& real_box,
                                  const std::vector<Query>& detect_queries,
                                  const std::vector<Query>& track_queries,
                                  const std::vector<char>& detect_used,
                                  const std::vector<char>& track_used,
                                  double tie_margin) {
  double best_detect = -1.0, best_track = -1.0;
  std::size_t detect_index = 0, track_index = 0;
  for (std::size_t i = 0; i < detect_queries.size(); ++i) {
    if (detect_used[i]) continue;
    const double v = iou(real_box, detect_queries[i].box);
    if (v > best_detect) {
      best_detect = v;
      detect_index = i;
    }
  }
  for (std::size_t i = 0; i < track_queries.size(); ++i) {
    if (track_used[i]) continue;
    const double v = iou(real_box, track_queries[i].box);
    if (v > best_track) {
      best_track = v;
      track_index = i;
    }
  }

  QtsiChampion champion;
  if (best_detect < 0.0 && best_track < 0.0) return champion;
  champion.found = true;
  if (best_track < 0.0 || (best_detect >= 0.0 && best_detect >= best_track - tie_margin)) {
    champion.from_detect = true;
    champion.index = detect_index;
    champion.score = best_detect;
  } else {
    champion.from_detect = false;
    champion.index = track_index;
    champion.score = best_track;
  }
  return champion;
}

inline void qtsi_validate(const std::vector<Query>& queries) {
  for (const Query& q : queries) {
    if (q.kind == QueryKind::Track && !q.identity.has_value()) {
      throw std::invalid_argument("qtsi_merge: track query without identity");
    }
    if (!q.box.valid()) {
      throw std::invalid_argument("qtsi_merge: query box is not a valid box");
    }
    if (!(q.confidence >= 0.0 && q.confidence <= 1.0)) {
      throw std::invalid_argument("qtsi_merge: query confidence outside [0, 1]");
    }
  }
}

}  // namespace detail

/// Query time-sequence intersection. For every real box the best detect
/// and track overlaps compete; the winner is carried over when its score
/// strictly exceeds config.iou_threshold. Each query wins at most one real
/// box: winners commit in descending score order and consumed queries drop
/// out of later competitions. The merged set is the union of the winners
/// with new_match_queries, value-deduplicated.
///
/// A winning detect query without an identity inherits the identity of the
/// strongest above-threshold track query on the same box, provided that
/// track query was carried over nowhere else; this is what collapses a
/// stale track hypothesis and a fresh detection of the same object into a
/// single query.
///
/// At tie_margin 0 the carried-over set shrinks monotonically as the
/// threshold rises.
inline QtsiResult qtsi_merge(const std::vector<Query>& detect_queries,
                             const std::vector<Query>& track_queries,
                             const std::vector<BoundingBox>& real_boxes,
                             const std::vector<Query>& new_match_queries,
                             const QtsiConfig& config = {}) {
  if (!(config.iou_threshold >= 0.0 && config.iou_threshold <= 1.0)) {
    throw std::invalid_argument("qtsi_merge: iou_threshold outside [0, 1]");
  }
  if (!(config.tie_margin >= 0.0) || std::isinf(config.tie_margin)) {
    throw std::invalid_argument("qtsi_merge: tie_margin must be finite and >= 0");
  }
  detail::qtsi_validate(detect_queries);
  detail::qtsi_validate(track_queries);
  detail::qtsi_validate(new_match_queries);
  for (const BoundingBox& b : real_boxes) {
    if (!b.valid()) throw std::invalid_argument("qtsi_merge: invalid real box");
  }

  const std::size_t n_boxes = real_boxes.size();
  std::vector<char> detect_used(detect_queries.size(), 0);
  std::vector<char> track_used(track_queries.size(), 0);
  std::vector<char> decided(n_boxes, 0);

  QtsiResult result;
  result.decisions.resize(n_boxes);
  for (std::size_t b = 0; b < n_boxes; ++b) result.decisions[b].real_index = b;

  // Commit winners in descending score order; each commit consumes the
  // winning query, so later rounds recompute champions over what is left.
  while (true) {
    std::size_t best_box = n_boxes;
    detail::QtsiChampion best;
    for (std::size_t b = 0; b < n_boxes; ++b) {
      if (decided[b]) continue;
      const detail::QtsiChampion c = detail::qtsi_champion(
          real_boxes[b], detect_queries, track_queries, detect_used,
          track_used, config.tie_margin);
      if (!c.found || c.score <= config.iou_threshold) continue;
      const bool better =
          best_box == n_boxes || c.score > best.score ||
          (c.score == best.score && c.from_detect && !best.from_detect);
      if (better) {
        best = c;
        best_box = b;
      }
    }
    if (best_box == n_boxes) break;

    QtsiDecision& d = result.decisions[best_box];
    d.source = best.from_detect ? QtsiSource::FromDetect : QtsiSource::FromTrack;
    d.query_index = best.index;
    d.iou = best.score;
    decided[best_box] = 1;
    if (best.from_detect) {
      detect_used[best.index] = 1;
    } else {
      track_used[best.index] = 1;
    }
  }

  // Record the best score the losers saw, for tracing.
  for (std::size_t b = 0; b < n_boxes; ++b) {
    if (decided[b]) continue;
    const detail::QtsiChampion c = detail::qtsi_champion(
        real_boxes[b], detect_queries, track_queries, detect_used, track_used,
        config.tie_margin);
    result.decisions[b].iou = c.found ? std::max(c.score, 0.0) : 0.0;
  }

  // Identity hand-off: a displaced track query (above threshold on a
  // detect-won box, selected nowhere) donates its identity to the detect
  // winner. Each identity is donated once; stronger overlaps claim first.
  while (true) {
    std::size_t best_box = n_boxes;
    std::size_t best_donor = 0;
    double best_iou = -1.0;
    for (std::size_t b = 0; b < n_boxes; ++b) {
      const QtsiDecision& d = result.decisions[b];
      if (d.source != QtsiSource::FromDetect) continue;
      if (d.inherited_identity.has_value()) continue;
      if (detect_queries[*d.query_index].identity.has_value()) continue;
      for (std::size_t j = 0; j < track_queries.size(); ++j) {
        if (track_used[j]) continue;  // selected or already donated
        const double v = iou(real_boxes[b], track_queries[j].box);
        if (v <= config.iou_threshold) continue;
        if (v > best_iou) {
          best_iou = v;
          best_box = b;
          best_donor = j;
        }
      }
    }
    if (best_box == n_boxes) break;
    result.decisions[best_box].inherited_identity =
        track_queries[best_donor].identity;
    track_used[best_donor] = 1;
  }

  // Merged set per the union rule: winners in real-box order, then the
  // new-match queries, with value duplicates collapsed. A new-match entry
  // equal to a winner's pre-inheritance value is the same input query and
  // collapses too.
  std::vector<Query> winner_originals;
  auto push_unique = [&result](const Query& q) {
    for (const Query& existing : result.merged) {
      if (existing == q) return;
    }
    result.merged.push_back(q);
  };
  for (std::size_t b = 0; b < n_boxes; ++b) {
    const QtsiDecision& d = result.decisions[b];
    if (d.source == QtsiSource::FromDetect) {
      Query q = detect_queries[*d.query_index];
      winner_originals.push_back(q);
      if (!q.identity.has_value() && d.inherited_identity.has_value()) {
        q.identity = d.inherited_identity;
      }
      push_unique(q);
    } else if (d.source == QtsiSource::FromTrack) {
      winner_originals.push_back(track_queries[*d.query_index]);
      push_unique(track_queries[*d.query_index]);
    }
  }
  for (const Query& q : new_match_queries) {
    if (std::find(winner_originals.begin(), winner_originals.end(), q) !=
        winner_originals.end()) {
      continue;
    }
    push_unique(q);
  }
  return result;
}

}  // namespace fishtrack
