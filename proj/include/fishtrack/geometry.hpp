// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

namespace fishtrack {

/// Axis-aligned box in pixel coordinates, stored as top-left corner plus
/// width and height (the MOT interchange convention). Degenerate boxes
/// (zero width or height) are legal values everywhere in the library.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  bool valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
           std::isfinite(h) && w >= 0.0 && h >= 0.0;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// A scored detector output box.
struct Detection {
  BoundingBox box;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

namespace detail {

// All widths below derive from the same rounded corner values, so
// identical boxes produce intersection == area == union bit-exactly and
// matched copies score exactly 1.
struct OverlapTerms {
  double inter = 0.0;
  double uni = 0.0;
  double enclosing = 0.0;
};

inline OverlapTerms overlap_terms(const BoundingBox& a, const BoundingBox& b) {
  const double ax2 = a.x + a.w, ay2 = a.y + a.h;
  const double bx2 = b.x + b.w, by2 = b.y + b.h;
  const double iw = std::min(ax2, bx2) - std::max(a.x, b.x);
  const double ih = std::min(ay2, by2) - std::max(a.y, b.y);
  OverlapTerms t;
  t.inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double area_a = (ax2 - a.x) * (ay2 - a.y);
  const double area_b = (bx2 - b.x) * (by2 - b.y);
  t.uni = area_a + area_b - t.inter;
  t.enclosing = (std::max(ax2, bx2) - std::min(a.x, b.x)) *
                (std::max(ay2, by2) - std::min(a.y, b.y));
  return t;
}

}  // namespace detail

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  return detail::overlap_terms(a, b).inter;
}

/// Intersection over union in [0, 1]. An empty union yields 0; identical
/// non-empty boxes yield exactly 1.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const detail::OverlapTerms t = detail::overlap_terms(a, b);
  if (t.uni <= 0.0) return 0.0;
  return t.inter / t.uni;
}

/// Generalized IOU in [-1, 1]: overlap minus the fraction of the smallest
/// enclosing box left uncovered by the union. Equals iou(a, b) whenever the
/// enclosing box coincides with the union, and 1 for identical non-empty
/// boxes.
inline double giou(const BoundingBox& a, const BoundingBox& b) {
  const detail::OverlapTerms t = detail::overlap_terms(a, b);
  if (t.enclosing <= 0.0) return 0.0;
  const double overlap = t.uni <= 0.0 ? 0.0 : t.inter / t.uni;
  return overlap - (t.enclosing - t.uni) / t.enclosing;
}

}  // namespace fishtrack
