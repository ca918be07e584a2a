// Copyright 2026 The fishtrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fishtrack {

/// Sentinel cost marking a (row, col) pair that must never be matched.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

/// Dense row-major cost matrix. Every entry is either finite or kForbidden.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), cost_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t r, std::size_t c) { return cost_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return cost_[r * cols_ + c]; }

  bool forbidden(std::size_t r, std::size_t c) const {
    return at(r, c) == kForbidden;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cost_;
};

/// Assignment result. Pairs are reported sorted by row index; rows and
/// columns left without a non-forbidden partner are listed separately.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
  double total_cost = 0.0;
};

/// Minimum-cost bipartite assignment over the non-forbidden entries,
/// maximizing cardinality first. Rectangular matrices are padded
/// internally; padded pairs come back as unmatched. Deterministic for a
/// fixed input: the fixed scan order resolves cost ties toward lower row
/// and column indices.
inline Matching solve_min_cost(const CostMatrix& costs) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  const std::size_t dim = std::max(rows, cols);

  Matching result;
  if (dim == 0) return result;

  double max_abs = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = costs.at(r, c);
      if (v == kForbidden) continue;
      if (std::isnan(v) || std::isinf(v)) {
        throw std::invalid_argument(
            "solve_min_cost: cost entries must be finite or kForbidden");
      }
      max_abs = std::max(max_abs, std::abs(v));
    }
  }
  // Exceeds twice any achievable finite total, so swapping one padded or
  // forbidden cell for a real one always lowers the cost: cardinality wins
  // before cost.
  const double big = 2.0 * (max_abs + 1.0) * (static_cast<double>(dim) + 1.0);

  std::vector<double> a(dim * dim, big);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!costs.forbidden(r, c)) a[r * dim + c] = costs.at(r, c);
    }
  }

  // Jonker-Volgenant style shortest augmenting paths with potentials,
  // 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
  std::vector<std::size_t> p(dim + 1, 0), way(dim + 1, 0);
  for (std::size_t i = 1; i <= dim; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(dim + 1, inf);
    std::vector<char> used(dim + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= dim; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * dim + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= dim; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(dim, dim);
  for (std::size_t j = 1; j <= dim; ++j) row_to_col[p[j] - 1] = j - 1;

  std::vector<char> col_matched(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = row_to_col[r];
    if (c < cols && !costs.forbidden(r, c)) {
      result.pairs.emplace_back(r, c);
      result.total_cost += costs.at(r, c);
      col_matched[c] = 1;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_matched[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

}  // namespace fishtrack
