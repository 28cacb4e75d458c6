// Copyright 2026 The sgshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sgshape/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sgshape {
namespace {

constexpr double kReducedCostEps = 1e-12;
constexpr double kPivotEps = 1e-9;

void normalize(std::vector<double>& dist) {
  double total = 0.0;
  for (double& x : dist) {
    x = std::max(x, 0.0);
    total += x;
  }
  if (total <= 0.0) {
    std::fill(dist.begin(), dist.end(), 0.0);
    dist[0] = 1.0;
    return;
  }
  for (double& x : dist) x /= total;
}

}  // namespace

// Pure saddle point: the best row floor meets the best column ceiling. Both
// are matrix entries, so the comparison is exact. Lowest indices win ties,
// as in the simplex path.
bool ZeroSumLpWorkspace::solve_saddle(std::span<const double> payoff, int rows,
                                      int cols) {
  int best_row = 0;
  double floor = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < rows; ++r) {
    const double* row = payoff.data() + static_cast<size_t>(r) * cols;
    const double m = *std::min_element(row, row + cols);
    if (m > floor) floor = m, best_row = r;
  }
  int best_col = 0;
  double ceiling = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cols; ++c) {
    double m = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) m = std::max(m, payoff[r * cols + c]);
    if (m < ceiling) ceiling = m, best_col = c;
  }
  if (floor != ceiling) return false;
  solution_.value = floor;
  solution_.row_strategy.assign(rows, 0.0);
  solution_.row_strategy[best_row] = 1.0;
  solution_.col_strategy.assign(cols, 0.0);
  solution_.col_strategy[best_col] = 1.0;
  return true;
}

const ZeroSumSolution& ZeroSumLpWorkspace::solve(std::span<const double> payoff,
                                                 int rows, int cols) {
  if (rows <= 0 || cols <= 0 ||
      static_cast<int>(payoff.size()) != rows * cols) {
    throw std::invalid_argument("zero-sum LP: bad matrix shape");
  }
  if (solve_saddle(payoff, rows, cols)) return solution_;
  const double min_entry = *std::min_element(payoff.begin(), payoff.end());
  const double shift = 1.0 - min_entry;

  // Columns: y_0..y_{cols-1}, slack_0..slack_{rows-1}, rhs.
  const int width = cols + rows + 1;
  const int rhs = width - 1;
  tableau_.assign(static_cast<size_t>(rows + 1) * width, 0.0);
  auto at = [&](int r, int c) -> double& { return tableau_[r * width + c]; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) at(r, c) = payoff[r * cols + c] + shift;
    at(r, cols + r) = 1.0;
    at(r, rhs) = 1.0;
  }
  for (int c = 0; c < cols; ++c) at(rows, c) = -1.0;
  basis_.resize(rows);
  std::iota(basis_.begin(), basis_.end(), cols);

  // Bland's rule terminates; the cap guards against float pathologies.
  const int max_pivots = 50 * (rows + cols) + 100;
  for (int pivots = 0;; ++pivots) {
    if (pivots > max_pivots) {
      throw std::runtime_error("zero-sum LP: simplex failed to terminate");
    }
    // Bland's rule: the first improving column that admits a pivot. A
    // column whose entries are all round-off noise is skipped; with every
    // shifted entry >= 1 the problem is bounded, so such a column is never
    // genuinely unbounded.
    int enter = -1;
    int leave = -1;
    for (int c = 0; c < rhs && leave < 0; ++c) {
      if (at(rows, c) >= -kReducedCostEps) continue;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        const double a = at(r, c);
        if (a > kPivotEps) min_ratio = std::min(min_ratio, std::max(at(r, rhs), 0.0) / a);
      }
      if (std::isinf(min_ratio)) continue;
      const double tie = kReducedCostEps * std::max(1.0, min_ratio);
      for (int r = 0; r < rows; ++r) {
        const double a = at(r, c);
        if (a <= kPivotEps || std::max(at(r, rhs), 0.0) / a > min_ratio + tie) continue;
        if (leave < 0 || basis_[r] < basis_[leave]) leave = r;
      }
      enter = c;
    }
    if (enter < 0) break;
    const double pivot = at(leave, enter);
    for (int c = 0; c < width; ++c) at(leave, c) /= pivot;
    for (int r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (int c = 0; c < width; ++c) at(r, c) -= factor * at(leave, c);
      // Ties admitted by the ratio test can leave -eps right-hand sides.
      if (r < rows && at(r, rhs) < 0.0) at(r, rhs) = 0.0;
    }
    basis_[leave] = enter;
  }

  const double w = at(rows, rhs);
  solution_.col_strategy.assign(cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    if (basis_[r] < cols) solution_.col_strategy[basis_[r]] = at(r, rhs) / w;
  }
  solution_.row_strategy.assign(rows, 0.0);
  for (int r = 0; r < rows; ++r) solution_.row_strategy[r] = at(rows, cols + r) / w;
  normalize(solution_.col_strategy);
  normalize(solution_.row_strategy);

  // 1/w - shift loses digits after small pivots; the two guarantees of the
  // returned strategies bracket the value and coincide at an exact solution.
  double row_guarantee = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cols; ++c) {
    double x = 0.0;
    for (int r = 0; r < rows; ++r) x += solution_.row_strategy[r] * payoff[r * cols + c];
    row_guarantee = std::min(row_guarantee, x);
  }
  double col_guarantee = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < rows; ++r) {
    double x = 0.0;
    for (int c = 0; c < cols; ++c) x += solution_.col_strategy[c] * payoff[r * cols + c];
    col_guarantee = std::max(col_guarantee, x);
  }
  solution_.value = 0.5 * (row_guarantee + col_guarantee);
  return solution_;
}

ZeroSumSolution solve_matrix_zero_sum(std::span<const double> payoff, int rows,
                                      int cols) {
  ZeroSumLpWorkspace workspace;
  return workspace.solve(payoff, rows, cols);
}

}  // namespace sgshape
