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

#ifndef SGSHAPE_SIMPLEX_HPP_
#define SGSHAPE_SIMPLEX_HPP_

#include <span>
#include <vector>

namespace sgshape {

struct ZeroSumSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // maximin, row player maximizes
  std::vector<double> col_strategy;  // minimax, from the dual
};

// Solves the zero-sum matrix game whose row player receives
// payoff[r * cols + c]. Dense tableau simplex with Bland's rule on the
// normalized form
//   max sum(y)  s.t.  (A - min(A) + 1) y <= 1,  y >= 0,
// so ties resolve to the lowest action index.
ZeroSumSolution solve_matrix_zero_sum(std::span<const double> payoff, int rows,
                                      int cols);

// Reusable tableau storage for hot loops (minimax-Q, Shapley sweeps). Not
// thread-safe; keep one per thread.
class ZeroSumLpWorkspace {
 public:
  const ZeroSumSolution& solve(std::span<const double> payoff, int rows,
                               int cols);

 private:
  bool solve_saddle(std::span<const double> payoff, int rows, int cols);

  std::vector<double> tableau_;
  std::vector<int> basis_;
  ZeroSumSolution solution_;
};

}  // namespace sgshape

#endif  // SGSHAPE_SIMPLEX_HPP_
