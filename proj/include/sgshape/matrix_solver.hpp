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

#ifndef SGSHAPE_MATRIX_SOLVER_HPP_
#define SGSHAPE_MATRIX_SOLVER_HPP_

#include <vector>

#include "sgshape/common.hpp"
#include "sgshape/game.hpp"

namespace sgshape {

using StrategyProfile = std::vector<std::vector<double>>;  // [player][action]

struct MatrixEquilibrium {
  StrategyProfile strategies;
  std::vector<double> values;   // expected payoff per player
  std::vector<double> regrets;  // best-response gap per player
};

// Expected payoff of `player` when everyone mixes independently.
double expected_payoff(const MatrixGame& game, const StrategyProfile& profile,
                       int player);

// Best unilateral deviation payoff minus the profile payoff (>= 0). Pure
// deviations suffice by linearity. Throws DomainError on an invalid profile.
double best_response_regret(const MatrixGame& game,
                            const StrategyProfile& profile, int player);

// Maximin/minimax strategies and the value of a two-player zero-sum game.
// Throws DomainError unless the game carries (or satisfies) the zero-sum
// property.
MatrixEquilibrium solve_zero_sum(const MatrixGame& game,
                                 double tol = kRegretTolerance);

// All vertex equilibria of a two-player game found by support enumeration,
// deduplicated (sup-norm > 1e-6) and sorted lexicographically by player 1's
// strategy. Singular indifference systems are skipped, so degenerate games
// may be missing points of an equilibrium component.
std::vector<MatrixEquilibrium> support_enumeration(
    const MatrixGame& game, double tol = kRegretTolerance);

// Every pure joint action (as a joint index) from which no player gains by a
// unilateral pure deviation. Any player count.
std::vector<int> pure_equilibria(const MatrixGame& game,
                                 double tol = kStructuralTolerance);

}  // namespace sgshape

#endif  // SGSHAPE_MATRIX_SOLVER_HPP_
