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

#ifndef SGSHAPE_GENERATORS_HPP_
#define SGSHAPE_GENERATORS_HPP_

#include <random>

#include "sgshape/game.hpp"

namespace sgshape {

using Rng = std::mt19937_64;

// Classic 2x2 games. Actions of the dilemma are (C, D).
MatrixGame prisoners_dilemma();
MatrixGame matching_pennies();
MatrixGame battle_of_the_sexes();

// One non-terminal state "s" that loops to itself with the matrix game as
// its expected reward, plus an absorbing terminal "end".
StochasticGame repeated_game(const MatrixGame& matrix, double gamma,
                             const std::vector<std::vector<std::string>>& action_names = {});

// s0 -(r=0)-> s1 -(r=1)-> sT with one action, one player.
StochasticGame chain_game(double gamma = 0.9);

struct RandomGameOptions {
  int min_states = 2;  // including one terminal
  int max_states = 4;
  int min_actions = 2;
  int max_actions = 3;
  int num_players = 2;
  bool zero_sum = true;
  double gamma = 0.9;
};

// Random game whose last state is an absorbing terminal. Rows put mass on a
// random nonempty subset of states; rewards are uniform in [-1, 1] (player 2
// receives the negation when zero_sum).
StochasticGame random_game(Rng& rng, const RandomGameOptions& options = {});

// Uniform in [-scale, scale] on non-terminal states, 0 at terminals.
PotentialSet random_potential(Rng& rng, const StochasticGame& game,
                              double scale = 2.0);

// Random stationary profile; each state is pure with probability pure_prob.
PolicyProfile random_profile(Rng& rng, const StochasticGame& game,
                             double pure_prob = 0.2);

}  // namespace sgshape

#endif  // SGSHAPE_GENERATORS_HPP_
