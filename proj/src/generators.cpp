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

#include "sgshape/generators.hpp"

namespace sgshape {

MatrixGame prisoners_dilemma() {
  return MatrixGame::Bimatrix({{3, 0}, {5, 1}}, {{3, 5}, {0, 1}});
}

MatrixGame matching_pennies() { return MatrixGame::ZeroSum({{1, -1}, {-1, 1}}); }

MatrixGame battle_of_the_sexes() {
  return MatrixGame::Bimatrix({{2, 0}, {0, 1}}, {{1, 0}, {0, 2}});
}

StochasticGame repeated_game(const MatrixGame& matrix, double gamma,
                             const std::vector<std::vector<std::string>>& action_names) {
  std::vector<std::vector<std::string>> names = action_names;
  if (names.empty()) {
    for (int p = 0; p < matrix.num_players(); ++p) {
      std::vector<std::string> row;
      for (int a = 0; a < matrix.num_actions(p); ++a) {
        row.push_back("a" + std::to_string(a));
      }
      names.push_back(std::move(row));
    }
  }
  GameBuilder builder({"s", "end"}, names, gamma);
  builder.set_terminal(1);
  for (int j = 0; j < matrix.joint().size(); ++j) {
    builder.set_transition(0, j, 0, 1.0);
    for (int p = 0; p < matrix.num_players(); ++p) {
      builder.set_reward(p, 0, j, 0, matrix.payoff(p, j));
    }
  }
  builder.make_terminals_absorbing();
  return builder.build();
}

StochasticGame chain_game(double gamma) {
  GameBuilder builder({"s0", "s1", "sT"}, {{"go"}}, gamma);
  builder.set_terminal(2);
  builder.set_transition(0, 0, 1, 1.0);
  builder.set_transition(1, 0, 2, 1.0);
  builder.set_reward(0, 1, 0, 2, 1.0);
  builder.make_terminals_absorbing();
  return builder.build();
}

StochasticGame random_game(Rng& rng, const RandomGameOptions& options) {
  std::uniform_int_distribution<int> state_count(options.min_states,
                                                 options.max_states);
  std::uniform_int_distribution<int> action_count(options.min_actions,
                                                  options.max_actions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);

  const int n_states = state_count(rng);
  const int n_players = options.zero_sum ? 2 : options.num_players;
  std::vector<int> counts;
  for (int p = 0; p < n_players; ++p) counts.push_back(action_count(rng));
  GameBuilder builder(n_states, counts, options.gamma);
  const StateId terminal = n_states - 1;
  builder.set_terminal(terminal);
  for (StateId s = 0; s < terminal; ++s) {
    for (int j = 0; j < builder.joint_actions().size(); ++j) {
      std::vector<double> weight(n_states, 0.0);
      double total = 0.0;
      for (StateId t = 0; t < n_states; ++t) {
        if (unit(rng) < 0.6) {
          weight[t] = 0.05 + unit(rng);
          total += weight[t];
        }
      }
      if (total == 0.0) {
        weight[std::uniform_int_distribution<int>(0, n_states - 1)(rng)] = 1.0;
        total = 1.0;
      }
      for (StateId t = 0; t < n_states; ++t) {
        if (weight[t] == 0.0) continue;
        builder.set_transition(s, j, t, weight[t] / total);
        const double r = reward(rng);
        builder.set_reward(0, s, j, t, r);
        for (int p = 1; p < n_players; ++p) {
          builder.set_reward(p, s, j, t, options.zero_sum ? -r : reward(rng));
        }
      }
    }
  }
  builder.make_terminals_absorbing();
  return builder.build();
}

PotentialSet random_potential(Rng& rng, const StochasticGame& game,
                              double scale) {
  std::uniform_real_distribution<double> value(-scale, scale);
  PotentialSet phi = PotentialSet::Zero(game.num_players(), game.num_states());
  for (int p = 0; p < game.num_players(); ++p) {
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (!game.is_terminal(s)) phi.values[p][s] = value(rng);
    }
  }
  return phi;
}

PolicyProfile random_profile(Rng& rng, const StochasticGame& game,
                             double pure_prob) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PolicyProfile profile;
  for (int p = 0; p < game.num_players(); ++p) {
    const int n_actions = game.num_actions(p);
    Policy pi(game.num_states(), n_actions);
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (unit(rng) < pure_prob) {
        pi.set_pure(s, std::uniform_int_distribution<int>(0, n_actions - 1)(rng));
        continue;
      }
      std::vector<double> dist(n_actions);
      double total = 0.0;
      for (double& x : dist) {
        x = 0.01 + unit(rng);
        total += x;
      }
      for (double& x : dist) x /= total;
      pi.set(s, dist);
    }
    profile.push_back(std::move(pi));
  }
  return profile;
}

}  // namespace sgshape
