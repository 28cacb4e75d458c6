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

#include "sgshape/matrix_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "sgshape/simplex.hpp"

namespace sgshape {
namespace {

void check_strategies(const MatrixGame& game, const StrategyProfile& profile) {
  if (static_cast<int>(profile.size()) != game.num_players()) {
    throw DomainError("strategy profile has wrong player count");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    if (static_cast<int>(profile[p].size()) != game.num_actions(p)) {
      throw DomainError("strategy of player " + std::to_string(p) +
                        " has wrong action count");
    }
    double total = 0.0;
    for (double x : profile[p]) {
      if (!(x >= -kStructuralTolerance)) {
        throw DomainError("strategy has a negative probability");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > kStructuralTolerance) {
      throw DomainError("strategy does not sum to 1");
    }
  }
}

// Payoff to `player` of each of its pure actions against the others' mix.
std::vector<double> deviation_payoffs(const MatrixGame& game,
                                      const StrategyProfile& profile,
                                      int player) {
  const auto& joint = game.joint();
  std::vector<double> dev(game.num_actions(player), 0.0);
  for (int j = 0; j < joint.size(); ++j) {
    double w = 1.0;
    for (int q = 0; q < joint.num_players() && w != 0.0; ++q) {
      if (q != player) w *= profile[q][joint.action_of(j, q)];
    }
    if (w != 0.0) dev[joint.action_of(j, player)] += w * game.payoff(player, j);
  }
  return dev;
}

MatrixEquilibrium finish(const MatrixGame& game, StrategyProfile strategies) {
  MatrixEquilibrium eq;
  eq.strategies = std::move(strategies);
  for (int p = 0; p < game.num_players(); ++p) {
    eq.values.push_back(expected_payoff(game, eq.strategies, p));
    eq.regrets.push_back(best_response_regret(game, eq.strategies, p));
  }
  return eq;
}

bool is_zero_sum(const MatrixGame& game) {
  if (game.num_players() != 2) return false;
  if (game.zero_sum()) return true;
  for (int j = 0; j < game.joint().size(); ++j) {
    if (std::abs(game.payoff(0, j) + game.payoff(1, j)) > kStructuralTolerance) {
      return false;
    }
  }
  return true;
}

// Mix of the mixing player over its support that leaves the indifferent player
// indifferent across its own support. payoff(i, j) is the indifferent
// player's payoff for its action i against action j. False when singular.
template <typename Payoff>
bool solve_indifference(const std::vector<int>& indifferent_support,
                        const std::vector<int>& mixing_support, Payoff payoff,
                        std::vector<double>& mix) {
  const int k = static_cast<int>(mixing_support.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      a(r, c) = payoff(indifferent_support[r], mixing_support[c]);
    }
    a(r, k) = -1.0;
  }
  for (int c = 0; c < k; ++c) a(k, c) = 1.0;
  b(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd x = lu.solve(b);
  if ((a * x - b).cwiseAbs().maxCoeff() > 1e-9) return false;
  for (int c = 0; c < k; ++c) mix[mixing_support[c]] = x(c);
  return true;
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

double sup_distance(const StrategyProfile& a, const StrategyProfile& b) {
  double d = 0.0;
  for (size_t p = 0; p < a.size(); ++p) {
    for (size_t i = 0; i < a[p].size(); ++i) {
      d = std::max(d, std::abs(a[p][i] - b[p][i]));
    }
  }
  return d;
}

}  // namespace

double expected_payoff(const MatrixGame& game, const StrategyProfile& profile,
                       int player) {
  check_strategies(game, profile);
  const auto& joint = game.joint();
  double total = 0.0;
  for (int j = 0; j < joint.size(); ++j) {
    double w = 1.0;
    for (int q = 0; q < joint.num_players() && w != 0.0; ++q) {
      w *= profile[q][joint.action_of(j, q)];
    }
    total += w * game.payoff(player, j);
  }
  return total;
}

double best_response_regret(const MatrixGame& game,
                            const StrategyProfile& profile, int player) {
  check_strategies(game, profile);
  if (player < 0 || player >= game.num_players()) {
    throw DomainError("player index out of range");
  }
  const auto dev = deviation_payoffs(game, profile, player);
  double current = 0.0;
  for (size_t a = 0; a < dev.size(); ++a) current += profile[player][a] * dev[a];
  const double best = *std::max_element(dev.begin(), dev.end());
  return std::max(0.0, best - current);
}

MatrixEquilibrium solve_zero_sum(const MatrixGame& game, double tol) {
  if (!is_zero_sum(game)) {
    throw DomainError("solve_zero_sum requires a two-player zero-sum game");
  }
  const int rows = game.num_actions(0);
  const int cols = game.num_actions(1);
  const ZeroSumSolution lp = solve_matrix_zero_sum(game.payoffs(0), rows, cols);
  MatrixEquilibrium eq = finish(game, {lp.row_strategy, lp.col_strategy});
  // The LP value is the game value; expected payoff of the returned pair
  // agrees with it up to the LP's rounding.
  eq.values = {lp.value, -lp.value};
  for (double r : eq.regrets) {
    if (r > tol) {
      throw std::runtime_error("zero-sum LP produced a strategy with regret " +
                               std::to_string(r));
    }
  }
  return eq;
}

std::vector<MatrixEquilibrium> support_enumeration(const MatrixGame& game,
                                                   double tol) {
  if (game.num_players() != 2) {
    throw DomainError("support enumeration requires exactly 2 players");
  }
  const int m = game.num_actions(0);
  const int n = game.num_actions(1);
  auto row_payoff = [&](int i, int j) { return game.payoff(0, i * n + j); };
  auto col_payoff = [&](int j, int i) { return game.payoff(1, i * n + j); };

  std::vector<MatrixEquilibrium> found;
  // Unequal support sizes leave one of the two indifference systems
  // underdetermined (a continuum, not a vertex), so only k x k pairs can
  // produce vertex solutions.
  for (int k = 1; k <= std::min(m, n); ++k) {
    for_each_subset(m, k, [&](const std::vector<int>& rows) {
      for_each_subset(n, k, [&](const std::vector<int>& cols) {
        std::vector<double> x(m, 0.0), y(n, 0.0);
        if (!solve_indifference(rows, cols, row_payoff, y)) return;
        if (!solve_indifference(cols, rows, col_payoff, x)) return;
        for (double v : x) {
          if (v < -tol) return;
        }
        for (double v : y) {
          if (v < -tol) return;
        }
        for (double& v : x) v = std::max(v, 0.0);
        for (double& v : y) v = std::max(v, 0.0);
        double sx = 0.0, sy = 0.0;
        for (double v : x) sx += v;
        for (double v : y) sy += v;
        for (double& v : x) v /= sx;
        for (double& v : y) v /= sy;
        MatrixEquilibrium eq = finish(game, {x, y});
        if (eq.regrets[0] > tol || eq.regrets[1] > tol) return;
        for (const auto& other : found) {
          if (sup_distance(other.strategies, eq.strategies) <= 1e-6) return;
        }
        found.push_back(std::move(eq));
      });
    });
  }
  std::sort(found.begin(), found.end(),
            [](const MatrixEquilibrium& a, const MatrixEquilibrium& b) {
              return a.strategies < b.strategies;
            });
  return found;
}

std::vector<int> pure_equilibria(const MatrixGame& game, double tol) {
  const auto& joint = game.joint();
  std::vector<int> result;
  for (int j = 0; j < joint.size(); ++j) {
    bool stable = true;
    for (int p = 0; p < joint.num_players() && stable; ++p) {
      const double current = game.payoff(p, j);
      for (int a = 0; a < joint.action_count(p); ++a) {
        if (game.payoff(p, joint.with_action(j, p, a)) > current + tol) {
          stable = false;
          break;
        }
      }
    }
    if (stable) result.push_back(j);
  }
  return result;
}

}  // namespace sgshape
