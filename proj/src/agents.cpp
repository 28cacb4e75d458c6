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

#include <algorithm>

#include "sgshape/learn.hpp"

namespace sgshape {

MinimaxQAgent::MinimaxQAgent(int player, const StochasticGame& game,
                             double alpha_scale)
    : player_(player),
      gamma_(game.gamma()),
      alpha_scale_(alpha_scale),
      terminal_(game.terminals()) {
  if (game.num_players() != 2 || player < 0 || player > 1) {
    throw DomainError("minimax-Q needs a two-player game");
  }
  if (!(alpha_scale > 0.0)) throw DomainError("alpha scale must be positive");
  own_ = game.num_actions(player);
  opp_ = game.num_actions(1 - player);
  const size_t n = game.num_states();
  q_.assign(n * own_ * opp_, 0.0);
  visits_.assign(q_.size(), 0);
  value_.assign(n, 0.0);
  strategy_.assign(n * own_, 0.0);
  dirty_.assign(n, 1);
}

double MinimaxQAgent::alpha(StateId s, int own, int opp) const {
  const size_t k = (static_cast<size_t>(s) * own_ + own) * opp_ + opp;
  return 1.0 / (1.0 + visits_[k] / alpha_scale_);
}

void MinimaxQAgent::update(StateId s, int own, int opp, double reward,
                           StateId next, bool next_terminal) {
  update_with(alpha(s, own, opp), s, own, opp, reward, next, next_terminal);
  ++visits_[(static_cast<size_t>(s) * own_ + own) * opp_ + opp];
}

void MinimaxQAgent::update_with(double alpha, StateId s, int own, int opp,
                                double reward, StateId next,
                                bool next_terminal) {
  const double target =
      reward + (next_terminal ? 0.0 : gamma_ * value(next));
  double& q = q_[(static_cast<size_t>(s) * own_ + own) * opp_ + opp];
  q = (1.0 - alpha) * q + alpha * target;
  dirty_[s] = 1;
}

void MinimaxQAgent::refresh(StateId s) {
  if (!dirty_[s]) return;
  dirty_[s] = 0;
  if (terminal_[s]) {
    value_[s] = 0.0;
    std::fill_n(strategy_.begin() + static_cast<size_t>(s) * own_, own_, 0.0);
    strategy_[static_cast<size_t>(s) * own_] = 1.0;
    return;
  }
  const std::span<const double> matrix(q_.data() + static_cast<size_t>(s) * own_ * opp_,
                                       static_cast<size_t>(own_) * opp_);
  const ZeroSumSolution& sol = lp_.solve(matrix, own_, opp_);
  value_[s] = sol.value;
  std::copy(sol.row_strategy.begin(), sol.row_strategy.end(),
            strategy_.begin() + static_cast<size_t>(s) * own_);
}

double MinimaxQAgent::value(StateId s) {
  refresh(s);
  return value_[s];
}

std::span<const double> MinimaxQAgent::strategy(StateId s) {
  refresh(s);
  return {strategy_.data() + static_cast<size_t>(s) * own_, static_cast<size_t>(own_)};
}

int MinimaxQAgent::act(StateId s, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    return std::uniform_int_distribution<int>(0, own_ - 1)(rng);
  }
  const auto pi = strategy(s);
  const double u = unit(rng);
  double acc = 0.0;
  for (int a = 0; a < own_; ++a) {
    acc += pi[a];
    if (u < acc) return a;
  }
  // Rounding left a sliver of mass; fall back to the last supported action.
  for (int a = own_ - 1; a >= 0; --a) {
    if (pi[a] > 0.0) return a;
  }
  return 0;
}

Policy MinimaxQAgent::announced_policy() {
  const int n = static_cast<int>(value_.size());
  Policy policy(n, own_);
  for (StateId s = 0; s < n; ++s) policy.set(s, strategy(s));
  return policy;
}

IndependentQAgent::IndependentQAgent(int player, const StochasticGame& game,
                                     double alpha_scale)
    : player_(player),
      gamma_(game.gamma()),
      alpha_scale_(alpha_scale),
      terminal_(game.terminals()) {
  if (player < 0 || player >= game.num_players()) {
    throw DomainError("player index out of range");
  }
  if (!(alpha_scale > 0.0)) throw DomainError("alpha scale must be positive");
  own_ = game.num_actions(player);
  q_.assign(static_cast<size_t>(game.num_states()) * own_, 0.0);
  visits_.assign(q_.size(), 0);
}

void IndependentQAgent::update(StateId s, int own, double reward, StateId next,
                               bool next_terminal) {
  const size_t k = static_cast<size_t>(s) * own_ + own;
  const double alpha = 1.0 / (1.0 + visits_[k] / alpha_scale_);
  const double target = reward + (next_terminal ? 0.0 : gamma_ * value(next));
  q_[k] = (1.0 - alpha) * q_[k] + alpha * target;
  ++visits_[k];
}

double IndependentQAgent::value(StateId s) const {
  if (terminal_[s]) return 0.0;
  return q(s, greedy(s));
}

int IndependentQAgent::greedy(StateId s) const {
  int best = 0;
  for (int a = 1; a < own_; ++a) {
    if (q(s, a) > q(s, best)) best = a;
  }
  return best;
}

int IndependentQAgent::act(StateId s, double epsilon, Rng& rng) const {
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
    return std::uniform_int_distribution<int>(0, own_ - 1)(rng);
  }
  return greedy(s);
}

Policy IndependentQAgent::announced_policy() const {
  const int n = static_cast<int>(terminal_.size());
  Policy policy(n, own_);
  for (StateId s = 0; s < n; ++s) policy.set_pure(s, greedy(s));
  return policy;
}

}  // namespace sgshape
