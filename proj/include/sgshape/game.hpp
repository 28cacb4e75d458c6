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

#ifndef SGSHAPE_GAME_HPP_
#define SGSHAPE_GAME_HPP_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sgshape/common.hpp"
#include "sgshape/parallel.hpp"

namespace sgshape {

// Joint actions are enumerated row-major over players: player 0 is the most
// significant digit.
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> action_counts);

  int num_players() const { return static_cast<int>(counts_.size()); }
  int size() const { return size_; }
  int action_count(int player) const { return counts_[player]; }
  const std::vector<int>& action_counts() const { return counts_; }

  int action_of(int joint, int player) const {
    return (joint / strides_[player]) % counts_[player];
  }
  // Joint index obtained by replacing `player`'s action in `joint`.
  int with_action(int joint, int player, int action) const {
    return joint + (action - action_of(joint, player)) * strides_[player];
  }
  std::vector<int> decode(int joint) const;
  int encode(std::span<const int> actions) const;

  bool operator==(const JointActionSpace&) const = default;

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int size_ = 1;
};

// n-player normal-form game with a dense payoff table per player.
class MatrixGame {
 public:
  // payoffs[player][joint]. Throws DomainError on shape mismatch, or when
  // zero_sum is set and the two payoffs do not cancel.
  MatrixGame(std::vector<int> action_counts,
             std::vector<std::vector<double>> payoffs, bool zero_sum = false);

  // Two-player game from row-player and column-player matrices.
  static MatrixGame Bimatrix(const std::vector<std::vector<double>>& row,
                             const std::vector<std::vector<double>>& col);
  // Two-player zero-sum game; the column player's payoff is -row.
  static MatrixGame ZeroSum(const std::vector<std::vector<double>>& row);

  int num_players() const { return joint_.num_players(); }
  const JointActionSpace& joint() const { return joint_; }
  int num_actions(int player) const { return joint_.action_count(player); }
  bool zero_sum() const { return zero_sum_; }
  double payoff(int player, int joint) const {
    return payoffs_[player][joint];
  }
  const std::vector<double>& payoffs(int player) const {
    return payoffs_[player];
  }

 private:
  JointActionSpace joint_;
  std::vector<std::vector<double>> payoffs_;
  bool zero_sum_ = false;
};

struct Outcome {
  StateId next = 0;
  double probability = 0.0;

  bool operator==(const Outcome&) const = default;
};

// Finite discounted n-player stochastic game. Rows are indexed by
// (state, joint action) and hold a sorted sparse list of outcomes; every
// outcome carries one reward per player. Immutable once built.
class StochasticGame {
 public:
  int num_players() const { return joint_.num_players(); }
  int num_states() const { return static_cast<int>(state_names_.size()); }
  int num_joint_actions() const { return joint_.size(); }
  int num_actions(int player) const { return joint_.action_count(player); }
  const JointActionSpace& joint_actions() const { return joint_; }
  double gamma() const { return gamma_; }
  bool is_terminal(StateId s) const { return terminal_[s]; }
  const std::vector<bool>& terminals() const { return terminal_; }
  int num_terminals() const;

  const std::string& state_name(StateId s) const { return state_names_[s]; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::string& action_name(int player, int action) const {
    return action_names_[player][action];
  }
  const std::vector<std::vector<std::string>>& action_names() const {
    return action_names_;
  }
  // Index lookups by name; -1 when absent.
  StateId find_state(const std::string& name) const;
  int find_action(int player, const std::string& name) const;
  std::string joint_action_label(int joint) const;

  std::span<const Outcome> outcomes(StateId s, int joint) const {
    const int row = s * joint_.size() + joint;
    return {outcomes_.data() + row_begin_[row],
            static_cast<size_t>(row_begin_[row + 1] - row_begin_[row])};
  }
  // Reward of `player` on the k-th outcome of row (s, joint).
  double outcome_reward(int player, StateId s, int joint, int k) const {
    const int row = s * joint_.size() + joint;
    return rewards_[(row_begin_[row] + k) * num_players() + player];
  }

  // Dense-style lookups; zero for absent entries.
  double transition(StateId s, int joint, StateId next) const;
  double reward(int player, StateId s, int joint, StateId next) const;
  // Sum over next states of T * R.
  double expected_reward(int player, StateId s, int joint) const;

  // Copy with every stored reward replaced by fn(player, s, joint, next, r).
  StochasticGame map_rewards(
      const std::function<double(int, StateId, int, StateId, double)>& fn)
      const;
  StochasticGame with_gamma(double gamma) const;

  // Exact structural equality (names, gamma, terminals, outcomes, rewards).
  bool operator==(const StochasticGame& other) const = default;

 private:
  friend class GameBuilder;

  JointActionSpace joint_;
  std::vector<std::string> state_names_;
  std::vector<std::vector<std::string>> action_names_;
  double gamma_ = 0.0;
  std::vector<bool> terminal_;
  std::vector<int> row_begin_;
  std::vector<Outcome> outcomes_;
  std::vector<double> rewards_;
};

// Accumulates entries for a StochasticGame. Entries that are never set are
// probability 0 / reward 0. A reward set on a zero-probability next state is
// kept as an explicit zero-probability outcome.
class GameBuilder {
 public:
  GameBuilder(std::vector<std::string> state_names,
              std::vector<std::vector<std::string>> action_names,
              double gamma);
  // Anonymous names s0.., a0..
  GameBuilder(int num_states, std::vector<int> action_counts, double gamma);

  const JointActionSpace& joint_actions() const { return joint_; }
  int num_states() const { return static_cast<int>(state_names_.size()); }

  GameBuilder& set_terminal(StateId s, bool terminal = true);
  GameBuilder& set_transition(StateId s, int joint, StateId next, double p);
  GameBuilder& add_transition(StateId s, int joint, StateId next, double p);
  GameBuilder& set_reward(int player, StateId s, int joint, StateId next,
                          double value);
  // T(s_T, a, s_T) = 1 for every terminal s_T and joint action a.
  GameBuilder& make_terminals_absorbing();

  StochasticGame build() const;

 private:
  struct Entry {
    double probability = 0.0;
    std::vector<double> rewards;
  };
  Entry& entry(StateId s, int joint, StateId next);

  JointActionSpace joint_;
  std::vector<std::string> state_names_;
  std::vector<std::vector<std::string>> action_names_;
  double gamma_;
  std::vector<bool> terminal_;
  std::vector<std::map<StateId, Entry>> rows_;
};

// Stationary stochastic policy of one player: a distribution over its actions
// in every state.
class Policy {
 public:
  Policy() = default;
  Policy(int num_states, int num_actions);  // all mass on action 0
  static Policy Uniform(int num_states, int num_actions);
  static Policy Deterministic(std::span<const int> actions, int num_actions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double prob(StateId s, int action) const {
    return probs_[s * num_actions_ + action];
  }
  std::span<const double> at(StateId s) const {
    return {probs_.data() + s * num_actions_,
            static_cast<size_t>(num_actions_)};
  }
  void set(StateId s, std::span<const double> dist);
  void set_pure(StateId s, int action);

  // Nonnegative and summing to 1 within tol in every state.
  bool is_valid(double tol = kStructuralTolerance) const;

  bool operator==(const Policy&) const = default;

 private:
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> probs_;
};

using PolicyProfile = std::vector<Policy>;

// Throws DomainError when the profile does not fit the game.
void check_profile(const StochasticGame& game, const PolicyProfile& profile);

// Probability of every joint action at state s under the profile. When
// `skip_player` is set, that player's factor is omitted (its action is still
// part of the index, with weight 1).
std::vector<double> joint_distribution(const JointActionSpace& joint,
                                       const PolicyProfile& profile, StateId s,
                                       int skip_player = -1);

// Per-player state potentials Phi_i(s).
struct PotentialSet {
  std::vector<std::vector<double>> values;  // [player][state]

  static PotentialSet Zero(int num_players, int num_states);
  int num_players() const { return static_cast<int>(values.size()); }
  double at(int player, StateId s) const { return values[player][s]; }
};

// Throws DomainError when dimensions mismatch or a terminal has a nonzero
// potential.
void check_potential(const StochasticGame& game, const PotentialSet& phi);

using ValueTable = std::vector<std::vector<double>>;  // [player][state]

struct QTable {
  int num_joint = 0;
  std::vector<std::vector<double>> values;  // [player][state * num_joint + j]

  double at(int player, StateId s, int joint) const {
    return values[player][s * num_joint + joint];
  }
};

struct Violation {
  std::string rule;
  StateId state = -1;
  int joint = -1;
  std::string message;
};

// Structural checks: stochastic rows, absorbing zero-reward terminals,
// gamma range, properness when gamma == 1.
std::vector<Violation> validate_game(const StochasticGame& game,
                                     double tol = kStructuralTolerance);

// True when some stationary joint behaviour can avoid every terminal forever.
bool has_improper_policy(const StochasticGame& game);

// Values of a fixed profile for every player. Solves the linear system
// directly for small games, otherwise iterates until the sup-norm change is
// at most tol * (1 - gamma) / (2 gamma).
ValueTable evaluate_profile(const StochasticGame& game,
                            const PolicyProfile& profile,
                            double tol = kValueTolerance,
                            Execution exec = Execution::kSerial);

// Single-player game faced by `player` when the others play `others`
// (one policy per other player, in player order).
StochasticGame induced_mdp(const StochasticGame& game, int player,
                           std::span<const Policy> others);

// Convenience: others taken from a full profile, ignoring profile[player].
StochasticGame induced_mdp_from_profile(const StochasticGame& game, int player,
                                        const PolicyProfile& profile);

}  // namespace sgshape

#endif  // SGSHAPE_GAME_HPP_
