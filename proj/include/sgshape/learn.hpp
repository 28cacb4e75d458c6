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

#ifndef SGSHAPE_LEARN_HPP_
#define SGSHAPE_LEARN_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgshape/game.hpp"
#include "sgshape/generators.hpp"
#include "sgshape/parallel.hpp"
#include "sgshape/shaping.hpp"
#include "sgshape/simplex.hpp"

namespace sgshape {

struct StepResult {
  StateId next = 0;
  std::vector<double> rewards;  // per player
  // Episode over. When `next` is not terminal the episode was truncated and
  // learners should still bootstrap from it.
  bool done = false;
};

// Sampled dynamics of a StochasticGame. All randomness comes from the Rng
// passed in; environments hold only the current state.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const StochasticGame& model() const = 0;
  virtual StateId reset(Rng& rng) = 0;
  virtual StepResult step(int joint, Rng& rng) = 0;
  virtual StateId state() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// Samples outcomes straight from the game's transition table, starting from
// a fixed distribution over states.
class TableEnvironment : public Environment {
 public:
  TableEnvironment(std::shared_ptr<const StochasticGame> game,
                   std::vector<double> start_distribution);

  const StochasticGame& model() const override { return *game_; }
  StateId reset(Rng& rng) override;
  StepResult step(int joint, Rng& rng) override;
  StateId state() const override { return state_; }
  std::unique_ptr<Environment> clone() const override;

 private:
  std::shared_ptr<const StochasticGame> game_;
  std::vector<double> start_;
  StateId state_ = 0;
};

// Adds F_i(s, s') to every player's reward; dynamics untouched.
class ShapedEnvironment : public Environment {
 public:
  ShapedEnvironment(std::unique_ptr<Environment> inner, ShapingFunction shaping);

  const StochasticGame& model() const override { return inner_->model(); }
  StateId reset(Rng& rng) override { return inner_->reset(rng); }
  StepResult step(int joint, Rng& rng) override;
  StateId state() const override { return inner_->state(); }
  std::unique_ptr<Environment> clone() const override;

 private:
  std::unique_ptr<Environment> inner_;
  ShapingFunction shaping_;
};

// Repeated matrix game: one state "s" that loops to itself, episodes end with
// probability 1 - gamma after every step (truncation, not a terminal
// transition), so undiscounted returns estimate discounted values.
std::unique_ptr<Environment> repeated_matrix_env(
    const MatrixGame& game, double gamma,
    const std::vector<std::vector<std::string>>& action_names = {});

// Littman's soccer on a 4 x 5 board.
//
// Player 0 attacks the left goal, player 1 the right one; goals span the two
// middle rows just outside the board. Moves of the two players are executed
// in a uniformly random order. A move onto the other player's square does not
// happen and the ball goes to the player that stood still. Carrying the ball
// out through a goal mouth scores for the owner of that goal's attacker
// (own goals count for the opponent). Other moves off the board are ignored.
namespace soccer {

inline constexpr int kRows = 4;
inline constexpr int kCols = 5;
inline constexpr int kCells = kRows * kCols;
inline constexpr int kNumActions = 5;
inline constexpr int kNumPlayStates = kCells * (kCells - 1) * 2;
// Terminal states, indexed by the scoring player.
inline constexpr StateId kGoalState[2] = {kNumPlayStates, kNumPlayStates + 1};
inline constexpr double kGamma = 0.9;

enum Action { kNorth = 0, kSouth, kEast, kWest, kStand };

struct Position {
  int cell[2] = {0, 0};  // row * kCols + col
  int ball = 0;          // player in possession
};

StateId state_of(const Position& pos);
Position position_of(StateId s);  // s must be a play state
std::string state_name(const Position& pos);

// Deterministic resolution given which player moves first.
StateId resolve(const Position& pos, int action0, int action1, int first);

enum class Reset { kLittman, kUniform };

// Littman's kick-off: player 0 at row 2 col 3, player 1 at row 1 col 1,
// possession by coin flip.
Position kickoff(int ball);

}  // namespace soccer

struct GridSoccer {
  std::shared_ptr<const StochasticGame> game;
  std::unique_ptr<Environment> env;
};

GridSoccer grid_soccer(soccer::Reset reset = soccer::Reset::kLittman);

// Tabular minimax-Q for one player of a two-player game: Q over
// (own action, opponent action), V(s) the maximin value of Q(s).
class MinimaxQAgent {
 public:
  MinimaxQAgent(int player, const StochasticGame& game, double alpha_scale);

  int player() const { return player_; }
  // alpha = 1 / (1 + visits(s, a, o) / alpha_scale)
  double alpha(StateId s, int own, int opp) const;
  void update(StateId s, int own, int opp, double reward, StateId next,
              bool next_terminal);
  // Update with an explicit step size.
  void update_with(double alpha, StateId s, int own, int opp, double reward,
                   StateId next, bool next_terminal);

  double q(StateId s, int own, int opp) const {
    return q_[(static_cast<size_t>(s) * own_ + own) * opp_ + opp];
  }
  double value(StateId s);
  std::span<const double> strategy(StateId s);
  // With probability epsilon a uniform action, otherwise a draw from the
  // maximin strategy.
  int act(StateId s, double epsilon, Rng& rng);
  Policy announced_policy();

 private:
  void refresh(StateId s);

  int player_;
  int own_;
  int opp_;
  double gamma_;
  double alpha_scale_;
  std::vector<bool> terminal_;
  std::vector<double> q_;
  std::vector<int> visits_;
  std::vector<double> value_;
  std::vector<double> strategy_;
  std::vector<char> dirty_;
  ZeroSumLpWorkspace lp_;
};

// Independent tabular Q-learning over the player's own actions; the greedy
// policy breaks ties toward the lowest action index.
class IndependentQAgent {
 public:
  IndependentQAgent(int player, const StochasticGame& game, double alpha_scale);

  int player() const { return player_; }
  void update(StateId s, int own, double reward, StateId next,
              bool next_terminal);
  double q(StateId s, int own) const {
    return q_[static_cast<size_t>(s) * own_ + own];
  }
  double value(StateId s) const;
  int greedy(StateId s) const;
  int act(StateId s, double epsilon, Rng& rng) const;
  Policy announced_policy() const;

 private:
  int player_;
  int own_;
  double gamma_;
  double alpha_scale_;
  std::vector<bool> terminal_;
  std::vector<double> q_;
  std::vector<int> visits_;
};

enum class AgentKind { kMinimaxQ, kIndependentQ };
enum class PotentialSource { kSolver, kFile, kZero };

struct ExperimentConfig {
  std::string environment = "soccer";  // soccer | matching_pennies |
                                       // prisoners_dilemma |
                                       // battle_of_the_sexes
  double gamma = 0.9;                  // matrix environments only
  soccer::Reset soccer_reset = soccer::Reset::kLittman;
  AgentKind agent = AgentKind::kMinimaxQ;
  double alpha_scale = 1000.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // of the episode budget
  PotentialSource potential = PotentialSource::kSolver;
  std::optional<PotentialSet> potential_values;  // kFile
  int trials = 1;
  std::uint64_t seed_base = 1;
  int episodes = 1000;
  int max_steps = 100;  // per episode; longer episodes are truncated
  int eval_every = 100;
  double epsilon_learn = 0.1;
};

// Exploration rate for a 0-based episode index.
double exploration_rate(const ExperimentConfig& config, int episode);

struct LearningRecord {
  std::string arm;  // "shaped" | "unshaped"
  int trial = 0;
  int episode = 0;  // episodes completed
  int player = 0;
  double exploitability = 0.0;  // max regret over states, original game
  double value_error = 0.0;     // sup |V_learned + Phi - V_ref|
};

struct LearningCurve {
  std::string arm;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<LearningRecord> records;  // episode-major, then player
  int episodes_to_threshold = -1;       // first evaluation within epsilon_learn
  double final_exploitability = 0.0;    // max over players
  bool final_verified = false;
};

struct ArmSummary {
  std::string arm;
  std::vector<int> episodes_to_threshold;  // per trial, -1 when never reached
  double median_episodes = 0.0;            // +inf when most trials never reach
  double max_final_exploitability = 0.0;
  int verified_trials = 0;
};

struct ComparisonSummary {
  ArmSummary shaped;
  ArmSummary unshaped;
  double speedup = 0.0;  // unshaped median / shaped median
  // Every final policy of both arms verifies on the original game.
  bool invariance_ok = false;
  // Shaped trials verify whenever the unshaped trial with the same seed does.
  bool shaped_verifies_when_unshaped_does = false;
};

struct ComparisonResult {
  std::vector<LearningCurve> shaped;
  std::vector<LearningCurve> unshaped;
  ComparisonSummary summary;
  PotentialSet potential;
  ValueTable reference_values;
};

// Original game of the configured environment.
std::shared_ptr<const StochasticGame> experiment_game(const ExperimentConfig& config);
std::unique_ptr<Environment> experiment_environment(const ExperimentConfig& config);

// Throws DomainError on unsupported combinations (e.g. Phi = V* requested
// for a game the solvers cannot handle).
ComparisonResult run_comparison(const ExperimentConfig& config,
                                Execution exec = Execution::kSerial);

// Single trial of one arm; exposed for tests.
LearningCurve run_trial(const ExperimentConfig& config, const StochasticGame& game,
                        const Environment& base_env, const PotentialSet& phi,
                        const ValueTable& reference, bool shaped, int trial);

}  // namespace sgshape

#endif  // SGSHAPE_LEARN_HPP_
