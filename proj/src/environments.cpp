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

#include <array>
#include <numeric>

#include "sgshape/learn.hpp"

namespace sgshape {

namespace {

// Index of the outcome drawn from a row, by inversion.
int sample_outcome(std::span<const Outcome> row, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last = -1;
  for (size_t k = 0; k < row.size(); ++k) {
    if (row[k].probability <= 0.0) continue;
    acc += row[k].probability;
    last = static_cast<int>(k);
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

TableEnvironment::TableEnvironment(std::shared_ptr<const StochasticGame> game,
                                   std::vector<double> start_distribution)
    : game_(std::move(game)), start_(std::move(start_distribution)) {
  if (static_cast<int>(start_.size()) != game_->num_states()) {
    throw DomainError("start distribution must cover every state");
  }
}

StateId TableEnvironment::reset(Rng& rng) {
  std::discrete_distribution<int> pick(start_.begin(), start_.end());
  state_ = pick(rng);
  return state_;
}

StepResult TableEnvironment::step(int joint, Rng& rng) {
  const auto row = game_->outcomes(state_, joint);
  const int k = sample_outcome(row, rng);
  StepResult result;
  result.rewards.resize(game_->num_players());
  for (int p = 0; p < game_->num_players(); ++p) {
    result.rewards[p] = game_->outcome_reward(p, state_, joint, k);
  }
  result.next = row[k].next;
  result.done = game_->is_terminal(result.next);
  state_ = result.next;
  return result;
}

std::unique_ptr<Environment> TableEnvironment::clone() const {
  return std::make_unique<TableEnvironment>(*this);
}

ShapedEnvironment::ShapedEnvironment(std::unique_ptr<Environment> inner,
                                     ShapingFunction shaping)
    : inner_(std::move(inner)), shaping_(std::move(shaping)) {
  const auto& game = inner_->model();
  if (shaping_.num_players() != game.num_players() ||
      shaping_.num_states != game.num_states()) {
    throw DomainError("shaping function dimensions do not match the environment");
  }
}

StepResult ShapedEnvironment::step(int joint, Rng& rng) {
  const StateId s = inner_->state();
  StepResult result = inner_->step(joint, rng);
  for (size_t p = 0; p < result.rewards.size(); ++p) {
    result.rewards[p] += shaping_.at(static_cast<int>(p), s, result.next);
  }
  return result;
}

std::unique_ptr<Environment> ShapedEnvironment::clone() const {
  return std::make_unique<ShapedEnvironment>(inner_->clone(), shaping_);
}

namespace {

class RepeatedMatrixEnvironment : public Environment {
 public:
  explicit RepeatedMatrixEnvironment(std::shared_ptr<const StochasticGame> game)
      : game_(std::move(game)) {}

  const StochasticGame& model() const override { return *game_; }
  StateId reset(Rng&) override { return 0; }
  StateId state() const override { return 0; }
  StepResult step(int joint, Rng& rng) override {
    StepResult result;
    for (int p = 0; p < game_->num_players(); ++p) {
      result.rewards.push_back(game_->reward(p, 0, joint, 0));
    }
    result.next = 0;
    result.done =
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= game_->gamma();
    return result;
  }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<RepeatedMatrixEnvironment>(*this);
  }

 private:
  std::shared_ptr<const StochasticGame> game_;
};

}  // namespace

std::unique_ptr<Environment> repeated_matrix_env(
    const MatrixGame& game, double gamma,
    const std::vector<std::vector<std::string>>& action_names) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("repeated game needs 0 < gamma < 1");
  }
  return std::make_unique<RepeatedMatrixEnvironment>(
      std::make_shared<const StochasticGame>(repeated_game(game, gamma, action_names)));
}

namespace soccer {

namespace {

constexpr int kDr[kNumActions] = {-1, 1, 0, 0, 0};
constexpr int kDc[kNumActions] = {0, 0, 1, -1, 0};
constexpr const char* kActionNames[kNumActions] = {"N", "S", "E", "W", "stand"};

bool in_goal_rows(int row) { return row == 1 || row == 2; }

struct StateIndex {
  std::array<StateId, 2 * kCells * kCells> id;
  StateIndex() {
    id.fill(-1);
    StateId next = 0;
    for (int ball = 0; ball < 2; ++ball) {
      for (int c0 = 0; c0 < kCells; ++c0) {
        for (int c1 = 0; c1 < kCells; ++c1) {
          if (c0 != c1) id[(ball * kCells + c0) * kCells + c1] = next++;
        }
      }
    }
  }
};

const StateIndex& index() {
  static const StateIndex table;
  return table;
}

}  // namespace

StateId state_of(const Position& pos) {
  return index().id[(pos.ball * kCells + pos.cell[0]) * kCells + pos.cell[1]];
}

Position position_of(StateId s) {
  if (s < 0 || s >= kNumPlayStates) throw DomainError("not a soccer play state");
  const int per_ball = kCells * (kCells - 1);
  Position pos;
  pos.ball = s / per_ball;
  const int rest = s % per_ball;
  pos.cell[0] = rest / (kCells - 1);
  const int k = rest % (kCells - 1);
  pos.cell[1] = k < pos.cell[0] ? k : k + 1;
  return pos;
}

std::string state_name(const Position& pos) {
  std::string name;
  for (int p = 0; p < 2; ++p) {
    name += "r" + std::to_string(pos.cell[p] / kCols) + "c" +
            std::to_string(pos.cell[p] % kCols) + "-";
  }
  return name + "b" + std::to_string(pos.ball);
}

StateId resolve(const Position& start, int action0, int action1, int first) {
  Position pos = start;
  const int actions[2] = {action0, action1};
  for (int k = 0; k < 2; ++k) {
    const int p = k == 0 ? first : 1 - first;
    const int a = actions[p];
    if (a == kStand) continue;
    const int row = pos.cell[p] / kCols + kDr[a];
    const int col = pos.cell[p] % kCols + kDc[a];
    if (row < 0 || row >= kRows || col < 0 || col >= kCols) {
      if (pos.ball == p && in_goal_rows(row)) {
        if (col < 0) return kGoalState[0];
        if (col >= kCols) return kGoalState[1];
      }
      continue;
    }
    const int target = row * kCols + col;
    if (target == pos.cell[1 - p]) {
      pos.ball = 1 - p;
      continue;
    }
    pos.cell[p] = target;
  }
  return state_of(pos);
}

Position kickoff(int ball) {
  Position pos;
  pos.cell[0] = 2 * kCols + 3;
  pos.cell[1] = 1 * kCols + 1;
  pos.ball = ball;
  return pos;
}

namespace {

class SoccerEnvironment : public Environment {
 public:
  SoccerEnvironment(std::shared_ptr<const StochasticGame> game, Reset reset)
      : game_(std::move(game)), reset_(reset) {}

  const StochasticGame& model() const override { return *game_; }
  StateId state() const override { return state_; }

  StateId reset(Rng& rng) override {
    if (reset_ == Reset::kLittman) {
      state_ = state_of(kickoff(std::uniform_int_distribution<int>(0, 1)(rng)));
    } else {
      state_ = std::uniform_int_distribution<int>(0, kNumPlayStates - 1)(rng);
    }
    return state_;
  }

  StepResult step(int joint, Rng& rng) override {
    const int first = std::uniform_int_distribution<int>(0, 1)(rng);
    StepResult result;
    result.next = resolve(position_of(state_), joint / kNumActions,
                          joint % kNumActions, first);
    result.rewards.assign(2, 0.0);
    for (int p = 0; p < 2; ++p) {
      if (result.next == kGoalState[p]) {
        result.rewards[p] = 1.0;
        result.rewards[1 - p] = -1.0;
        result.done = true;
      }
    }
    state_ = result.next;
    return result;
  }

  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<SoccerEnvironment>(*this);
  }

 private:
  std::shared_ptr<const StochasticGame> game_;
  Reset reset_;
  StateId state_ = 0;
};

std::shared_ptr<const StochasticGame> build_soccer_game() {
  std::vector<std::string> names(kNumPlayStates + 2);
  for (StateId s = 0; s < kNumPlayStates; ++s) {
    names[s] = state_name(position_of(s));
  }
  names[kGoalState[0]] = "goal0";
  names[kGoalState[1]] = "goal1";
  const std::vector<std::string> actions(kActionNames, kActionNames + kNumActions);
  GameBuilder builder(names, {actions, actions}, kGamma);
  builder.set_terminal(kGoalState[0]).set_terminal(kGoalState[1]);
  for (StateId s = 0; s < kNumPlayStates; ++s) {
    const Position pos = position_of(s);
    for (int a0 = 0; a0 < kNumActions; ++a0) {
      for (int a1 = 0; a1 < kNumActions; ++a1) {
        const int joint = a0 * kNumActions + a1;
        for (int first = 0; first < 2; ++first) {
          const StateId next = resolve(pos, a0, a1, first);
          builder.add_transition(s, joint, next, 0.5);
          for (int p = 0; p < 2; ++p) {
            if (next == kGoalState[p]) {
              builder.set_reward(p, s, joint, next, 1.0);
              builder.set_reward(1 - p, s, joint, next, -1.0);
            }
          }
        }
      }
    }
  }
  builder.make_terminals_absorbing();
  return std::make_shared<const StochasticGame>(builder.build());
}

}  // namespace

}  // namespace soccer

GridSoccer grid_soccer(soccer::Reset reset) {
  static const std::shared_ptr<const StochasticGame> game = soccer::build_soccer_game();
  GridSoccer out;
  out.game = game;
  out.env = std::make_unique<soccer::SoccerEnvironment>(game, reset);
  return out;
}

}  // namespace sgshape
