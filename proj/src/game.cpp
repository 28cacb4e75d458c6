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

#include "sgshape/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace sgshape {

JointActionSpace::JointActionSpace(std::vector<int> action_counts)
    : counts_(std::move(action_counts)), strides_(counts_.size(), 1) {
  for (int c : counts_) {
    if (c <= 0) throw DomainError("every player needs at least one action");
  }
  for (int p = static_cast<int>(counts_.size()) - 2; p >= 0; --p) {
    strides_[p] = strides_[p + 1] * counts_[p + 1];
  }
  size_ = counts_.empty() ? 1 : strides_[0] * counts_[0];
}

std::vector<int> JointActionSpace::decode(int joint) const {
  std::vector<int> actions(counts_.size());
  for (int p = 0; p < num_players(); ++p) actions[p] = action_of(joint, p);
  return actions;
}

int JointActionSpace::encode(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != num_players()) {
    throw DomainError("joint action has wrong player count");
  }
  int joint = 0;
  for (int p = 0; p < num_players(); ++p) {
    if (actions[p] < 0 || actions[p] >= counts_[p]) {
      throw DomainError("action index out of range");
    }
    joint += actions[p] * strides_[p];
  }
  return joint;
}

// ---------------------------------------------------------------------------
// MatrixGame

MatrixGame::MatrixGame(std::vector<int> action_counts,
                       std::vector<std::vector<double>> payoffs, bool zero_sum)
    : joint_(std::move(action_counts)),
      payoffs_(std::move(payoffs)),
      zero_sum_(zero_sum) {
  if (joint_.num_players() == 0) throw DomainError("matrix game has no players");
  if (static_cast<int>(payoffs_.size()) != joint_.num_players()) {
    throw DomainError("payoff table count must equal player count");
  }
  for (const auto& table : payoffs_) {
    if (static_cast<int>(table.size()) != joint_.size()) {
      throw DomainError("payoff table must cover every joint action");
    }
  }
  if (zero_sum_) {
    if (joint_.num_players() != 2) {
      throw DomainError("zero-sum flag requires exactly 2 players");
    }
    for (int j = 0; j < joint_.size(); ++j) {
      if (std::abs(payoffs_[0][j] + payoffs_[1][j]) > kStructuralTolerance) {
        throw DomainError("zero-sum flag set but payoffs do not cancel");
      }
    }
  }
}

MatrixGame MatrixGame::Bimatrix(const std::vector<std::vector<double>>& row,
                                const std::vector<std::vector<double>>& col) {
  const int m = static_cast<int>(row.size());
  const int n = m > 0 ? static_cast<int>(row[0].size()) : 0;
  if (m == 0 || n == 0 || static_cast<int>(col.size()) != m) {
    throw DomainError("bimatrix shapes differ");
  }
  std::vector<std::vector<double>> payoffs(2, std::vector<double>(m * n));
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(row[i].size()) != n ||
        static_cast<int>(col[i].size()) != n) {
      throw DomainError("bimatrix rows are ragged");
    }
    for (int j = 0; j < n; ++j) {
      payoffs[0][i * n + j] = row[i][j];
      payoffs[1][i * n + j] = col[i][j];
    }
  }
  return MatrixGame({m, n}, std::move(payoffs));
}

MatrixGame MatrixGame::ZeroSum(const std::vector<std::vector<double>>& row) {
  std::vector<std::vector<double>> col = row;
  for (auto& r : col) {
    for (double& x : r) x = -x;
  }
  MatrixGame g = Bimatrix(row, col);
  g.zero_sum_ = true;
  return g;
}

// ---------------------------------------------------------------------------
// StochasticGame

int StochasticGame::num_terminals() const {
  return static_cast<int>(std::count(terminal_.begin(), terminal_.end(), true));
}

StateId StochasticGame::find_state(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  return it == state_names_.end() ? -1
                                  : static_cast<StateId>(it - state_names_.begin());
}

int StochasticGame::find_action(int player, const std::string& name) const {
  const auto& names = action_names_[player];
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

std::string StochasticGame::joint_action_label(int joint) const {
  std::string label = "(";
  for (int p = 0; p < num_players(); ++p) {
    if (p > 0) label += ",";
    label += action_names_[p][joint_.action_of(joint, p)];
  }
  return label + ")";
}

double StochasticGame::transition(StateId s, int joint, StateId next) const {
  for (const Outcome& o : outcomes(s, joint)) {
    if (o.next == next) return o.probability;
  }
  return 0.0;
}

double StochasticGame::reward(int player, StateId s, int joint,
                              StateId next) const {
  auto row = outcomes(s, joint);
  for (size_t k = 0; k < row.size(); ++k) {
    if (row[k].next == next) {
      return outcome_reward(player, s, joint, static_cast<int>(k));
    }
  }
  return 0.0;
}

double StochasticGame::expected_reward(int player, StateId s, int joint) const {
  auto row = outcomes(s, joint);
  double total = 0.0;
  for (size_t k = 0; k < row.size(); ++k) {
    total += row[k].probability *
             outcome_reward(player, s, joint, static_cast<int>(k));
  }
  return total;
}

StochasticGame StochasticGame::map_rewards(
    const std::function<double(int, StateId, int, StateId, double)>& fn) const {
  StochasticGame out = *this;
  const int n = num_players();
  for (StateId s = 0; s < num_states(); ++s) {
    for (int j = 0; j < num_joint_actions(); ++j) {
      const int row = s * num_joint_actions() + j;
      for (int k = row_begin_[row]; k < row_begin_[row + 1]; ++k) {
        for (int p = 0; p < n; ++p) {
          out.rewards_[k * n + p] = fn(p, s, j, outcomes_[k].next, rewards_[k * n + p]);
        }
      }
    }
  }
  return out;
}

StochasticGame StochasticGame::with_gamma(double gamma) const {
  StochasticGame out = *this;
  out.gamma_ = gamma;
  return out;
}

// ---------------------------------------------------------------------------
// GameBuilder

GameBuilder::GameBuilder(std::vector<std::string> state_names,
                         std::vector<std::vector<std::string>> action_names,
                         double gamma)
    : state_names_(std::move(state_names)),
      action_names_(std::move(action_names)),
      gamma_(gamma) {
  std::vector<int> counts;
  for (const auto& names : action_names_) {
    counts.push_back(static_cast<int>(names.size()));
  }
  if (counts.empty()) throw DomainError("game needs at least one player");
  if (state_names_.empty()) throw DomainError("game needs at least one state");
  joint_ = JointActionSpace(std::move(counts));
  terminal_.assign(state_names_.size(), false);
  rows_.resize(state_names_.size() * joint_.size());
}

namespace {

std::vector<std::string> numbered(const std::string& prefix, int count) {
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

std::vector<std::vector<std::string>> numbered_actions(
    const std::vector<int>& counts) {
  std::vector<std::vector<std::string>> names;
  for (int c : counts) names.push_back(numbered("a", c));
  return names;
}

}  // namespace

GameBuilder::GameBuilder(int num_states, std::vector<int> action_counts,
                         double gamma)
    : GameBuilder(numbered("s", num_states), numbered_actions(action_counts),
                  gamma) {}

GameBuilder::Entry& GameBuilder::entry(StateId s, int joint, StateId next) {
  if (s < 0 || s >= num_states() || next < 0 || next >= num_states()) {
    throw DomainError("state index out of range");
  }
  if (joint < 0 || joint >= joint_.size()) {
    throw DomainError("joint action index out of range");
  }
  Entry& e = rows_[s * joint_.size() + joint][next];
  if (e.rewards.empty()) e.rewards.assign(joint_.num_players(), 0.0);
  return e;
}

GameBuilder& GameBuilder::set_terminal(StateId s, bool terminal) {
  terminal_.at(s) = terminal;
  return *this;
}

GameBuilder& GameBuilder::set_transition(StateId s, int joint, StateId next,
                                         double p) {
  entry(s, joint, next).probability = p;
  return *this;
}

GameBuilder& GameBuilder::add_transition(StateId s, int joint, StateId next,
                                         double p) {
  entry(s, joint, next).probability += p;
  return *this;
}

GameBuilder& GameBuilder::set_reward(int player, StateId s, int joint,
                                     StateId next, double value) {
  if (player < 0 || player >= joint_.num_players()) {
    throw DomainError("player index out of range");
  }
  entry(s, joint, next).rewards[player] = value;
  return *this;
}

GameBuilder& GameBuilder::make_terminals_absorbing() {
  for (StateId s = 0; s < num_states(); ++s) {
    if (!terminal_[s]) continue;
    for (int j = 0; j < joint_.size(); ++j) {
      rows_[s * joint_.size() + j].clear();
      entry(s, j, s).probability = 1.0;
    }
  }
  return *this;
}

StochasticGame GameBuilder::build() const {
  StochasticGame g;
  g.joint_ = joint_;
  g.state_names_ = state_names_;
  g.action_names_ = action_names_;
  g.gamma_ = gamma_;
  g.terminal_ = terminal_;
  g.row_begin_.reserve(rows_.size() + 1);
  g.row_begin_.push_back(0);
  for (const auto& row : rows_) {
    for (const auto& [next, e] : row) {
      g.outcomes_.push_back({next, e.probability});
      g.rewards_.insert(g.rewards_.end(), e.rewards.begin(), e.rewards.end());
    }
    g.row_begin_.push_back(static_cast<int>(g.outcomes_.size()));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Policies and potentials

Policy::Policy(int num_states, int num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      probs_(static_cast<size_t>(num_states) * num_actions, 0.0) {
  if (num_actions <= 0) throw DomainError("policy needs at least one action");
  for (StateId s = 0; s < num_states; ++s) probs_[s * num_actions] = 1.0;
}

Policy Policy::Uniform(int num_states, int num_actions) {
  Policy p(num_states, num_actions);
  std::fill(p.probs_.begin(), p.probs_.end(), 1.0 / num_actions);
  return p;
}

Policy Policy::Deterministic(std::span<const int> actions, int num_actions) {
  Policy p(static_cast<int>(actions.size()), num_actions);
  for (StateId s = 0; s < p.num_states_; ++s) p.set_pure(s, actions[s]);
  return p;
}

void Policy::set(StateId s, std::span<const double> dist) {
  if (static_cast<int>(dist.size()) != num_actions_) {
    throw DomainError("distribution has wrong action count");
  }
  std::copy(dist.begin(), dist.end(), probs_.begin() + s * num_actions_);
}

void Policy::set_pure(StateId s, int action) {
  if (action < 0 || action >= num_actions_) {
    throw DomainError("action index out of range");
  }
  auto first = probs_.begin() + s * num_actions_;
  std::fill(first, first + num_actions_, 0.0);
  first[action] = 1.0;
}

bool Policy::is_valid(double tol) const {
  for (StateId s = 0; s < num_states_; ++s) {
    double total = 0.0;
    for (double x : at(s)) {
      if (!(x >= -tol)) return false;
      total += x;
    }
    if (std::abs(total - 1.0) > tol) return false;
  }
  return true;
}

void check_profile(const StochasticGame& game, const PolicyProfile& profile) {
  if (static_cast<int>(profile.size()) != game.num_players()) {
    throw DomainError("profile player count does not match the game");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    const Policy& pi = profile[p];
    if (pi.num_states() != game.num_states() ||
        pi.num_actions() != game.num_actions(p)) {
      throw DomainError("policy of player " + std::to_string(p) +
                        " has wrong dimensions");
    }
    if (!pi.is_valid()) {
      throw DomainError("policy of player " + std::to_string(p) +
                        " is not a distribution in every state");
    }
  }
}

std::vector<double> joint_distribution(const JointActionSpace& joint,
                                       const PolicyProfile& profile, StateId s,
                                       int skip_player) {
  std::vector<double> dist(joint.size());
  for (int j = 0; j < joint.size(); ++j) {
    double w = 1.0;
    for (int p = 0; p < joint.num_players() && w != 0.0; ++p) {
      if (p == skip_player) continue;
      w *= profile[p].prob(s, joint.action_of(j, p));
    }
    dist[j] = w;
  }
  return dist;
}

PotentialSet PotentialSet::Zero(int num_players, int num_states) {
  return {std::vector<std::vector<double>>(num_players,
                                           std::vector<double>(num_states))};
}

void check_potential(const StochasticGame& game, const PotentialSet& phi) {
  if (phi.num_players() != game.num_players()) {
    throw DomainError("potential player count does not match the game");
  }
  for (int p = 0; p < phi.num_players(); ++p) {
    if (static_cast<int>(phi.values[p].size()) != game.num_states()) {
      throw DomainError("potential state count does not match the game");
    }
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (game.is_terminal(s) && phi.values[p][s] != 0.0) {
        throw DomainError("potential of player " + std::to_string(p) +
                          " is nonzero at terminal " + game.state_name(s));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

bool has_improper_policy(const StochasticGame& game) {
  // Greatest set of non-terminal states in which every member has some joint
  // action whose support stays inside the set.
  const int n_states = game.num_states();
  std::vector<bool> trapped(n_states);
  for (StateId s = 0; s < n_states; ++s) trapped[s] = !game.is_terminal(s);
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s = 0; s < n_states; ++s) {
      if (!trapped[s]) continue;
      bool can_stay = false;
      for (int j = 0; j < game.num_joint_actions() && !can_stay; ++j) {
        bool inside = true;
        for (const Outcome& o : game.outcomes(s, j)) {
          if (o.probability > 0.0 && !trapped[o.next]) {
            inside = false;
            break;
          }
        }
        can_stay = inside;
      }
      if (!can_stay) {
        trapped[s] = false;
        changed = true;
      }
    }
  }
  return std::find(trapped.begin(), trapped.end(), true) != trapped.end();
}

std::vector<Violation> validate_game(const StochasticGame& game, double tol) {
  std::vector<Violation> report;
  auto where = [&](StateId s, int j) {
    return "state " + game.state_name(s) + ", joint action " +
           game.joint_action_label(j);
  };
  if (!(game.gamma() >= 0.0 && game.gamma() <= 1.0)) {
    report.push_back({"gamma-range", -1, -1, "gamma must lie in [0, 1]"});
  }
  for (StateId s = 0; s < game.num_states(); ++s) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      double total = 0.0;
      bool negative = false;
      for (const Outcome& o : game.outcomes(s, j)) {
        total += o.probability;
        negative = negative || o.probability < 0.0;
      }
      if (negative) {
        report.push_back({"negative-probability", s, j,
                          where(s, j) + ": negative transition probability"});
      }
      if (std::abs(total - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where(s, j) << ": transition row sums to " << total;
        report.push_back({"row-sum", s, j, msg.str()});
      }
      if (!game.is_terminal(s)) continue;
      if (std::abs(game.transition(s, j, s) - 1.0) > tol) {
        report.push_back({"terminal-absorbing", s, j,
                          where(s, j) + ": terminal state must self-loop"});
      }
      auto row = game.outcomes(s, j);
      bool rewarded = false;
      for (size_t k = 0; k < row.size(); ++k) {
        for (int p = 0; p < game.num_players(); ++p) {
          rewarded = rewarded ||
                     game.outcome_reward(p, s, j, static_cast<int>(k)) != 0.0;
        }
      }
      if (rewarded) {
        report.push_back({"terminal-reward", s, j,
                          where(s, j) + ": reward leaving a terminal must be 0"});
      }
    }
  }
  if (game.gamma() >= 1.0 && has_improper_policy(game)) {
    report.push_back({"gamma-proper", -1, -1,
                      "gamma = 1 requires every state to reach a terminal "
                      "with probability 1"});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Policy evaluation

namespace {

// Markov chain and expected rewards under a fixed profile, restricted to
// non-terminal rows.
struct ProfileChain {
  std::vector<std::vector<std::pair<StateId, double>>> rows;  // per state
  std::vector<std::vector<double>> reward;  // [player][state]
};

ProfileChain build_chain(const StochasticGame& game,
                         const PolicyProfile& profile) {
  const int n_states = game.num_states();
  const int n_players = game.num_players();
  ProfileChain chain;
  chain.rows.resize(n_states);
  chain.reward.assign(n_players, std::vector<double>(n_states, 0.0));
  std::vector<double> dense(n_states);
  for (StateId s = 0; s < n_states; ++s) {
    if (game.is_terminal(s)) continue;
    std::fill(dense.begin(), dense.end(), 0.0);
    const auto dist = joint_distribution(game.joint_actions(), profile, s);
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      if (dist[j] == 0.0) continue;
      auto row = game.outcomes(s, j);
      for (size_t k = 0; k < row.size(); ++k) {
        const double w = dist[j] * row[k].probability;
        dense[row[k].next] += w;
        for (int p = 0; p < n_players; ++p) {
          chain.reward[p][s] +=
              w * game.outcome_reward(p, s, j, static_cast<int>(k));
        }
      }
    }
    for (StateId t = 0; t < n_states; ++t) {
      if (dense[t] != 0.0) chain.rows[s].emplace_back(t, dense[t]);
    }
  }
  return chain;
}

ValueTable solve_direct(const StochasticGame& game, const ProfileChain& chain) {
  const int n_states = game.num_states();
  std::vector<int> index(n_states, -1);
  int m = 0;
  for (StateId s = 0; s < n_states; ++s) {
    if (!game.is_terminal(s)) index[s] = m++;
  }
  ValueTable values(game.num_players(), std::vector<double>(n_states, 0.0));
  if (m == 0) return values;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  for (StateId s = 0; s < n_states; ++s) {
    if (index[s] < 0) continue;
    for (const auto& [t, p] : chain.rows[s]) {
      if (index[t] >= 0) a(index[s], index[t]) -= game.gamma() * p;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw DivergenceError(
        "policy evaluation diverges: some state never reaches a terminal "
        "under this profile and gamma = 1");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    Eigen::VectorXd b(m);
    for (StateId s = 0; s < n_states; ++s) {
      if (index[s] >= 0) b(index[s]) = chain.reward[p][s];
    }
    Eigen::VectorXd x = lu.solve(b);
    for (StateId s = 0; s < n_states; ++s) {
      if (index[s] < 0) continue;
      if (!std::isfinite(x(index[s]))) {
        throw DivergenceError("policy evaluation produced non-finite values");
      }
      values[p][s] = x(index[s]);
    }
  }
  return values;
}

ValueTable solve_iterative(const StochasticGame& game,
                           const ProfileChain& chain, double tol,
                           Execution exec) {
  const int n_states = game.num_states();
  const double gamma = game.gamma();
  const double threshold =
      gamma >= 1.0 ? tol : (gamma <= 0.0 ? 0.0 : tol * (1.0 - gamma) / (2.0 * gamma));
  ValueTable values(game.num_players(), std::vector<double>(n_states, 0.0));
  for (int p = 0; p < game.num_players(); ++p) {
    std::vector<double> v(n_states, 0.0), next(n_states, 0.0);
    std::vector<double> change(n_states, 0.0);
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
      parallel_for(exec, n_states, [&](std::int64_t i) {
        const auto s = static_cast<StateId>(i);
        double x = chain.reward[p][s];
        for (const auto& [t, prob] : chain.rows[s]) x += gamma * prob * v[t];
        next[s] = x;
        change[s] = std::abs(x - v[s]);
      });
      v.swap(next);
      const double delta = *std::max_element(change.begin(), change.end());
      if (!std::isfinite(delta)) break;
      if (delta <= threshold) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw DivergenceError("iterative policy evaluation did not converge");
    }
    values[p] = std::move(v);
  }
  return values;
}

}  // namespace

ValueTable evaluate_profile(const StochasticGame& game,
                            const PolicyProfile& profile, double tol,
                            Execution exec) {
  check_profile(game, profile);
  const ProfileChain chain = build_chain(game, profile);
  if (game.num_states() <= kDirectSolveMaxStates) {
    return solve_direct(game, chain);
  }
  return solve_iterative(game, chain, tol, exec);
}

// ---------------------------------------------------------------------------
// Induced MDP

StochasticGame induced_mdp(const StochasticGame& game, int player,
                           std::span<const Policy> others) {
  const int n_players = game.num_players();
  if (player < 0 || player >= n_players) {
    throw DomainError("player index out of range");
  }
  if (static_cast<int>(others.size()) != n_players - 1) {
    throw DomainError("induced_mdp needs one policy per other player");
  }
  if (n_players == 1) return game;

  PolicyProfile profile(n_players);
  for (int p = 0, k = 0; p < n_players; ++p) {
    if (p == player) {
      profile[p] = Policy(game.num_states(), game.num_actions(p));
    } else {
      profile[p] = others[k++];
    }
  }
  check_profile(game, profile);

  const int n_states = game.num_states();
  const int n_actions = game.num_actions(player);
  GameBuilder builder(game.state_names(), {game.action_names()[player]},
                      game.gamma());
  // Accumulators are reset through the list of touched next states only;
  // dense resets dominate the cost on large sparse games.
  std::vector<double> prob(n_states, 0.0), weighted_reward(n_states, 0.0);
  std::vector<StateId> touched;
  for (StateId s = 0; s < n_states; ++s) {
    if (game.is_terminal(s)) {
      builder.set_terminal(s);
      continue;
    }
    const auto weights =
        joint_distribution(game.joint_actions(), profile, s, player);
    for (int a = 0; a < n_actions; ++a) {
      touched.clear();
      for (int j = 0; j < game.num_joint_actions(); ++j) {
        if (game.joint_actions().action_of(j, player) != a || weights[j] == 0.0) {
          continue;
        }
        auto row = game.outcomes(s, j);
        for (size_t k = 0; k < row.size(); ++k) {
          const double w = weights[j] * row[k].probability;
          const StateId t = row[k].next;
          if (prob[t] == 0.0 && weighted_reward[t] == 0.0) touched.push_back(t);
          prob[t] += w;
          weighted_reward[t] +=
              w * game.outcome_reward(player, s, j, static_cast<int>(k));
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (StateId t : touched) {
        if (prob[t] > 0.0) {
          builder.set_transition(s, a, t, prob[t]);
          builder.set_reward(0, s, a, t, weighted_reward[t] / prob[t]);
        }
        prob[t] = 0.0;
        weighted_reward[t] = 0.0;
      }
    }
  }
  builder.make_terminals_absorbing();
  return builder.build();
}

StochasticGame induced_mdp_from_profile(const StochasticGame& game, int player,
                                        const PolicyProfile& profile) {
  std::vector<Policy> others;
  for (int p = 0; p < static_cast<int>(profile.size()); ++p) {
    if (p != player) others.push_back(profile[p]);
  }
  return induced_mdp(game, player, others);
}

}  // namespace sgshape
