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

#include "sgshape/sg_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "sgshape/matrix_solver.hpp"
#include "sgshape/simplex.hpp"

namespace sgshape {
namespace {

double stopping_threshold(double tol, double gamma) {
  if (gamma >= 1.0) return tol;
  if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
  return tol * (1.0 - gamma) / (2.0 * gamma);
}

double tie_tolerance(double best) {
  return 1e-12 * std::max(1.0, std::abs(best));
}

// One-step lookahead of a single-player game.
double action_value(const StochasticGame& mdp, StateId s, int a,
                    const std::vector<double>& v) {
  auto row = mdp.outcomes(s, a);
  double q = 0.0;
  for (size_t k = 0; k < row.size(); ++k) {
    q += row[k].probability *
         (mdp.outcome_reward(0, s, a, static_cast<int>(k)) +
          mdp.gamma() * v[row[k].next]);
  }
  return q;
}

int greedy_action(const StochasticGame& mdp, StateId s,
                  const std::vector<double>& v) {
  const int n_actions = mdp.num_actions(0);
  std::vector<double> q(n_actions);
  for (int a = 0; a < n_actions; ++a) q[a] = action_value(mdp, s, a, v);
  const double best = *std::max_element(q.begin(), q.end());
  for (int a = 0; a < n_actions; ++a) {
    if (q[a] >= best - tie_tolerance(best)) return a;
  }
  return 0;
}

double value_tolerance_for(double eps) {
  return std::min(kValueTolerance, eps * 1e-2);
}

}  // namespace

std::string to_string(SolutionMethod method) {
  switch (method) {
    case SolutionMethod::kShapleyLp:
      return "shapley-lp";
    case SolutionMethod::kPureSearch:
      return "pure-search";
    case SolutionMethod::kSingleState:
      return "single-state";
    case SolutionMethod::kExternalCandidate:
      return "external-candidate";
  }
  return "unknown";
}

MdpSolution mdp_value_iteration(const StochasticGame& mdp, double tol,
                                Execution exec) {
  if (mdp.num_players() != 1) {
    throw DomainError("mdp_value_iteration requires a single-player game");
  }
  const int n_states = mdp.num_states();
  const int n_actions = mdp.num_actions(0);
  const double threshold = stopping_threshold(tol, mdp.gamma());

  MdpSolution out;
  std::vector<double> v(n_states, 0.0), next(n_states, 0.0),
      change(n_states, 0.0);
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    parallel_for(exec, n_states, [&](std::int64_t i) {
      const auto s = static_cast<StateId>(i);
      if (mdp.is_terminal(s)) {
        next[s] = 0.0;
        change[s] = 0.0;
        return;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < n_actions; ++a) {
        best = std::max(best, action_value(mdp, s, a, v));
      }
      next[s] = best;
      change[s] = std::abs(best - v[s]);
    });
    v.swap(next);
    out.iterations = it + 1;
    const double delta = *std::max_element(change.begin(), change.end());
    if (!std::isfinite(delta)) break;
    if (delta <= threshold) {
      converged = true;
      break;
    }
  }
  if (!converged) throw DivergenceError("value iteration did not converge");

  std::vector<int> actions(n_states, 0);
  for (StateId s = 0; s < n_states; ++s) {
    if (!mdp.is_terminal(s)) actions[s] = greedy_action(mdp, s, v);
  }

  if (n_states <= kDirectSolveMaxStates) {
    // Policy iteration from the value-iteration greedy policy; switches only
    // on strict improvement so it terminates.
    for (int round = 0; round < 1000; ++round) {
      const Policy pi = Policy::Deterministic(actions, n_actions);
      v = evaluate_profile(mdp, {pi})[0];
      bool stable = true;
      for (StateId s = 0; s < n_states; ++s) {
        if (mdp.is_terminal(s)) continue;
        const double current = action_value(mdp, s, actions[s], v);
        double best = current;
        int best_action = actions[s];
        for (int a = 0; a < n_actions; ++a) {
          const double q = action_value(mdp, s, a, v);
          if (q > best + tie_tolerance(best)) {
            best = q;
            best_action = a;
          }
        }
        if (best_action != actions[s]) {
          actions[s] = best_action;
          stable = false;
        }
      }
      if (stable) break;
    }
    for (StateId s = 0; s < n_states; ++s) {
      if (!mdp.is_terminal(s)) actions[s] = greedy_action(mdp, s, v);
    }
  }
  out.values = std::move(v);
  out.policy = Policy::Deterministic(actions, n_actions);
  return out;
}

QTable q_from_v(const StochasticGame& game, const ValueTable& v) {
  const int n_players = game.num_players();
  const int n_joint = game.num_joint_actions();
  if (static_cast<int>(v.size()) != n_players) {
    throw DomainError("value table has wrong player count");
  }
  QTable q;
  q.num_joint = n_joint;
  q.values.assign(n_players,
                  std::vector<double>(static_cast<size_t>(game.num_states()) * n_joint, 0.0));
  for (int p = 0; p < n_players; ++p) {
    if (static_cast<int>(v[p].size()) != game.num_states()) {
      throw DomainError("value table has wrong state count");
    }
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (game.is_terminal(s)) continue;
      for (int j = 0; j < n_joint; ++j) {
        auto row = game.outcomes(s, j);
        double total = 0.0;
        for (size_t k = 0; k < row.size(); ++k) {
          total += row[k].probability *
                   (game.outcome_reward(p, s, j, static_cast<int>(k)) +
                    game.gamma() * v[p][row[k].next]);
        }
        q.values[p][s * n_joint + j] = total;
      }
    }
  }
  return q;
}

bool is_zero_sum(const StochasticGame& game, double tol) {
  if (game.num_players() != 2) return false;
  for (StateId s = 0; s < game.num_states(); ++s) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      const int n = static_cast<int>(game.outcomes(s, j).size());
      for (int k = 0; k < n; ++k) {
        if (std::abs(game.outcome_reward(0, s, j, k) +
                     game.outcome_reward(1, s, j, k)) > tol) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace {

// Player 1's payoff matrix of the state game at s under continuation v.
void state_matrix(const StochasticGame& game, StateId s,
                  const std::vector<double>& v, std::vector<double>& out) {
  const int n_joint = game.num_joint_actions();
  out.assign(n_joint, 0.0);
  for (int j = 0; j < n_joint; ++j) {
    auto row = game.outcomes(s, j);
    double total = 0.0;
    for (size_t k = 0; k < row.size(); ++k) {
      total += row[k].probability *
               (game.outcome_reward(0, s, j, static_cast<int>(k)) +
                game.gamma() * v[row[k].next]);
    }
    out[j] = total;
  }
}

}  // namespace

EquilibriumSolution shapley_value_iteration(
    const StochasticGame& game, double tol, Execution exec,
    std::vector<std::vector<double>>* iterates) {
  if (!is_zero_sum(game)) {
    throw DomainError("Shapley iteration requires a two-player zero-sum game");
  }
  if (!(game.gamma() < 1.0)) {
    throw DomainError("Shapley iteration requires gamma < 1");
  }
  const int n_states = game.num_states();
  const int rows = game.num_actions(0);
  const int cols = game.num_actions(1);
  const double threshold = stopping_threshold(tol, game.gamma());

  std::vector<double> v(n_states, 0.0), next(n_states, 0.0),
      change(n_states, 0.0);
  if (iterates) iterates->assign(1, v);
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    parallel_for(exec, n_states, [&](std::int64_t i) {
      const auto s = static_cast<StateId>(i);
      if (game.is_terminal(s)) {
        next[s] = 0.0;
        change[s] = 0.0;
        return;
      }
      thread_local ZeroSumLpWorkspace lp;
      thread_local std::vector<double> matrix;
      state_matrix(game, s, v, matrix);
      next[s] = lp.solve(matrix, rows, cols).value;
      change[s] = std::abs(next[s] - v[s]);
    });
    v.swap(next);
    if (iterates) iterates->push_back(v);
    if (*std::max_element(change.begin(), change.end()) <= threshold) {
      converged = true;
      break;
    }
  }
  if (!converged) throw DivergenceError("Shapley iteration did not converge");

  PolicyProfile profile{Policy(n_states, rows), Policy(n_states, cols)};
  ZeroSumLpWorkspace lp;
  std::vector<double> matrix;
  for (StateId s = 0; s < n_states; ++s) {
    if (game.is_terminal(s)) continue;
    state_matrix(game, s, v, matrix);
    const ZeroSumSolution& sol = lp.solve(matrix, rows, cols);
    profile[0].set(s, sol.row_strategy);
    profile[1].set(s, sol.col_strategy);
  }
  return make_solution(game, std::move(profile), SolutionMethod::kShapleyLp,
                       tol);
}

NashReport verify_nash(const StochasticGame& game, const PolicyProfile& profile,
                       double eps, Execution exec) {
  check_profile(game, profile);
  const double value_tol = value_tolerance_for(eps);
  NashReport report;
  report.profile_values = evaluate_profile(game, profile, value_tol, exec);
  const int n_players = game.num_players();
  const int n_states = game.num_states();
  report.regrets.assign(n_players, std::vector<double>(n_states, 0.0));
  report.max_regret.assign(n_players, 0.0);
  report.best_response_values.assign(n_players, {});
  for (int p = 0; p < n_players; ++p) {
    const StochasticGame mdp = induced_mdp_from_profile(game, p, profile);
    MdpSolution br = mdp_value_iteration(mdp, value_tol, exec);
    for (StateId s = 0; s < n_states; ++s) {
      if (game.is_terminal(s)) continue;
      const double r = br.values[s] - report.profile_values[p][s];
      report.regrets[p][s] = r;
      report.max_regret[p] = std::max(report.max_regret[p], r);
    }
    report.best_response_values[p] = std::move(br.values);
  }
  report.overall_max_regret =
      *std::max_element(report.max_regret.begin(), report.max_regret.end());
  report.is_nash = report.overall_max_regret <= eps;
  return report;
}

EquilibriumSolution make_solution(const StochasticGame& game,
                                  PolicyProfile profile, SolutionMethod method,
                                  double tol) {
  EquilibriumSolution sol;
  const NashReport report = verify_nash(game, profile, tol);
  sol.profile = std::move(profile);
  sol.values = report.profile_values;
  sol.q = q_from_v(game, sol.values);
  sol.regrets = report.regrets;
  sol.max_regret = report.overall_max_regret;
  sol.method = method;
  return sol;
}

double pure_profile_count(const StochasticGame& game) {
  const int free_states = game.num_states() - game.num_terminals();
  double count = 1.0;
  for (int p = 0; p < game.num_players(); ++p) {
    count *= std::pow(static_cast<double>(game.num_actions(p)), free_states);
  }
  return count;
}

std::vector<PolicyProfile> pure_stationary_equilibria(const StochasticGame& game,
                                                      double eps, Execution exec,
                                                      std::stop_token stop) {
  const double count = pure_profile_count(game);
  if (count > kPureSearchLimit) {
    throw SizeError("pure profile search space has " + std::to_string(count) +
                    " profiles, above the limit of 1e6");
  }
  const int n_players = game.num_players();
  const int n_states = game.num_states();
  std::vector<StateId> free_states;
  for (StateId s = 0; s < n_states; ++s) {
    if (!game.is_terminal(s)) free_states.push_back(s);
  }
  // Digits, most significant first: (player 0, first free state), ...
  struct Digit {
    int player;
    StateId state;
    int radix;
  };
  std::vector<Digit> digits;
  for (int p = 0; p < n_players; ++p) {
    for (StateId s : free_states) digits.push_back({p, s, game.num_actions(p)});
  }
  auto decode = [&](std::int64_t index) {
    std::vector<std::vector<int>> actions(n_players,
                                          std::vector<int>(n_states, 0));
    for (int d = static_cast<int>(digits.size()) - 1; d >= 0; --d) {
      actions[digits[d].player][digits[d].state] =
          static_cast<int>(index % digits[d].radix);
      index /= digits[d].radix;
    }
    PolicyProfile profile;
    for (int p = 0; p < n_players; ++p) {
      profile.push_back(Policy::Deterministic(actions[p], game.num_actions(p)));
    }
    return profile;
  };

  const auto total = static_cast<std::int64_t>(count);
  std::vector<char> accepted(total, 0);
  std::atomic<bool> cancelled{false};
  parallel_for_dynamic(exec, total, [&](std::int64_t i) {
    if (cancelled.load(std::memory_order_relaxed)) return;
    if (stop.stop_requested()) {
      cancelled = true;
      return;
    }
    try {
      accepted[i] = verify_nash(game, decode(i), eps).is_nash ? 1 : 0;
    } catch (const DivergenceError&) {
      // Improper under gamma = 1: not an equilibrium candidate.
      accepted[i] = 0;
    }
  });
  if (cancelled) throw CancelledError("pure profile search cancelled");

  std::vector<PolicyProfile> result;
  for (std::int64_t i = 0; i < total; ++i) {
    if (accepted[i]) result.push_back(decode(i));
  }
  return result;
}

std::vector<EquilibriumSolution> solve_single_state(const StochasticGame& game,
                                                    double tol) {
  std::vector<StateId> free_states;
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (!game.is_terminal(s)) free_states.push_back(s);
  }
  if (free_states.size() != 1) {
    throw DomainError("solve_single_state needs exactly one non-terminal state");
  }
  const StateId s = free_states[0];
  for (int j = 0; j < game.num_joint_actions(); ++j) {
    if (std::abs(game.transition(s, j, s) - 1.0) > kStructuralTolerance) {
      throw DomainError("solve_single_state needs the non-terminal state " +
                        game.state_name(s) +
                        " to loop to itself under every joint action");
    }
  }
  if (!(game.gamma() < 1.0)) {
    throw DomainError("solve_single_state requires gamma < 1");
  }
  const int n_players = game.num_players();
  std::vector<std::vector<double>> payoffs(
      n_players, std::vector<double>(game.num_joint_actions()));
  for (int p = 0; p < n_players; ++p) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      payoffs[p][j] = game.expected_reward(p, s, j);
    }
  }
  const MatrixGame matrix(game.joint_actions().action_counts(), payoffs);

  std::vector<StrategyProfile> candidates;
  if (n_players == 2) {
    for (auto& eq : support_enumeration(matrix, tol)) {
      candidates.push_back(std::move(eq.strategies));
    }
    if (candidates.empty() && is_zero_sum(game)) {
      const MatrixGame zs(matrix.joint().action_counts(), payoffs, true);
      candidates.push_back(solve_zero_sum(zs, tol).strategies);
    }
  } else {
    for (int j : pure_equilibria(matrix)) {
      StrategyProfile prof(n_players);
      for (int p = 0; p < n_players; ++p) {
        prof[p].assign(game.num_actions(p), 0.0);
        prof[p][matrix.joint().action_of(j, p)] = 1.0;
      }
      candidates.push_back(std::move(prof));
    }
  }

  std::vector<EquilibriumSolution> result;
  for (const auto& strategies : candidates) {
    PolicyProfile profile;
    for (int p = 0; p < n_players; ++p) {
      Policy pi(game.num_states(), game.num_actions(p));
      pi.set(s, strategies[p]);
      profile.push_back(std::move(pi));
    }
    EquilibriumSolution sol = make_solution(
        game, std::move(profile), SolutionMethod::kSingleState, 10.0 * tol);
    if (sol.max_regret <= 10.0 * tol) result.push_back(std::move(sol));
  }
  return result;
}

}  // namespace sgshape
