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

#ifndef SGSHAPE_SG_SOLVER_HPP_
#define SGSHAPE_SG_SOLVER_HPP_

#include <stop_token>
#include <string>
#include <vector>

#include "sgshape/common.hpp"
#include "sgshape/game.hpp"
#include "sgshape/parallel.hpp"

namespace sgshape {

enum class SolutionMethod { kShapleyLp, kPureSearch, kSingleState, kExternalCandidate };

std::string to_string(SolutionMethod method);

struct EquilibriumSolution {
  PolicyProfile profile;
  ValueTable values;  // values of `profile` itself
  QTable q;           // one-step backup of `values`
  std::vector<std::vector<double>> regrets;  // [player][state]
  double max_regret = 0.0;
  SolutionMethod method = SolutionMethod::kExternalCandidate;
};

struct MdpSolution {
  std::vector<double> values;
  Policy policy;  // greedy, deterministic, lowest index among ties
  int iterations = 0;
};

// Optimal values of a single-player game. Value iteration until the sup-norm
// change is at most tol * (1 - gamma) / (2 gamma); for games with at most
// kDirectSolveMaxStates states the greedy policy is then polished by exact
// policy iteration, so the returned values are the exact optimum up to
// rounding.
MdpSolution mdp_value_iteration(const StochasticGame& mdp,
                                double tol = kValueTolerance,
                                Execution exec = Execution::kSerial);

// Q_i(s, a) = sum_s' T(s, a, s') [R_i(s, a, s') + gamma v_i(s')]; zero rows at
// terminals.
QTable q_from_v(const StochasticGame& game, const ValueTable& v);

bool is_zero_sum(const StochasticGame& game, double tol = kStructuralTolerance);

// Shapley's value iteration for two-player zero-sum games, starting from
// V = 0. `iterates`, when given, receives player 1's value vector after every
// sweep (starting with the initial zero vector).
EquilibriumSolution shapley_value_iteration(
    const StochasticGame& game, double tol = kRegretTolerance,
    Execution exec = Execution::kSerial,
    std::vector<std::vector<double>>* iterates = nullptr);

struct NashReport {
  std::vector<std::vector<double>> regrets;  // [player][state]
  std::vector<double> max_regret;            // per player
  double overall_max_regret = 0.0;
  bool is_nash = false;
  ValueTable profile_values;
  ValueTable best_response_values;
};

// Regret of every player in every state against its best stationary
// deviation, computed on the MDP induced by the other players' policies.
NashReport verify_nash(const StochasticGame& game, const PolicyProfile& profile,
                       double eps = kRegretTolerance,
                       Execution exec = Execution::kSerial);

// Bundles a profile with its values, Q-table and regrets.
EquilibriumSolution make_solution(const StochasticGame& game,
                                  PolicyProfile profile, SolutionMethod method,
                                  double tol = kRegretTolerance);

inline constexpr double kPureSearchLimit = 1e6;

// Number of deterministic stationary profiles. Terminal states contribute no
// choice (their action is fixed to 0 because it cannot affect any value).
double pure_profile_count(const StochasticGame& game);

// Exhaustive search over deterministic stationary profiles; returns those
// passing verify_nash at eps, in enumeration order (player 0's choice in the
// first non-terminal state is the most significant digit). Throws SizeError
// above kPureSearchLimit profiles and CancelledError when `stop` fires.
std::vector<PolicyProfile> pure_stationary_equilibria(
    const StochasticGame& game, double eps = kRegretTolerance,
    Execution exec = Execution::kSerial, std::stop_token stop = {});

// Games with a single non-terminal state that loops to itself under every
// joint action: equilibria of the expected-reward matrix game, scaled by
// 1 / (1 - gamma). Zero-sum games use the LP, two-player games support
// enumeration, other player counts pure equilibria.
std::vector<EquilibriumSolution> solve_single_state(
    const StochasticGame& game, double tol = kRegretTolerance);

}  // namespace sgshape

#endif  // SGSHAPE_SG_SOLVER_HPP_
