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

#ifndef SGSHAPE_SHAPING_HPP_
#define SGSHAPE_SHAPING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "sgshape/common.hpp"
#include "sgshape/game.hpp"
#include "sgshape/sg_solver.hpp"

namespace sgshape {

// Per-player additive reward on state transitions, F_i(s, s'). Not
// necessarily potential-based.
struct ShapingFunction {
  int num_states = 0;
  std::vector<std::vector<double>> values;  // [player][s * num_states + s']

  static ShapingFunction Zero(int num_players, int num_states);
  int num_players() const { return static_cast<int>(values.size()); }
  double at(int player, StateId s, StateId next) const {
    return values[player][s * num_states + next];
  }
  double& at(int player, StateId s, StateId next) {
    return values[player][s * num_states + next];
  }
  ShapingFunction negated() const;
};

// F_i(s, s') = gamma * Phi_i(s') - Phi_i(s). Throws DomainError when a
// terminal has nonzero potential.
ShapingFunction potential_to_shaping(const PotentialSet& phi, double gamma,
                                     const std::vector<bool>& terminals);
ShapingFunction potential_to_shaping(const PotentialSet& phi,
                                     const StochasticGame& game);

struct ShapedGame {
  StochasticGame game;
  std::vector<std::string> warnings;
};

// Adds F_i(s, s') to every stored reward R_i(s, a, s') of a non-terminal
// source state. Terminal rows keep reward 0; a nonzero F on a terminal
// self-loop is dropped and reported in `warnings`.
ShapedGame apply_shaping(const StochasticGame& game,
                         const ShapingFunction& shaping);

struct OffsetReport {
  bool shaped_game_matches = false;  // m_prime == shaping of m by phi
  bool nash_on_m = false;            // precondition
  bool nash_on_m_prime = false;      // equilibrium survives shaping
  bool unshaping_restores_m = false;
  bool nash_restored_on_m = false;   // equilibrium of m_prime verifies on m
  double max_value_residual = 0.0;   // |V' - (V - Phi)|
  double max_q_residual = 0.0;       // |Q' - (Q - Phi)|
  double max_regret_m_prime = 0.0;
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }
};

// Checks that shaping by Phi shifts the equilibrium's values and Q-values by
// exactly -Phi(s), that the equilibrium of m still verifies on m_prime, and
// that removing the shaping recovers m with the same equilibrium.
OffsetReport check_offset_identities(const StochasticGame& m,
                                     const StochasticGame& m_prime,
                                     const PotentialSet& phi,
                                     const EquilibriumSolution& solution_m,
                                     double tol);

struct ValuePotentialReport {
  double max_residual = 0.0;  // |Q' - E[R + F]| over all states and actions
  bool passed = false;
  PotentialSet phi;
};

// With Phi_i := V_i of the solution, the shaped equilibrium Q-values equal
// the expected one-step shaped reward (continuation values vanish).
ValuePotentialReport check_value_potential_identity(
    const StochasticGame& m, const EquilibriumSolution& solution_m, double tol);

struct ShapingClassification {
  bool is_potential = false;
  std::optional<PotentialSet> phi;  // set iff is_potential
  double max_residual = 0.0;
};

inline constexpr double kClassifyTolerance = 1e-8;

// Least-squares reconstruction of Phi (zero at terminals) from
// F(s, s') = gamma Phi(s') - Phi(s) over all ordered state pairs.
ShapingClassification classify_shaping(const ShapingFunction& f, double gamma,
                                       const std::vector<bool>& terminals,
                                       double tol = kClassifyTolerance);

struct NecessityInstance {
  double delta = 0.0;
  double gamma = 0.0;
  StochasticGame game_m;
  StochasticGame game_m_prime;
  ShapingFunction shaping;
  // Player 1's equilibrium action at s1 (0 = a1^1 to s3, 1 = a1^2 to s2).
  int expected_action_m = 0;
  int expected_action_m_prime = 0;
  // Closed-form player-1 Q-values at s1 in M' for both actions.
  double predicted_q_prime_direct = 0.0;
  double predicted_q_prime_detour = 0.0;
};

inline constexpr StateId kNecessityS1 = 0;
inline constexpr StateId kNecessityS2 = 1;
inline constexpr StateId kNecessityS3 = 2;

// Three-state game in which a non-potential shaping function flips player
// 1's equilibrium action at s1. Without `f1`, player 1's shaping is 0 except
// F_1(s1, s3) = -delta. With `f1`, its implied deviation
// F_1(s1,s2) + gamma F_1(s2,s3) - F_1(s1,s3) must equal delta. Throws
// DomainError for delta == 0 or gamma outside (0, 1].
NecessityInstance build_necessity_counterexample(
    double delta, double gamma, const std::optional<ShapingFunction>& f1 = {},
    int num_players = 2);

}  // namespace sgshape

#endif  // SGSHAPE_SHAPING_HPP_
