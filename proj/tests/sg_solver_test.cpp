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
#include <cmath>

#include "doctest.h"
#include "sgshape/generators.hpp"
#include "test_oracles.hpp"

namespace sgshape {
namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PolicyProfile pure_profile(const StochasticGame& game, std::vector<int> actions) {
  PolicyProfile profile;
  for (int p = 0; p < game.num_players(); ++p) {
    Policy pi(game.num_states(), game.num_actions(p));
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (!game.is_terminal(s)) pi.set_pure(s, actions[p]);
    }
    profile.push_back(std::move(pi));
  }
  return profile;
}

TEST_CASE("mdp_value_iteration on the chain") {
  const auto sol = mdp_value_iteration(chain_game());
  CHECK(sol.values[0] == doctest::Approx(0.9));
  CHECK(sol.values[1] == doctest::Approx(1.0));
  CHECK(sol.values[2] == 0.0);
}

TEST_CASE("mdp_value_iteration picks the dominant action") {
  GameBuilder b({"s0", "sT"}, {{"a1", "a2"}}, 0.9);
  b.set_terminal(1);
  b.set_transition(0, 0, 1, 1.0).set_reward(0, 0, 0, 1, 1.0);
  b.set_transition(0, 1, 1, 1.0);
  b.make_terminals_absorbing();
  const auto sol = mdp_value_iteration(b.build());
  CHECK(sol.values[0] == doctest::Approx(1.0));
  CHECK(sol.policy.prob(0, 0) == 1.0);
}

TEST_CASE("mdp_value_iteration on a discounted self-loop") {
  GameBuilder b({"s0", "sT"}, {{"loop", "exit"}}, 0.5);
  b.set_terminal(1);
  b.set_transition(0, 0, 0, 1.0).set_reward(0, 0, 0, 0, 1.0);
  b.set_transition(0, 1, 1, 1.0);
  b.make_terminals_absorbing();
  const auto sol = mdp_value_iteration(b.build());
  CHECK(std::abs(sol.values[0] - 2.0) <= 1e-9);
  CHECK(sol.policy.prob(0, 0) == 1.0);
}

TEST_CASE("q_from_v") {
  const auto game = chain_game();
  const ValueTable zero{{0.0, 0.0, 0.0}};
  auto q = q_from_v(game, zero);
  CHECK(q.at(0, 0, 0) == 0.0);
  CHECK(q.at(0, 1, 0) == 1.0);
  CHECK(q.at(0, 2, 0) == 0.0);
  q = q_from_v(game, {{0.9, 1.0, 0.0}});
  CHECK(q.at(0, 0, 0) == doctest::Approx(0.9));
  CHECK(q.at(0, 2, 0) == 0.0);
}

TEST_CASE("shapley_value_iteration on repeated matching pennies") {
  const auto sol = shapley_value_iteration(repeated_game(matching_pennies(), 0.9));
  CHECK(std::abs(sol.values[0][0]) <= 1e-8);
  CHECK(std::abs(sol.values[1][0]) <= 1e-8);
  for (int p = 0; p < 2; ++p) {
    CHECK(sol.profile[p].prob(0, 0) == doctest::Approx(0.5));
  }
  CHECK(sol.method == SolutionMethod::kShapleyLp);
}

TEST_CASE("shapley_value_iteration on the chain embedded as a game") {
  GameBuilder b({"s0", "s1", "sT"}, {{"go"}, {"wait"}}, 0.9);
  b.set_terminal(2);
  b.set_transition(0, 0, 1, 1.0);
  b.set_transition(1, 0, 2, 1.0);
  b.set_reward(0, 1, 0, 2, 1.0).set_reward(1, 1, 0, 2, -1.0);
  b.make_terminals_absorbing();
  const auto sol = shapley_value_iteration(b.build());
  CHECK(sol.values[0][0] == doctest::Approx(0.9));
  CHECK(sol.values[0][1] == doctest::Approx(1.0));
  CHECK(sol.values[0][2] == 0.0);
  CHECK(sol.values[1][0] == doctest::Approx(-0.9));
}

TEST_CASE("shapley_value_iteration rejects general-sum games") {
  CHECK_THROWS_AS(shapley_value_iteration(repeated_game(prisoners_dilemma(), 0.5)),
                  DomainError);
}

TEST_CASE("verify_nash on the repeated dilemma") {
  const auto game = repeated_game(prisoners_dilemma(), 0.5);
  const auto cc = pure_profile(game, {0, 0});
  const auto report = verify_nash(game, cc);
  CHECK_FALSE(report.is_nash);
  for (int p = 0; p < 2; ++p) {
    CHECK(report.max_regret[p] == doctest::Approx(4.0));
    CHECK(report.best_response_values[p][0] == doctest::Approx(10.0));
    CHECK(report.profile_values[p][0] == doctest::Approx(6.0));
  }
  CHECK(verify_nash(game, pure_profile(game, {1, 1})).is_nash);
}

TEST_CASE("verify_nash on a game that starts at a terminal") {
  GameBuilder b({"sT"}, {{"x", "y"}, {"u", "v"}}, 0.9);
  b.set_terminal(0);
  b.make_terminals_absorbing();
  const auto game = b.build();
  Rng rng(3);
  const auto report = verify_nash(game, random_profile(rng, game));
  CHECK(report.is_nash);
  CHECK(report.overall_max_regret == 0.0);
}

TEST_CASE("pure_stationary_equilibria") {
  const auto pd = repeated_game(prisoners_dilemma(), 0.5);
  const auto eqs = pure_stationary_equilibria(pd);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0][0].prob(0, 1) == 1.0);
  CHECK(eqs[0][1].prob(0, 1) == 1.0);

  CHECK(pure_stationary_equilibria(repeated_game(matching_pennies(), 0.9)).empty());
  CHECK(pure_stationary_equilibria(chain_game()).size() == 1);
}

TEST_CASE("pure_stationary_equilibria guards the search space") {
  RandomGameOptions options;
  options.min_states = options.max_states = 12;
  options.min_actions = options.max_actions = 3;
  Rng rng(1);
  const auto game = random_game(rng, options);
  CHECK(pure_profile_count(game) > kPureSearchLimit);
  CHECK_THROWS_AS(pure_stationary_equilibria(game), SizeError);
}

TEST_CASE("pure_stationary_equilibria honours cancellation") {
  std::stop_source source;
  source.request_stop();
  CHECK_THROWS_AS(pure_stationary_equilibria(repeated_game(prisoners_dilemma(), 0.5),
                                             kRegretTolerance, Execution::kSerial,
                                             source.get_token()),
                  CancelledError);
}

TEST_CASE("solve_single_state") {
  auto sols = solve_single_state(repeated_game(prisoners_dilemma(), 0.5));
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].profile[0].prob(0, 1) == 1.0);
  CHECK(sols[0].values[0][0] == doctest::Approx(2.0));
  CHECK(sols[0].values[1][0] == doctest::Approx(2.0));

  sols = solve_single_state(repeated_game(matching_pennies(), 0.9));
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].profile[0].prob(0, 0) == doctest::Approx(0.5));
  CHECK(std::abs(sols[0].values[0][0]) <= 1e-9);

  sols = solve_single_state(repeated_game(battle_of_the_sexes(), 0.5));
  REQUIRE(sols.size() == 3);
  // Twice the matrix values: (2,4), (4/3,4/3), (4,2) in player-1 order.
  CHECK(sols[0].values[0][0] == doctest::Approx(2.0));
  CHECK(sols[0].values[1][0] == doctest::Approx(4.0));
  CHECK(std::abs(sols[1].values[0][0] - 4.0 / 3.0) <= 1e-9);
  CHECK(std::abs(sols[1].values[1][0] - 4.0 / 3.0) <= 1e-9);
  CHECK(sols[2].values[0][0] == doctest::Approx(4.0));
  CHECK(sols[2].values[1][0] == doctest::Approx(2.0));
  for (const auto& s : sols) CHECK(s.max_regret <= 1e-7);

  CHECK_THROWS_AS(solve_single_state(chain_game()), DomainError);
}

TEST_CASE("property: Shapley solutions verify and contract") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto game = random_game(rng);
    std::vector<std::vector<double>> iterates;
    const auto sol = shapley_value_iteration(game, 1e-8, Execution::kSerial, &iterates);
    CHECK(verify_nash(game, sol.profile, 1e-6).is_nash);
    CHECK(sol.max_regret <= 1e-7);

    // Values are the profile-weighted average of Q.
    for (int p = 0; p < 2; ++p) {
      for (StateId s = 0; s < game.num_states(); ++s) {
        double avg = 0.0;
        for (int j = 0; j < game.num_joint_actions(); ++j) {
          avg += testing::joint_weight(game, sol.profile, s, j) * sol.q.at(p, s, j);
        }
        CHECK(std::abs(avg - sol.values[p][s]) <= 1e-9);
      }
    }

    // Contraction toward a tightly converged fixed point.
    const auto tight = shapley_value_iteration(game, 1e-13);
    const auto& v_star = tight.values[0];
    double prev = sup_diff(iterates.front(), v_star);
    for (size_t k = 1; k < iterates.size(); ++k) {
      const double cur = sup_diff(iterates[k], v_star);
      if (prev > 1e-9) CHECK(cur <= (game.gamma() + 1e-9) * prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("property: verify_nash matches a brute-force best response") {
  Rng rng(5);
  RandomGameOptions options;
  options.zero_sum = false;
  for (int trial = 0; trial < 40; ++trial) {
    const auto game = random_game(rng, options);
    const auto profile = random_profile(rng, game);
    const auto report = verify_nash(game, profile);
    for (int p = 0; p < 2; ++p) {
      const auto best = testing::brute_force_best_response(game, profile, p, 600);
      for (StateId s = 0; s < game.num_states(); ++s) {
        CHECK(report.regrets[p][s] >= -1e-9);
        CHECK(std::abs(report.best_response_values[p][s] - best[s]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("property: pure search is exactly the verified pure profiles") {
  Rng rng(21);
  RandomGameOptions options;
  options.zero_sum = false;
  options.max_states = 3;
  options.max_actions = 2;
  for (int trial = 0; trial < 25; ++trial) {
    const auto game = random_game(rng, options);
    const auto found = pure_stationary_equilibria(game);
    // Oracle: enumerate pure profiles in a different (state-major) order.
    std::vector<StateId> free;
    for (StateId s = 0; s < game.num_states(); ++s) {
      if (!game.is_terminal(s)) free.push_back(s);
    }
    const int digits = 2 * static_cast<int>(free.size());
    int expected = 0;
    for (int code = 0; code < (1 << digits); ++code) {
      PolicyProfile profile{Policy(game.num_states(), game.num_actions(0)),
                            Policy(game.num_states(), game.num_actions(1))};
      for (size_t k = 0; k < free.size(); ++k) {
        for (int p = 0; p < 2; ++p) {
          const int a = (code >> (2 * k + p)) & 1;
          if (a < game.num_actions(p)) profile[p].set_pure(free[k], a);
        }
      }
      bool in_range = true;
      for (size_t k = 0; k < free.size(); ++k) {
        for (int p = 0; p < 2; ++p) {
          in_range = in_range && ((code >> (2 * k + p)) & 1) < game.num_actions(p);
        }
      }
      if (!in_range) continue;
      const bool nash = verify_nash(game, profile).is_nash;
      const bool listed = std::find(found.begin(), found.end(), profile) != found.end();
      CHECK(nash == listed);
      expected += nash ? 1 : 0;
    }
    CHECK(static_cast<int>(found.size()) == expected);
  }
}

TEST_CASE("property: single-state solutions agree with pure search") {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> a(2, std::vector<double>(3)), b = a;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 3; ++c) {
        a[r][c] = u(rng);
        b[r][c] = u(rng);
      }
    }
    const auto game = repeated_game(MatrixGame::Bimatrix(a, b), 0.8);
    const auto pure = pure_stationary_equilibria(game);
    int pure_in_single = 0;
    for (const auto& sol : solve_single_state(game)) {
      CHECK(verify_nash(game, sol.profile, 1e-7).is_nash);
      const bool is_pure = sol.profile[0].prob(0, 0) == 1.0 || sol.profile[0].prob(0, 1) == 1.0;
      bool col_pure = false;
      for (int c = 0; c < 3; ++c) col_pure = col_pure || sol.profile[1].prob(0, c) == 1.0;
      if (is_pure && col_pure) {
        ++pure_in_single;
        CHECK(std::find(pure.begin(), pure.end(), sol.profile) != pure.end());
      }
    }
    CHECK(pure_in_single == static_cast<int>(pure.size()));
  }
}

TEST_CASE("parallel and serial solvers are bit-identical") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = random_game(rng);
    const auto a = shapley_value_iteration(game, 1e-8, Execution::kSerial);
    const auto b = shapley_value_iteration(game, 1e-8, Execution::kParallel);
    CHECK(a.values == b.values);
    CHECK(a.profile == b.profile);
    const auto pa = pure_stationary_equilibria(game, 1e-8, Execution::kSerial);
    const auto pb = pure_stationary_equilibria(game, 1e-8, Execution::kParallel);
    CHECK(pa == pb);
  }
}

}  // namespace
}  // namespace sgshape
