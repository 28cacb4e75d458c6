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

#include "sgshape/shaping.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sgshape/generators.hpp"
#include "test_oracles.hpp"

namespace sgshape {
namespace {

// One-step backup of player 0 at (s, joint) against plain values, using only
// the dense accessors.
double backup(const StochasticGame& game, int player, StateId s, int joint,
              const std::vector<double>& v) {
  double q = 0.0;
  for (StateId t = 0; t < game.num_states(); ++t) {
    const double prob = game.transition(s, joint, t);
    q += prob * (game.reward(player, s, joint, t) + game.gamma() * v[t]);
  }
  return q;
}

PotentialSet chain_potential(double phi_s0) {
  PotentialSet phi = PotentialSet::Zero(1, 3);
  phi.values[0][0] = phi_s0;
  return phi;
}

TEST_CASE("potential_to_shaping") {
  const std::vector<bool> terminals{false, true};
  auto f = potential_to_shaping(PotentialSet::Zero(1, 2), 0.9, terminals);
  for (double x : f.values[0]) CHECK(x == 0.0);

  PotentialSet phi{{{0.5, 0.0}}};
  f = potential_to_shaping(phi, 0.9, terminals);
  CHECK(f.at(0, 0, 1) == doctest::Approx(-0.5));
  CHECK(f.at(0, 1, 0) == doctest::Approx(0.45));
  CHECK(f.at(0, 0, 0) == doctest::Approx(-0.05));

  phi.values[0][1] = 0.1;
  CHECK_THROWS_AS(potential_to_shaping(phi, 0.9, terminals), DomainError);
}

TEST_CASE("undiscounted shaping telescopes around cycles") {
  const PotentialSet phi{{{1.0, 2.0, 0.0}}};
  const auto f = potential_to_shaping(phi, 1.0, {false, false, true});
  for (StateId a = 0; a < 3; ++a) {
    for (StateId b = 0; b < 3; ++b) {
      CHECK(f.at(0, a, b) == phi.values[0][b] - phi.values[0][a]);
      for (StateId c = 0; c < 3; ++c) {
        CHECK(f.at(0, a, b) + f.at(0, b, c) + f.at(0, c, a) == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("apply_shaping") {
  const auto game = chain_game();
  auto shaped = apply_shaping(game, ShapingFunction::Zero(1, 3));
  CHECK(shaped.game == game);
  CHECK(shaped.warnings.empty());

  // Chain s0 -> s1 -> sT with Phi(s1) carrying the shift onto the rewarded
  // edge.
  PotentialSet phi = PotentialSet::Zero(1, 3);
  phi.values[0][1] = 0.5;
  shaped = apply_shaping(game, potential_to_shaping(phi, game));
  CHECK(shaped.game.reward(0, 1, 0, 2) == doctest::Approx(0.5));
  CHECK(shaped.game.reward(0, 0, 0, 1) == doctest::Approx(0.45));
  CHECK(shaped.game.transition(0, 0, 1) == 1.0);

  ShapingFunction bad = ShapingFunction::Zero(1, 3);
  bad.at(0, 2, 2) = 1.0;
  shaped = apply_shaping(game, bad);
  CHECK(shaped.warnings.size() == 1);
  CHECK(shaped.game.reward(0, 2, 0, 2) == 0.0);
  CHECK(validate_game(shaped.game).empty());
}

TEST_CASE("check_offset_identities on the chain") {
  const auto game = chain_game();
  const auto solution = make_solution(game, {Policy(3, 1)}, SolutionMethod::kExternalCandidate);

  auto phi = chain_potential(0.5);
  auto m_prime = apply_shaping(game, potential_to_shaping(phi, game)).game;
  auto report = check_offset_identities(game, m_prime, phi, solution, 1e-9);
  CHECK(report.passed());
  // Hand evaluation of M': -0.5 + 0.9 * 1 = 0.4 = 0.9 - 0.5.
  const auto v_prime = evaluate_profile(m_prime, {Policy(3, 1)});
  CHECK(v_prime[0][0] == doctest::Approx(0.4));

  // Phi = V* flattens the shaped values.
  phi.values[0] = {0.9, 1.0, 0.0};
  m_prime = apply_shaping(game, potential_to_shaping(phi, game)).game;
  report = check_offset_identities(game, m_prime, phi, solution, 1e-9);
  CHECK(report.passed());
  const auto flat = evaluate_profile(m_prime, {Policy(3, 1)});
  for (double v : flat[0]) CHECK(std::abs(v) <= 1e-12);

  phi = PotentialSet::Zero(1, 3);
  report = check_offset_identities(game, game, phi, solution, 1e-9);
  CHECK(report.passed());
  CHECK(report.max_value_residual == 0.0);
  CHECK(report.max_q_residual == 0.0);
}

TEST_CASE("check_offset_identities reports a mismatched m_prime") {
  const auto game = chain_game();
  const auto solution = make_solution(game, {Policy(3, 1)}, SolutionMethod::kExternalCandidate);
  const auto phi = chain_potential(0.5);
  const auto report = check_offset_identities(game, game, phi, solution, 1e-9);
  CHECK_FALSE(report.passed());
  CHECK_FALSE(report.shaped_game_matches);
}

TEST_CASE("value potential identity") {
  const auto game = chain_game();
  const auto solution = make_solution(game, {Policy(3, 1)}, SolutionMethod::kExternalCandidate);
  auto report = check_value_potential_identity(game, solution, 1e-12);
  CHECK(report.passed);
  CHECK(report.max_residual <= 1e-12);

  const auto mp = shapley_value_iteration(repeated_game(matching_pennies(), 0.9));
  report = check_value_potential_identity(repeated_game(matching_pennies(), 0.9), mp, 1e-8);
  CHECK(report.passed);
  CHECK(std::abs(report.phi.values[0][0]) <= 1e-8);

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_game(rng);
    const auto sol = shapley_value_iteration(g);
    CHECK(check_value_potential_identity(g, sol, 1e-8).max_residual <= 1e-8);
  }
}

TEST_CASE("classify_shaping") {
  const std::vector<bool> terminals{false, false, true};
  const PotentialSet phi{{{1.0, 0.5, 0.0}}};
  auto c = classify_shaping(potential_to_shaping(phi, 0.9, terminals), 0.9, terminals);
  REQUIRE(c.is_potential);
  for (StateId s = 0; s < 3; ++s) CHECK(std::abs(c.phi->values[0][s] - phi.values[0][s]) <= 1e-10);

  c = classify_shaping(ShapingFunction::Zero(1, 3), 0.9, terminals);
  CHECK(c.is_potential);
  for (double x : c.phi->values[0]) CHECK(x == 0.0);

  ShapingFunction ones = ShapingFunction::Zero(1, 2);
  for (double& x : ones.values[0]) x = 1.0;
  c = classify_shaping(ones, 1.0, {false, true});
  CHECK_FALSE(c.is_potential);
  CHECK_FALSE(c.phi.has_value());
  CHECK(c.max_residual >= 0.5);
}

TEST_CASE("necessity counterexample flips player 1's choice") {
  for (double delta : {2.0, -2.0}) {
    const auto inst = build_necessity_counterexample(delta, 0.9);
    CHECK(validate_game(inst.game_m).empty());
    CHECK(inst.game_m.reward(0, kNecessityS1, 0, kNecessityS3) == delta / 2.0);

    // Player 2 has a single action, so player 1 faces an MDP; its optimal
    // values by exhaustive search.
    const PolicyProfile base{Policy(3, 2), Policy(3, 1)};
    const auto v_m = testing::brute_force_best_response(inst.game_m, base, 0, 10);
    const auto v_mp = testing::brute_force_best_response(inst.game_m_prime, base, 0, 10);
    const double q_direct = backup(inst.game_m, 0, kNecessityS1, 0, v_m);
    const double q_detour = backup(inst.game_m, 0, kNecessityS1, 1, v_m);
    CHECK(q_direct == doctest::Approx(delta / 2.0));
    CHECK(q_detour == 0.0);

    const double qp_direct = backup(inst.game_m_prime, 0, kNecessityS1, 0, v_mp);
    const double qp_detour = backup(inst.game_m_prime, 0, kNecessityS1, 1, v_mp);
    CHECK(qp_direct == doctest::Approx(inst.predicted_q_prime_direct));
    CHECK(qp_detour == doctest::Approx(inst.predicted_q_prime_detour));

    CHECK(inst.expected_action_m == (delta > 0 ? 0 : 1));
    CHECK(inst.expected_action_m_prime == (delta > 0 ? 1 : 0));
    for (const auto& [game, action] :
         {std::pair{&inst.game_m, inst.expected_action_m},
          std::pair{&inst.game_m_prime, inst.expected_action_m_prime}}) {
      // Player 1 is indifferent at s2, so equilibria agree only at s1.
      const auto eqs = pure_stationary_equilibria(*game);
      REQUIRE(!eqs.empty());
      for (const auto& eq : eqs) CHECK(eq[0].prob(kNecessityS1, action) == 1.0);
    }
  }
}

TEST_CASE("necessity counterexample arguments") {
  CHECK_THROWS_AS(build_necessity_counterexample(0.0, 0.9), DomainError);
  CHECK_THROWS_AS(build_necessity_counterexample(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(build_necessity_counterexample(1.0, 1.5), DomainError);

  ShapingFunction f = ShapingFunction::Zero(1, 3);
  f.at(0, kNecessityS1, kNecessityS2) = 1.0;  // Delta = 1 with the rest zero
  const auto inst = build_necessity_counterexample(1.0, 0.9, f);
  CHECK(inst.game_m_prime.reward(0, kNecessityS1, 1, kNecessityS2) == 1.0);
  CHECK_THROWS_AS(build_necessity_counterexample(2.0, 0.9, f), DomainError);

  const auto three = build_necessity_counterexample(2.0, 0.5, {}, 3);
  CHECK(three.game_m.num_players() == 3);
}

TEST_CASE("property: composition and inversion of shaping") {
  Rng rng(12);
  RandomGameOptions options;
  options.zero_sum = false;
  for (int trial = 0; trial < 50; ++trial) {
    const auto game = random_game(rng, options);
    const auto phi = random_potential(rng, game);
    const auto psi = random_potential(rng, game);
    PotentialSet sum = phi;
    for (int p = 0; p < game.num_players(); ++p) {
      for (StateId s = 0; s < game.num_states(); ++s) sum.values[p][s] += psi.values[p][s];
    }
    const auto twice = apply_shaping(apply_shaping(game, potential_to_shaping(phi, game)).game,
                                     potential_to_shaping(psi, game)).game;
    const auto once = apply_shaping(game, potential_to_shaping(sum, game)).game;
    const auto f = potential_to_shaping(phi, game);
    const auto undone = apply_shaping(apply_shaping(game, f).game, f.negated()).game;
    for (int p = 0; p < game.num_players(); ++p) {
      for (StateId s = 0; s < game.num_states(); ++s) {
        for (int j = 0; j < game.num_joint_actions(); ++j) {
          for (StateId t = 0; t < game.num_states(); ++t) {
            CHECK(std::abs(twice.reward(p, s, j, t) - once.reward(p, s, j, t)) <= 1e-15 * 16);
            CHECK(std::abs(undone.reward(p, s, j, t) - game.reward(p, s, j, t)) <= 1e-15 * 16);
          }
        }
      }
    }
  }
}

TEST_CASE("property: any profile's values shift by the potential") {
  Rng rng(13);
  RandomGameOptions options;
  options.zero_sum = false;
  for (int trial = 0; trial < 100; ++trial) {
    options.num_players = 1 + trial % 3;
    const auto game = random_game(rng, options);
    const auto phi = random_potential(rng, game);
    const auto m_prime = apply_shaping(game, potential_to_shaping(phi, game)).game;
    const auto profile = random_profile(rng, game);
    const auto v = evaluate_profile(game, profile);
    const auto vp = evaluate_profile(m_prime, profile);
    const auto r = verify_nash(game, profile);
    const auto rp = verify_nash(m_prime, profile);
    for (int p = 0; p < game.num_players(); ++p) {
      for (StateId s = 0; s < game.num_states(); ++s) {
        CHECK(std::abs(vp[p][s] - v[p][s] + phi.values[p][s]) <= 1e-9);
        CHECK(std::abs(rp.regrets[p][s] - r.regrets[p][s]) <= 2e-9);
      }
    }
  }
}

TEST_CASE("property: equilibria survive shaping in both directions") {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto game = random_game(rng);
    // Opposite potentials keep M' zero-sum, so it can be solved directly.
    auto phi = random_potential(rng, game);
    for (StateId s = 0; s < game.num_states(); ++s) phi.values[1][s] = -phi.values[0][s];
    const auto m_prime = apply_shaping(game, potential_to_shaping(phi, game)).game;
    const auto sol = shapley_value_iteration(game);
    const auto report = check_offset_identities(game, m_prime, phi, sol, 1e-6);
    CHECK(report.passed());
    const auto sol_prime = shapley_value_iteration(m_prime);
    CHECK(verify_nash(game, sol_prime.profile, 1e-6).is_nash);
  }
}

TEST_CASE("property: classification of random potentials and perturbations") {
  Rng rng(15);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    RandomGameOptions options;
    options.max_states = 5;
    const auto game = random_game(rng, options);
    const auto phi = random_potential(rng, game);
    auto f = potential_to_shaping(phi, game);
    const auto c = classify_shaping(f, game.gamma(), game.terminals());
    CHECK(c.is_potential);
    CHECK(c.max_residual <= 1e-10);

    StateId s = 0;  // first state is never terminal
    const StateId t = std::uniform_int_distribution<int>(0, game.num_states() - 1)(rng);
    f.at(0, s, t) += (unit(rng) < 0.5 ? -1.0 : 1.0) * (1e-3 + unit(rng));
    CHECK_FALSE(classify_shaping(f, game.gamma(), game.terminals()).is_potential);
  }
}

}  // namespace
}  // namespace sgshape
