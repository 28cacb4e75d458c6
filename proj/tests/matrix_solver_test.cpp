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

#include "sgshape/matrix_solver.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sgshape/generators.hpp"
#include "sgshape/simplex.hpp"

namespace sgshape {
namespace {

constexpr double kTol = 1e-9;

MatrixGame random_zero_sum_matrix(Rng& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (auto& r : a) {
    for (double& x : r) x = u(rng);
  }
  return MatrixGame::ZeroSum(a);
}

// Brute force: every row/column guarantee checked against the claimed value.
void check_minimax_certificate(const MatrixGame& g, const MatrixEquilibrium& eq,
                               double tol) {
  const int rows = g.num_actions(0), cols = g.num_actions(1);
  const double v = eq.values[0];
  for (int c = 0; c < cols; ++c) {
    double payoff = 0.0;
    for (int r = 0; r < rows; ++r) payoff += eq.strategies[0][r] * g.payoff(0, r * cols + c);
    CHECK(payoff >= v - tol);
  }
  for (int r = 0; r < rows; ++r) {
    double payoff = 0.0;
    for (int c = 0; c < cols; ++c) payoff += eq.strategies[1][c] * g.payoff(0, r * cols + c);
    CHECK(payoff <= v + tol);
  }
}

TEST_CASE("solve_zero_sum on matching pennies") {
  const auto eq = solve_zero_sum(matching_pennies());
  CHECK(std::abs(eq.values[0]) < kTol);
  for (int p = 0; p < 2; ++p) {
    CHECK(eq.strategies[p][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eq.strategies[p][1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("solve_zero_sum breaks ties toward the first action") {
  const auto eq = solve_zero_sum(MatrixGame::ZeroSum({{2, 2}, {2, 2}}));
  CHECK(eq.values[0] == doctest::Approx(2.0));
  CHECK(eq.strategies[0] == std::vector<double>{1.0, 0.0});
  CHECK(eq.strategies[1] == std::vector<double>{1.0, 0.0});
}

TEST_CASE("solve_zero_sum finds the pure saddle") {
  const auto g = MatrixGame::ZeroSum({{3, 1}, {4, 2}});
  // Oracle: the entry that is the minimum of its row and the maximum of its
  // column.
  int saddle_r = -1, saddle_c = -1;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double x = g.payoff(0, r * 2 + c);
      const bool row_min = x <= g.payoff(0, r * 2 + (1 - c));
      const bool col_max = x >= g.payoff(0, (1 - r) * 2 + c);
      if (row_min && col_max) saddle_r = r, saddle_c = c;
    }
  }
  REQUIRE(saddle_r == 1);
  REQUIRE(saddle_c == 1);
  const auto eq = solve_zero_sum(g);
  CHECK(eq.values[0] == doctest::Approx(2.0));
  CHECK(eq.strategies[0][1] == doctest::Approx(1.0));
  CHECK(eq.strategies[1][1] == doctest::Approx(1.0));
}

TEST_CASE("solve_zero_sum rejects general-sum games") {
  CHECK_THROWS_AS(solve_zero_sum(prisoners_dilemma()), DomainError);
}

TEST_CASE("support enumeration on the prisoner's dilemma") {
  const auto g = prisoners_dilemma();
  // Oracle: brute-force best-response check of all four pure profiles.
  std::vector<int> stable;
  for (int j = 0; j < 4; ++j) {
    bool ok = true;
    for (int p = 0; p < 2; ++p) {
      for (int a = 0; a < 2; ++a) {
        ok = ok && g.payoff(p, g.joint().with_action(j, p, a)) <= g.payoff(p, j);
      }
    }
    if (ok) stable.push_back(j);
  }
  REQUIRE(stable == std::vector<int>{3});

  const auto eqs = support_enumeration(g);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].strategies[0] == std::vector<double>{0.0, 1.0});
  CHECK(eqs[0].strategies[1] == std::vector<double>{0.0, 1.0});
  CHECK(eqs[0].values[0] == doctest::Approx(1.0));
  CHECK(eqs[0].values[1] == doctest::Approx(1.0));
  CHECK(pure_equilibria(g) == stable);
}

TEST_CASE("support enumeration on battle of the sexes") {
  const auto eqs = support_enumeration(battle_of_the_sexes());
  REQUIRE(eqs.size() == 3);
  // Sorted by player 1's strategy: (0,1), (2/3,1/3), (1,0).
  CHECK(eqs[0].strategies[0][1] == doctest::Approx(1.0));
  CHECK(eqs[2].strategies[0][0] == doctest::Approx(1.0));
  const auto& mixed = eqs[1];
  CHECK(std::abs(mixed.strategies[0][0] - 2.0 / 3.0) <= 1e-9);
  CHECK(std::abs(mixed.strategies[0][1] - 1.0 / 3.0) <= 1e-9);
  CHECK(std::abs(mixed.strategies[1][0] - 1.0 / 3.0) <= 1e-9);
  CHECK(std::abs(mixed.strategies[1][1] - 2.0 / 3.0) <= 1e-9);
  CHECK(std::abs(mixed.values[0] - 2.0 / 3.0) <= 1e-9);
  CHECK(std::abs(mixed.values[1] - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("support enumeration agrees with the LP on matching pennies") {
  const auto eqs = support_enumeration(matching_pennies());
  REQUIRE(eqs.size() == 1);
  const auto lp = solve_zero_sum(matching_pennies());
  for (int p = 0; p < 2; ++p) {
    for (int a = 0; a < 2; ++a) {
      CHECK(eqs[0].strategies[p][a] == doctest::Approx(lp.strategies[p][a]));
    }
  }
}

TEST_CASE("pure equilibria") {
  CHECK(pure_equilibria(matching_pennies()).empty());
  const MatrixGame zero({2, 2, 2}, std::vector<std::vector<double>>(3, std::vector<double>(8, 0.0)));
  CHECK(pure_equilibria(zero).size() == 8);
}

TEST_CASE("best response regret") {
  const auto g = prisoners_dilemma();
  const StrategyProfile dd{{0, 1}, {0, 1}};
  const StrategyProfile cc{{1, 0}, {1, 0}};
  for (int p = 0; p < 2; ++p) {
    CHECK(best_response_regret(g, dd, p) == 0.0);
    CHECK(best_response_regret(g, cc, p) == doctest::Approx(2.0));
  }
  const MatrixGame constant({2, 3}, {{4, 4, 4, 4, 4, 4}, {1, 1, 1, 1, 1, 1}});
  CHECK(best_response_regret(constant, {{0.3, 0.7}, {0.2, 0.2, 0.6}}, 0) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(best_response_regret(g, {{0.5, 0.6}, {1, 0}}, 0), DomainError);
}

TEST_CASE("simplex survives a nearly degenerate matrix") {
  // Learned Q-values where one column dominates up to round-off.
  const std::vector<double> q{
      -0.65609407924633911, -0.72899980034919376, -0.8099999999986236,  -0.65609637161969214, -0.7289997786939133,
      -0.65609656449077847, -0.72899193841143195, -0.80999999999865646, -0.65608550871969606, -0.7289951477436134,
      -0.65609382245667103, -0.72899973003691576, -0.80999999999872618, -0.65604152207160527, -0.72899997579327913,
      -0.65609821729844131, -0.72899889557898279, -0.80999999999865624, -0.6560960949117276,  -0.7289985165393017,
      -0.65608730836467388, -0.72899867762740034, -0.8099999999987304,  -0.65606465647577006, -0.72899170930285129};
  const auto sol = solve_matrix_zero_sum(q, 5, 5);
  CHECK(std::abs(sol.value - -0.80999999999865624) <= 1e-11);
  CHECK(sol.col_strategy[2] == doctest::Approx(1.0));
}

TEST_CASE("property: LP and support enumeration agree on random zero-sum games") {
  Rng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const int rows = 2 + trial % 3;
    const int cols = 2 + (trial / 3) % 3;
    const auto g = random_zero_sum_matrix(rng, rows, cols);
    const auto lp = solve_zero_sum(g, 1e-9);
    check_minimax_certificate(g, lp, 1e-9);
    CHECK(lp.regrets[0] <= 1e-9);
    CHECK(lp.regrets[1] <= 1e-9);

    // Duality: solving the game from the column player's side.
    std::vector<double> transposed(rows * cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) transposed[c * rows + r] = -g.payoff(0, r * cols + c);
    }
    const auto dual = solve_matrix_zero_sum(transposed, cols, rows);
    CHECK(std::abs(dual.value + lp.values[0]) <= 1e-9);

    const auto eqs = support_enumeration(g, 1e-9);
    REQUIRE(!eqs.empty());
    bool match = false;
    for (const auto& eq : eqs) {
      CHECK(eq.regrets[0] <= 1e-9);
      CHECK(eq.regrets[1] <= 1e-9);
      match = match || std::abs(eq.values[0] - lp.values[0]) <= 1e-6;
    }
    CHECK(match);
  }
}

TEST_CASE("property: payoff translation shifts values and keeps strategies") {
  Rng rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<double>> a(3, std::vector<double>(3)), b = a;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        a[r][c] = u(rng);
        b[r][c] = u(rng);
      }
    }
    const double shift = u(rng);
    auto shifted = a;
    for (auto& row : shifted) {
      for (double& x : row) x += shift;
    }
    const auto base = support_enumeration(MatrixGame::Bimatrix(a, b));
    const auto moved = support_enumeration(MatrixGame::Bimatrix(shifted, b));
    REQUIRE(base.size() == moved.size());
    for (size_t k = 0; k < base.size(); ++k) {
      for (int p = 0; p < 2; ++p) {
        for (int i = 0; i < 3; ++i) {
          CHECK(std::abs(base[k].strategies[p][i] - moved[k].strategies[p][i]) <= 1e-9);
        }
      }
      CHECK(std::abs(moved[k].values[0] - base[k].values[0] - shift) <= 1e-9);
      CHECK(std::abs(moved[k].values[1] - base[k].values[1]) <= 1e-9);
    }
  }
}

}  // namespace
}  // namespace sgshape
