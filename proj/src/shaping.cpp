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
#include <optional>

#include <Eigen/Dense>

namespace sgshape {

ShapingFunction ShapingFunction::Zero(int num_players, int num_states) {
  ShapingFunction f;
  f.num_states = num_states;
  f.values.assign(num_players,
                  std::vector<double>(static_cast<size_t>(num_states) * num_states, 0.0));
  return f;
}

ShapingFunction ShapingFunction::negated() const {
  ShapingFunction f = *this;
  for (auto& table : f.values) {
    for (double& x : table) x = -x;
  }
  return f;
}

ShapingFunction potential_to_shaping(const PotentialSet& phi, double gamma,
                                     const std::vector<bool>& terminals) {
  const int n_states = static_cast<int>(terminals.size());
  ShapingFunction f = ShapingFunction::Zero(phi.num_players(), n_states);
  for (int p = 0; p < phi.num_players(); ++p) {
    if (static_cast<int>(phi.values[p].size()) != n_states) {
      throw DomainError("potential state count does not match");
    }
    for (StateId s = 0; s < n_states; ++s) {
      if (terminals[s] && phi.values[p][s] != 0.0) {
        throw DomainError("potential of player " + std::to_string(p) +
                          " must be 0 at terminal state " + std::to_string(s));
      }
    }
    for (StateId s = 0; s < n_states; ++s) {
      for (StateId t = 0; t < n_states; ++t) {
        f.at(p, s, t) = gamma * phi.values[p][t] - phi.values[p][s];
      }
    }
  }
  return f;
}

ShapingFunction potential_to_shaping(const PotentialSet& phi,
                                     const StochasticGame& game) {
  if (phi.num_players() != game.num_players()) {
    throw DomainError("potential player count does not match the game");
  }
  return potential_to_shaping(phi, game.gamma(), game.terminals());
}

ShapedGame apply_shaping(const StochasticGame& game,
                         const ShapingFunction& shaping) {
  if (shaping.num_players() != game.num_players() ||
      shaping.num_states != game.num_states()) {
    throw DomainError("shaping function dimensions do not match the game");
  }
  ShapedGame out;
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (!game.is_terminal(s)) continue;
    for (int p = 0; p < game.num_players(); ++p) {
      if (shaping.at(p, s, s) != 0.0) {
        out.warnings.push_back("shaping of player " + std::to_string(p) +
                               " on terminal self-loop " + game.state_name(s) +
                               " ignored; terminal rewards stay 0");
      }
    }
  }
  out.game = game.map_rewards(
      [&](int p, StateId s, int, StateId next, double r) {
        return game.is_terminal(s) ? r : r + shaping.at(p, s, next);
      });
  return out;
}

namespace {

// Largest reward difference between two games with identical structure;
// nullopt when the structure (names, transitions, terminals) differs.
std::optional<double> reward_distance(const StochasticGame& a,
                                      const StochasticGame& b) {
  if (a.num_players() != b.num_players() || a.num_states() != b.num_states() ||
      a.joint_actions() != b.joint_actions() || a.gamma() != b.gamma() ||
      a.terminals() != b.terminals()) {
    return std::nullopt;
  }
  double d = 0.0;
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (int j = 0; j < a.num_joint_actions(); ++j) {
      auto ra = a.outcomes(s, j);
      auto rb = b.outcomes(s, j);
      if (ra.size() != rb.size()) return std::nullopt;
      for (size_t k = 0; k < ra.size(); ++k) {
        if (ra[k].next != rb[k].next || ra[k].probability != rb[k].probability) {
          return std::nullopt;
        }
        for (int p = 0; p < a.num_players(); ++p) {
          d = std::max(d, std::abs(a.outcome_reward(p, s, j, static_cast<int>(k)) -
                                   b.outcome_reward(p, s, j, static_cast<int>(k))));
        }
      }
    }
  }
  return d;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

}  // namespace

OffsetReport check_offset_identities(const StochasticGame& m,
                                     const StochasticGame& m_prime,
                                     const PotentialSet& phi,
                                     const EquilibriumSolution& solution_m,
                                     double tol) {
  OffsetReport report;
  check_potential(m, phi);
  const ShapingFunction f = potential_to_shaping(phi, m);

  const StochasticGame expected = apply_shaping(m, f).game;
  const auto shaped_gap = reward_distance(expected, m_prime);
  report.shaped_game_matches = shaped_gap && *shaped_gap <= tol;
  if (!report.shaped_game_matches) {
    report.violations.push_back(
        "precondition: m_prime is not the potential shaping of m by phi");
  }

  const PolicyProfile& profile = solution_m.profile;
  const NashReport on_m = verify_nash(m, profile, tol);
  report.nash_on_m = on_m.is_nash;
  if (!report.nash_on_m) {
    report.violations.push_back(
        "precondition: solution is not an equilibrium of m (regret " +
        fmt(on_m.overall_max_regret) + ")");
  }

  const NashReport on_m_prime = verify_nash(m_prime, profile, 10.0 * tol);
  report.nash_on_m_prime = on_m_prime.is_nash;
  report.max_regret_m_prime = on_m_prime.overall_max_regret;
  if (!report.nash_on_m_prime) {
    report.violations.push_back("equilibrium of m does not verify on m_prime (regret " +
                                fmt(on_m_prime.overall_max_regret) + ")");
  }

  const ValueTable& v_prime = on_m_prime.profile_values;
  const QTable q_prime = q_from_v(m_prime, v_prime);
  for (int p = 0; p < m.num_players(); ++p) {
    for (StateId s = 0; s < m.num_states(); ++s) {
      const double shift = phi.values[p][s];
      report.max_value_residual =
          std::max(report.max_value_residual,
                   std::abs(v_prime[p][s] - (solution_m.values[p][s] - shift)));
      if (m.is_terminal(s)) continue;
      for (int j = 0; j < m.num_joint_actions(); ++j) {
        report.max_q_residual =
            std::max(report.max_q_residual,
                     std::abs(q_prime.at(p, s, j) - (solution_m.q.at(p, s, j) - shift)));
      }
    }
  }
  if (report.max_value_residual > tol) {
    report.violations.push_back("value offset residual " +
                                fmt(report.max_value_residual) + " exceeds tol");
  }
  if (report.max_q_residual > tol) {
    report.violations.push_back("Q offset residual " +
                                fmt(report.max_q_residual) + " exceeds tol");
  }

  // Reverse direction: removing the shaping restores m, and the equilibrium
  // of m_prime verifies there.
  const StochasticGame restored = apply_shaping(m_prime, f.negated()).game;
  const auto restore_gap = reward_distance(restored, m);
  report.unshaping_restores_m = restore_gap && *restore_gap <= tol;
  if (!report.unshaping_restores_m) {
    report.violations.push_back("removing the shaping does not restore m");
  }
  report.nash_restored_on_m =
      report.nash_on_m_prime && verify_nash(restored, profile, 10.0 * tol).is_nash;
  if (report.nash_on_m_prime && !report.nash_restored_on_m) {
    report.violations.push_back(
        "equilibrium of m_prime does not verify on the restored game");
  }
  return report;
}

ValuePotentialReport check_value_potential_identity(
    const StochasticGame& m, const EquilibriumSolution& solution_m, double tol) {
  ValuePotentialReport report;
  report.phi.values = solution_m.values;
  for (int p = 0; p < m.num_players(); ++p) {
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (m.is_terminal(s)) report.phi.values[p][s] = 0.0;
    }
  }
  const StochasticGame m_prime =
      apply_shaping(m, potential_to_shaping(report.phi, m)).game;
  for (int p = 0; p < m.num_players(); ++p) {
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (m.is_terminal(s)) continue;
      for (int j = 0; j < m.num_joint_actions(); ++j) {
        const double q_prime = solution_m.q.at(p, s, j) - report.phi.values[p][s];
        const double one_step = m_prime.expected_reward(p, s, j);
        report.max_residual =
            std::max(report.max_residual, std::abs(q_prime - one_step));
      }
    }
  }
  report.passed = report.max_residual <= tol;
  return report;
}

ShapingClassification classify_shaping(const ShapingFunction& f, double gamma,
                                       const std::vector<bool>& terminals,
                                       double tol) {
  const int n_states = f.num_states;
  if (static_cast<int>(terminals.size()) != n_states) {
    throw DomainError("terminal mask does not match the shaping function");
  }
  std::vector<int> index(n_states, -1);
  int unknowns = 0;
  for (StateId s = 0; s < n_states; ++s) {
    if (!terminals[s]) index[s] = unknowns++;
  }

  ShapingClassification out;
  PotentialSet phi = PotentialSet::Zero(f.num_players(), n_states);
  for (int p = 0; p < f.num_players(); ++p) {
    if (unknowns > 0) {
      // Normal equations of the pairwise system; every row has at most two
      // nonzeros, so they are accumulated directly.
      Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(unknowns, unknowns);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
      for (StateId s = 0; s < n_states; ++s) {
        for (StateId t = 0; t < n_states; ++t) {
          std::pair<int, double> coef[2];
          int nnz = 0;
          if (index[s] >= 0) coef[nnz++] = {index[s], -1.0};
          if (index[t] >= 0) {
            if (nnz == 1 && coef[0].first == index[t]) {
              coef[0].second += gamma;
            } else {
              coef[nnz++] = {index[t], gamma};
            }
          }
          for (int a = 0; a < nnz; ++a) {
            rhs(coef[a].first) += coef[a].second * f.at(p, s, t);
            for (int b = 0; b < nnz; ++b) {
              normal(coef[a].first, coef[b].first) += coef[a].second * coef[b].second;
            }
          }
        }
      }
      Eigen::VectorXd x = normal.completeOrthogonalDecomposition().solve(rhs);
      for (StateId s = 0; s < n_states; ++s) {
        if (index[s] >= 0) phi.values[p][s] = x(index[s]);
      }
    }
    for (StateId s = 0; s < n_states; ++s) {
      for (StateId t = 0; t < n_states; ++t) {
        const double fitted = gamma * phi.values[p][t] - phi.values[p][s];
        out.max_residual = std::max(out.max_residual, std::abs(f.at(p, s, t) - fitted));
      }
    }
  }
  out.is_potential = out.max_residual <= tol;
  if (out.is_potential) out.phi = std::move(phi);
  return out;
}

NecessityInstance build_necessity_counterexample(
    double delta, double gamma, const std::optional<ShapingFunction>& f1,
    int num_players) {
  if (delta == 0.0 || !std::isfinite(delta)) {
    throw DomainError(
        "delta must be nonzero: F is potential-based on this structure; no "
        "counterexample exists");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("gamma must lie in (0, 1]");
  }
  if (num_players < 1) throw DomainError("need at least one player");

  std::vector<std::vector<std::string>> actions{{"a1^1", "a1^2"}};
  for (int p = 1; p < num_players; ++p) {
    actions.push_back({"a" + std::to_string(p + 1)});
  }
  GameBuilder builder({"s1", "s2", "s3"}, actions, gamma);
  builder.set_terminal(kNecessityS3);
  const auto& joint = builder.joint_actions();
  for (int j = 0; j < joint.size(); ++j) {
    const bool direct = joint.action_of(j, 0) == 0;
    builder.set_transition(kNecessityS1, j, direct ? kNecessityS3 : kNecessityS2, 1.0);
    if (direct) builder.set_reward(0, kNecessityS1, j, kNecessityS3, delta / 2.0);
    builder.set_transition(kNecessityS2, j, kNecessityS3, 1.0);
  }
  builder.make_terminals_absorbing();

  NecessityInstance inst;
  inst.delta = delta;
  inst.gamma = gamma;
  inst.game_m = builder.build();
  inst.shaping = ShapingFunction::Zero(num_players, 3);
  if (f1) {
    if (f1->num_states != 3 || f1->num_players() < 1) {
      throw DomainError("player 1 shaping must be defined on 3 states");
    }
    inst.shaping.values[0] = f1->values[0];
  } else {
    inst.shaping.at(0, kNecessityS1, kNecessityS3) = -delta;
  }
  const ShapingFunction& f = inst.shaping;
  const double f12 = f.at(0, kNecessityS1, kNecessityS2);
  const double f23 = f.at(0, kNecessityS2, kNecessityS3);
  const double f13 = f.at(0, kNecessityS1, kNecessityS3);
  // With Phi(s_i) = -F(s_i, s3) the deviation from potential form on
  // (s1, s2) is F(s1,s2) - [gamma Phi(s2) - Phi(s1)].
  const double implied = f12 + gamma * f23 - f13;
  if (std::abs(implied - delta) > 1e-12 * std::max(1.0, std::abs(delta))) {
    throw DomainError("supplied shaping realizes delta = " + std::to_string(implied) +
                      ", not " + std::to_string(delta));
  }
  inst.game_m_prime = apply_shaping(inst.game_m, f).game;
  inst.expected_action_m = delta > 0.0 ? 0 : 1;
  inst.expected_action_m_prime = delta > 0.0 ? 1 : 0;
  inst.predicted_q_prime_direct = f12 + gamma * f23 - delta / 2.0;
  inst.predicted_q_prime_detour = f12 + gamma * f23;
  return inst;
}

}  // namespace sgshape
