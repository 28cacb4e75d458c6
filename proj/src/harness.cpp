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

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "sgshape/learn.hpp"
#include "sgshape/sg_solver.hpp"

namespace sgshape {

namespace {

struct MatrixSpec {
  MatrixGame game;
  std::vector<std::vector<std::string>> names;
};

std::optional<MatrixSpec> matrix_environment(const std::string& id) {
  if (id == "matching_pennies") {
    return MatrixSpec{matching_pennies(), {{"H", "T"}, {"H", "T"}}};
  }
  if (id == "prisoners_dilemma") {
    return MatrixSpec{prisoners_dilemma(), {{"C", "D"}, {"C", "D"}}};
  }
  if (id == "battle_of_the_sexes") {
    return MatrixSpec{battle_of_the_sexes(), {{"O", "F"}, {"O", "F"}}};
  }
  return std::nullopt;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPotentialRoundOff = 1e-12;

double median_episodes(std::vector<int> episodes) {
  if (episodes.empty()) return kInf;
  std::vector<double> x;
  for (int e : episodes) x.push_back(e < 0 ? kInf : e);
  std::sort(x.begin(), x.end());
  const size_t n = x.size();
  if (n % 2 == 1) return x[n / 2];
  const double a = x[n / 2 - 1], b = x[n / 2];
  return std::isinf(b) ? kInf : 0.5 * (a + b);
}

ArmSummary summarize(const std::string& arm, const std::vector<LearningCurve>& curves) {
  ArmSummary out;
  out.arm = arm;
  for (const auto& c : curves) {
    out.episodes_to_threshold.push_back(c.episodes_to_threshold);
    out.max_final_exploitability = std::max(out.max_final_exploitability, c.final_exploitability);
    out.verified_trials += c.final_verified ? 1 : 0;
  }
  out.median_episodes = median_episodes(out.episodes_to_threshold);
  return out;
}

// Learners of one trial, either all minimax-Q or all independent.
struct Learners {
  std::vector<MinimaxQAgent> minimax;
  std::vector<IndependentQAgent> independent;

  Learners(const ExperimentConfig& config, const StochasticGame& game) {
    for (int p = 0; p < game.num_players(); ++p) {
      if (config.agent == AgentKind::kMinimaxQ) {
        minimax.emplace_back(p, game, config.alpha_scale);
      } else {
        independent.emplace_back(p, game, config.alpha_scale);
      }
    }
  }

  int act(int p, StateId s, double eps, Rng& rng) {
    return minimax.empty() ? independent[p].act(s, eps, rng)
                           : minimax[p].act(s, eps, rng);
  }

  void update(int p, StateId s, const std::vector<int>& actions, double r,
              StateId next, bool terminal) {
    if (minimax.empty()) {
      independent[p].update(s, actions[p], r, next, terminal);
    } else {
      minimax[p].update(s, actions[p], actions[1 - p], r, next, terminal);
    }
  }

  double value(int p, StateId s) {
    return minimax.empty() ? independent[p].value(s) : minimax[p].value(s);
  }

  PolicyProfile profile() {
    PolicyProfile out;
    if (minimax.empty()) {
      for (const auto& a : independent) out.push_back(a.announced_policy());
    } else {
      for (auto& a : minimax) out.push_back(a.announced_policy());
    }
    return out;
  }
};

}  // namespace

double exploration_rate(const ExperimentConfig& config, int episode) {
  const double horizon = config.epsilon_decay_fraction * config.episodes;
  if (horizon <= 0.0 || episode >= horizon) return config.epsilon_end;
  const double t = episode / horizon;
  return config.epsilon_start + t * (config.epsilon_end - config.epsilon_start);
}

std::shared_ptr<const StochasticGame> experiment_game(const ExperimentConfig& config) {
  if (config.environment == "soccer") return grid_soccer(config.soccer_reset).game;
  if (auto spec = matrix_environment(config.environment)) {
    return std::make_shared<const StochasticGame>(
        repeated_game(spec->game, config.gamma, spec->names));
  }
  throw DomainError("unknown environment '" + config.environment + "'");
}

std::unique_ptr<Environment> experiment_environment(const ExperimentConfig& config) {
  if (config.environment == "soccer") return grid_soccer(config.soccer_reset).env;
  if (auto spec = matrix_environment(config.environment)) {
    return repeated_matrix_env(spec->game, config.gamma, spec->names);
  }
  throw DomainError("unknown environment '" + config.environment + "'");
}

LearningCurve run_trial(const ExperimentConfig& config, const StochasticGame& game,
                        const Environment& base_env, const PotentialSet& phi,
                        const ValueTable& reference, bool shaped, int trial) {
  LearningCurve curve;
  curve.arm = shaped ? "shaped" : "unshaped";
  curve.trial = trial;
  curve.seed = config.seed_base + static_cast<std::uint64_t>(trial);
  Rng rng(curve.seed);

  std::unique_ptr<Environment> env = base_env.clone();
  if (shaped) {
    env = std::make_unique<ShapedEnvironment>(std::move(env),
                                              potential_to_shaping(phi, game));
  }
  Learners learners(config, game);
  const int n_players = game.num_players();
  const auto& joint = game.joint_actions();
  std::vector<int> actions(n_players);

  auto evaluate = [&](int episodes_done) {
    const PolicyProfile profile = learners.profile();
    const NashReport report = verify_nash(game, profile, config.epsilon_learn);
    for (int p = 0; p < n_players; ++p) {
      LearningRecord rec;
      rec.arm = curve.arm;
      rec.trial = trial;
      rec.episode = episodes_done;
      rec.player = p;
      rec.exploitability = report.max_regret[p];
      double err = 0.0;
      for (StateId s = 0; s < game.num_states(); ++s) {
        const double offset = shaped ? phi.values[p][s] : 0.0;
        err = std::max(err, std::abs(learners.value(p, s) + offset - reference[p][s]));
      }
      rec.value_error = reference.empty() ? std::nan("") : err;
      curve.records.push_back(rec);
    }
    curve.final_exploitability = report.overall_max_regret;
    curve.final_verified = report.is_nash;
    if (curve.episodes_to_threshold < 0 && report.is_nash) {
      curve.episodes_to_threshold = episodes_done;
    }
  };

  for (int ep = 0; ep < config.episodes; ++ep) {
    const double eps = exploration_rate(config, ep);
    StateId s = env->reset(rng);
    for (int t = 0; t < config.max_steps; ++t) {
      for (int p = 0; p < n_players; ++p) actions[p] = learners.act(p, s, eps, rng);
      const StepResult step = env->step(joint.encode(actions), rng);
      const bool terminal = game.is_terminal(step.next);
      for (int p = 0; p < n_players; ++p) {
        learners.update(p, s, actions, step.rewards[p], step.next, terminal);
      }
      s = step.next;
      if (step.done) break;
    }
    if ((ep + 1) % config.eval_every == 0 || ep + 1 == config.episodes) {
      evaluate(ep + 1);
    }
  }
  if (config.episodes == 0) evaluate(0);
  return curve;
}

ComparisonResult run_comparison(const ExperimentConfig& config, Execution exec) {
  if (config.trials < 1 || config.episodes < 0 || config.eval_every < 1 ||
      config.max_steps < 1) {
    throw DomainError("trials, eval_every and max_steps must be positive");
  }
  const auto game = experiment_game(config);
  const auto env = experiment_environment(config);
  if (config.agent == AgentKind::kMinimaxQ && !is_zero_sum(*game)) {
    throw DomainError("minimax-Q needs a two-player zero-sum environment");
  }

  ComparisonResult result;
  // Reference equilibrium values, when a solver applies.
  if (is_zero_sum(*game) && game->gamma() < 1.0) {
    result.reference_values = shapley_value_iteration(*game, 1e-10, exec).values;
  } else if (game->num_states() - game->num_terminals() == 1) {
    const auto sols = solve_single_state(*game);
    if (!sols.empty()) result.reference_values = sols.front().values;
  }

  switch (config.potential) {
    case PotentialSource::kSolver:
      if (result.reference_values.empty()) {
        throw DomainError(
            "no solver applies to this environment; supply a potential file");
      }
      result.potential.values = result.reference_values;
      // Round-off far below the solver tolerance is dropped, so a game whose
      // values vanish (matching pennies) gets an exact no-op shaping.
      for (int p = 0; p < game->num_players(); ++p) {
        for (StateId s = 0; s < game->num_states(); ++s) {
          double& phi = result.potential.values[p][s];
          if (game->is_terminal(s) || std::abs(phi) < kPotentialRoundOff) phi = 0.0;
        }
      }
      break;
    case PotentialSource::kFile:
      if (!config.potential_values) throw DomainError("potential file not loaded");
      result.potential = *config.potential_values;
      check_potential(*game, result.potential);
      break;
    case PotentialSource::kZero:
      result.potential = PotentialSet::Zero(game->num_players(), game->num_states());
      break;
  }

  const int n = config.trials;
  std::vector<LearningCurve> curves(2 * n);
  std::vector<std::exception_ptr> errors(2 * n);
  parallel_for_dynamic(exec, 2 * n, [&](std::int64_t i) {
    const bool shaped = i < n;
    const int trial = static_cast<int>(i % n);
    try {
      curves[i] = run_trial(config, *game, *env, result.potential,
                            result.reference_values, shaped, trial);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.shaped.assign(curves.begin(), curves.begin() + n);
  result.unshaped.assign(curves.begin() + n, curves.end());

  auto& sum = result.summary;
  sum.shaped = summarize("shaped", result.shaped);
  sum.unshaped = summarize("unshaped", result.unshaped);
  sum.speedup = sum.unshaped.median_episodes / sum.shaped.median_episodes;
  sum.invariance_ok = sum.shaped.verified_trials == n && sum.unshaped.verified_trials == n;
  sum.shaped_verifies_when_unshaped_does = true;
  for (int t = 0; t < n; ++t) {
    if (result.unshaped[t].final_verified && !result.shaped[t].final_verified) {
      sum.shaped_verifies_when_unshaped_does = false;
    }
  }
  return result;
}

}  // namespace sgshape
