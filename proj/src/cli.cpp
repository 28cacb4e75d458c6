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

#include "sgshape/cli.hpp"

#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgshape/io.hpp"
#include "sgshape/learn.hpp"
#include "sgshape/sg_solver.hpp"
#include "sgshape/shaping.hpp"

namespace sgshape {

namespace {

namespace fs = std::filesystem;

// Shortest round-trip text of a double, as in the data files.
std::string num(double x) { return nlohmann::json(x).dump(); }

// Thrown for negative verdicts that end a command early.
struct NegativeResult {
  std::string message;
};

struct Solved {
  std::vector<EquilibriumSolution> solutions;
  std::string method;
};

// Zero-sum two-player games go to Shapley iteration, single-state games to
// the matrix solvers, everything else to the pure stationary search.
Solved solve_any(const StochasticGame& game, double eps) {
  Solved out;
  if (game.num_players() == 2 && is_zero_sum(game)) {
    out.method = to_string(SolutionMethod::kShapleyLp);
    out.solutions.push_back(shapley_value_iteration(game, eps));
    return out;
  }
  if (game.num_states() - game.num_terminals() == 1) {
    try {
      out.solutions = solve_single_state(game, eps);
      out.method = to_string(SolutionMethod::kSingleState);
      return out;
    } catch (const DomainError&) {
      // The state does not loop to itself; fall through to the search.
    }
  }
  out.method = to_string(SolutionMethod::kPureSearch);
  for (auto& profile : pure_stationary_equilibria(game, eps)) {
    out.solutions.push_back(make_solution(game, std::move(profile),
                                          SolutionMethod::kPureSearch, eps));
  }
  return out;
}

void print_solution(std::ostream& out, const StochasticGame& game,
                    const EquilibriumSolution& sol) {
  for (StateId s = 0; s < game.num_states(); ++s) {
    out << "  " << game.state_name(s) << (game.is_terminal(s) ? " (terminal)" : "") << "\n";
    for (int p = 0; p < game.num_players(); ++p) {
      out << "    player " << p << ": ";
      for (int a = 0; a < game.num_actions(p); ++a) {
        out << (a == 0 ? "" : ", ") << game.action_name(p, a) << " "
            << num(sol.profile[p].prob(s, a));
      }
      out << " | value " << num(sol.values[p][s]) << " | regret "
          << num(sol.regrets[p][s]) << "\n";
    }
  }
  out << "  max regret " << num(sol.max_regret) << "\n";
}

int cmd_solve(const std::string& game_path, double eps,
              const std::string& profile_out, std::ostream& out) {
  const StochasticGame game = parse_game(game_path);
  Solved solved;
  try {
    solved = solve_any(game, eps);
  } catch (const SizeError& e) {
    throw NegativeResult{std::string("no applicable solver: ") + e.what()};
  }
  out << "method: " << solved.method << "\n";
  out << "equilibria: " << solved.solutions.size() << "\n";
  if (solved.solutions.empty()) {
    throw NegativeResult{"no equilibrium found"};
  }
  for (size_t k = 0; k < solved.solutions.size(); ++k) {
    out << "equilibrium " << k + 1 << "\n";
    print_solution(out, game, solved.solutions[k]);
  }
  if (!profile_out.empty()) {
    write_text(profile_out, profile_to_text(solved.solutions.front().profile, game));
  }
  return kExitOk;
}

int cmd_shape(const std::string& game_path, const std::string& potential_path,
              const std::string& output, const std::string& classify_path,
              const std::string& phi_out, std::ostream& out) {
  const StochasticGame game = parse_game(game_path);
  if (potential_path.empty() && classify_path.empty()) {
    throw InputError("shape needs --potential or --classify");
  }
  int code = kExitOk;
  if (!potential_path.empty()) {
    if (output.empty()) throw InputError("shape --potential needs -o <file>");
    const PotentialSet phi = parse_potential(potential_path, game);
    const ShapedGame shaped = apply_shaping(game, potential_to_shaping(phi, game));
    for (const auto& w : shaped.warnings) out << "warning: " << w << "\n";
    serialize_game(shaped.game, output);
    out << "wrote " << output << "\n";
  }
  if (!classify_path.empty()) {
    const ShapingFunction f = parse_shaping(classify_path, game);
    const auto verdict = classify_shaping(f, game.gamma(), game.terminals());
    out << "potential-based: " << (verdict.is_potential ? "yes" : "no") << "\n";
    out << "residual: " << num(verdict.max_residual) << "\n";
    if (verdict.is_potential && !phi_out.empty()) {
      write_text(phi_out, potential_to_text(*verdict.phi, game));
    }
    if (!verdict.is_potential) code = kExitNegative;
  }
  return code;
}

int cmd_verify(const std::string& game_path, const std::string& profile_path, double eps,
               std::ostream& out) {
  const StochasticGame game = parse_game(game_path);
  const PolicyProfile profile = parse_profile(profile_path, game);
  const NashReport report = verify_nash(game, profile, eps);
  for (int p = 0; p < game.num_players(); ++p) {
    out << "player " << p << ": max regret " << num(report.max_regret[p]) << "\n";
  }
  out << "nash at eps " << num(eps) << ": " << (report.is_nash ? "yes" : "no") << "\n";
  return report.is_nash ? kExitOk : kExitNegative;
}

struct InvarianceArgs {
  std::string game;
  std::string potential;
  std::string shaping;
  std::string shaped_game;
  bool value_potential = false;
  double tol = 1e-6;
};

int cmd_invariance(const InvarianceArgs& args, std::ostream& out) {
  const StochasticGame m = parse_game(args.game);
  const int sources = !args.potential.empty() + !args.shaping.empty() + args.value_potential;
  if (sources != 1) {
    throw InputError("invariance needs exactly one of --potential, --shaping, --value-potential");
  }
  Solved solved;
  try {
    solved = solve_any(m, 1e-10);
  } catch (const SizeError& e) {
    throw NegativeResult{std::string("no applicable solver for M: ") + e.what()};
  }
  if (solved.solutions.empty()) throw NegativeResult{"M has no equilibrium to carry over"};
  const EquilibriumSolution& sol = solved.solutions.front();
  out << "equilibrium of M: " << solved.method << ", max regret " << num(sol.max_regret)
      << "\n";

  PotentialSet phi;
  std::optional<ShapingFunction> f;
  if (!args.potential.empty()) {
    phi = parse_potential(args.potential, m);
  } else if (!args.shaping.empty()) {
    f = parse_shaping(args.shaping, m);
    const auto verdict = classify_shaping(*f, m.gamma(), m.terminals());
    out << "potential-based: " << (verdict.is_potential ? "yes" : "no") << " (residual "
        << num(verdict.max_residual) << ")\n";
    if (!verdict.is_potential) {
      throw NegativeResult{"shaping is not potential-based; equilibria need not carry over"};
    }
    phi = *verdict.phi;
  } else {
    phi.values = sol.values;
    for (int p = 0; p < m.num_players(); ++p) {
      for (StateId s = 0; s < m.num_states(); ++s) {
        if (m.is_terminal(s)) phi.values[p][s] = 0.0;
      }
    }
  }
  if (!f) f = potential_to_shaping(phi, m);
  const StochasticGame m_prime =
      args.shaped_game.empty() ? apply_shaping(m, *f).game : parse_game(args.shaped_game);

  const OffsetReport report = check_offset_identities(m, m_prime, phi, sol, args.tol);
  out << "max |V' - (V - Phi)|: " << num(report.max_value_residual) << "\n";
  out << "max |Q' - (Q - Phi)|: " << num(report.max_q_residual) << "\n";
  out << "max regret on M': " << num(report.max_regret_m_prime) << "\n";
  bool ok = report.passed();
  for (const auto& v : report.violations) out << "violation: " << v << "\n";
  if (args.value_potential) {
    const auto vp = check_value_potential_identity(m, sol, args.tol);
    out << "max |Q' - E[R + F]| with Phi = V: " << num(vp.max_residual) << "\n";
    ok = ok && vp.passed;
  }
  out << "invariance: " << (ok ? "holds" : "fails") << "\n";
  return ok ? kExitOk : kExitNegative;
}

// Player 1's action at s1 in every pure equilibrium, or -1 when they differ.
int s1_choice(const std::vector<PolicyProfile>& eqs) {
  int choice = -2;
  for (const auto& profile : eqs) {
    const int a = profile[0].prob(kNecessityS1, 1) > 0.5 ? 1 : 0;
    choice = choice == -2 ? a : (choice == a ? a : -1);
  }
  return choice;
}

int cmd_counterexample(double delta, double gamma, int players, const std::string& dir,
                       std::ostream& out) {
  const NecessityInstance inst = build_necessity_counterexample(delta, gamma, {}, players);
  const auto& m = inst.game_m;
  const auto eq_m = pure_stationary_equilibria(m, 1e-9);
  const auto eq_mp = pure_stationary_equilibria(inst.game_m_prime, 1e-9);
  const int got_m = s1_choice(eq_m), got_mp = s1_choice(eq_mp);
  auto name = [&](int a) { return a < 0 ? std::string("(none/mixed)") : m.action_name(0, a); };
  const bool confirmed = got_m == inst.expected_action_m &&
                         got_mp == inst.expected_action_m_prime && got_m != got_mp;

  std::ostringstream report;
  report << "delta: " << num(delta) << "\n";
  report << "gamma: " << num(gamma) << "\n";
  report << "players: " << players << "\n";
  report << "predicted Q'_1(s1, " << m.action_name(0, 0) << "): "
         << num(inst.predicted_q_prime_direct) << "\n";
  report << "predicted Q'_1(s1, " << m.action_name(0, 1) << "): "
         << num(inst.predicted_q_prime_detour) << "\n";
  report << "M: expected " << name(inst.expected_action_m) << " at s1; " << eq_m.size()
         << " pure equilibria play " << name(got_m) << "\n";
  report << "M': expected " << name(inst.expected_action_m_prime) << " at s1; "
         << eq_mp.size() << " pure equilibria play " << name(got_mp) << "\n";
  report << "flip confirmed: " << (confirmed ? "yes" : "no") << "\n";
  out << report.str();

  if (!dir.empty()) {
    fs::create_directories(dir);
    serialize_game(m, fs::path(dir) / "M.json");
    serialize_game(inst.game_m_prime, fs::path(dir) / "M_prime.json");
    write_text(fs::path(dir) / "shaping.json", shaping_to_text(inst.shaping, m));
    write_text(fs::path(dir) / "report.txt", report.str());
  }
  return confirmed ? kExitOk : kExitNegative;
}

struct LearnArgs {
  std::string config;
  std::string out_dir;
  std::optional<int> trials;
  std::optional<int> episodes;
  bool serial = false;
};

int cmd_learn(const LearnArgs& args, std::optional<std::uint64_t> seed, std::ostream& out) {
  LearnJob job = parse_learn_job(args.config);
  ExperimentConfig& config = job.config;
  if (seed) config.seed_base = *seed;
  if (args.trials) config.trials = *args.trials;
  if (args.episodes) config.episodes = *args.episodes;
  const fs::path dir = args.out_dir.empty() ? fs::path(".") : fs::path(args.out_dir);
  fs::create_directories(dir);

  const ComparisonResult result =
      run_comparison(config, args.serial ? Execution::kSerial : Execution::kParallel);
  std::vector<LearningCurve> curves = result.shaped;
  curves.insert(curves.end(), result.unshaped.begin(), result.unshaped.end());
  emit_csv(curves, dir / job.curves_file);
  write_text(dir / job.summary_file, summary_json(result, config));

  const auto& sum = result.summary;
  for (const ArmSummary* arm : {&sum.shaped, &sum.unshaped}) {
    out << arm->arm << ": median episodes to threshold " << num(arm->median_episodes)
        << ", verified " << arm->verified_trials << "/" << config.trials
        << ", max final exploitability " << num(arm->max_final_exploitability) << "\n";
  }
  out << "speedup (unshaped / shaped median): " << num(sum.speedup) << "\n";
  out << "invariance: " << (sum.invariance_ok ? "holds" : "fails") << "\n";
  return sum.invariance_ok ? kExitOk : kExitNegative;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potential-based shaping for stochastic games", "sgshape"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override every configured seed");

  auto* solve = app.add_subcommand("solve", "Solve a game and print its equilibria");
  std::string game_path, profile_out;
  double eps = kRegretTolerance;
  solve->add_option("game", game_path, "Game file")->required();
  solve->add_option("--eps", eps, "Regret tolerance");
  solve->add_option("--profile-out", profile_out, "Write the first equilibrium profile here");

  auto* shape = app.add_subcommand("shape", "Shape a game or classify a shaping function");
  std::string potential_path, output, classify_path, phi_out;
  shape->add_option("game", game_path, "Game file")->required();
  shape->add_option("--potential", potential_path, "Potential file");
  shape->add_option("-o,--output", output, "Where to write the shaped game");
  shape->add_option("--classify", classify_path, "Shaping function file to classify");
  shape->add_option("--phi-out", phi_out, "Write the recovered potential here");

  auto* verify = app.add_subcommand("verify", "Check a profile for Nash equilibrium");
  std::string profile_path;
  double verify_eps = 1e-8;
  verify->add_option("game", game_path, "Game file")->required();
  verify->add_option("--profile", profile_path, "Profile file")->required();
  verify->add_option("--eps", verify_eps, "Regret tolerance");

  auto* invariance = app.add_subcommand("invariance", "Check that equilibria survive shaping");
  InvarianceArgs inv;
  invariance->add_option("game", inv.game, "Game file")->required();
  invariance->add_option("--potential", inv.potential, "Potential file");
  invariance->add_option("--shaping", inv.shaping, "Shaping function file");
  invariance->add_flag("--value-potential", inv.value_potential,
                       "Use the equilibrium values of M as the potential");
  invariance->add_option("--shaped-game", inv.shaped_game, "Shaped game to check instead of "
                                                           "shaping M");
  invariance->add_option("--tol", inv.tol, "Identity tolerance");

  auto* counter = app.add_subcommand("counterexample",
                                     "Build a non-potential shaping that changes the equilibrium");
  double delta = 0.0, gamma = 0.9;
  int players = 2;
  std::string counter_dir;
  counter->add_option("--delta", delta, "Deviation from potential form")->required();
  counter->add_option("--gamma", gamma, "Discount factor");
  counter->add_option("--players", players, "Number of players");
  counter->add_option("-o,--output", counter_dir, "Directory for M, M' and the report");

  auto* learn = app.add_subcommand("learn", "Compare shaped and unshaped learners");
  LearnArgs la;
  learn->add_option("config", la.config, "Experiment config file")->required();
  learn->add_option("-o,--output", la.out_dir, "Output directory");
  learn->add_option("--trials", la.trials, "Override the trial count");
  learn->add_option("--episodes", la.episodes, "Override the episode budget");
  learn->add_flag("--serial", la.serial, "Run trials one after another");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(game_path, eps, profile_out, out);
    if (shape->parsed()) {
      return cmd_shape(game_path, potential_path, output, classify_path, phi_out, out);
    }
    if (verify->parsed()) return cmd_verify(game_path, profile_path, verify_eps, out);
    if (invariance->parsed()) return cmd_invariance(inv, out);
    if (counter->parsed()) return cmd_counterexample(delta, gamma, players, counter_dir, out);
    if (learn->parsed()) return cmd_learn(la, seed, out);
  } catch (const NegativeResult& e) {
    out << e.message << "\n";
    return kExitNegative;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace sgshape
