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

#include "sgshape/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace sgshape {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw InputError(source + ": " + what);
}

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(source, std::string("syntax error: ") + e.what());
  }
}

// Rejects unknown keys and a missing or wrong version.
void check_header(const Json& doc, const std::string& source,
                  const std::set<std::string>& allowed) {
  if (!doc.is_object()) fail(source, "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "version" && !allowed.contains(key)) fail(source, "unknown key '" + key + "'");
  }
  if (!doc.contains("version")) fail(source, "missing \"version\"");
  if (doc["version"] != kFormatVersion) {
    fail(source, "unsupported version " + doc["version"].dump() + " (expected \"1\")");
  }
}

template <typename T>
T get(const Json& node, const char* key, const std::string& source) {
  if (!node.contains(key)) fail(source, std::string("missing \"") + key + "\"");
  try {
    return node.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(source, std::string("bad \"") + key + "\": " + e.what());
  }
}

std::string num(double x) { return Json(x).dump(); }
std::string str(const std::string& s) { return Json(s).dump(); }

StateId state_index(const StochasticGame& game, const std::string& name,
                    const std::string& source) {
  const StateId s = game.find_state(name);
  if (s < 0) fail(source, "unknown state '" + name + "'");
  return s;
}

int joint_index(const JointActionSpace& joint,
                const std::vector<std::vector<std::string>>& names, const Json& node,
                const std::string& source) {
  if (!node.is_array() || static_cast<int>(node.size()) != joint.num_players()) {
    fail(source, "joint action must list one action per player: " + node.dump());
  }
  std::vector<int> actions;
  for (int p = 0; p < joint.num_players(); ++p) {
    if (!node[p].is_string()) fail(source, "action names must be strings: " + node.dump());
    const auto& list = names[p];
    const auto it = std::find(list.begin(), list.end(), node[p].get<std::string>());
    if (it == list.end()) {
      fail(source, "unknown action '" + node[p].get<std::string>() + "' for player " +
                       std::to_string(p));
    }
    actions.push_back(static_cast<int>(it - list.begin()));
  }
  return joint.encode(actions);
}

std::string joint_names(const StochasticGame& game, int j) {
  const auto actions = game.joint_actions().decode(j);
  std::string out = "[";
  for (size_t p = 0; p < actions.size(); ++p) {
    if (p > 0) out += ",";
    out += str(game.action_name(static_cast<int>(p), actions[p]));
  }
  return out + "]";
}

void check_unique(const std::vector<std::string>& names, const std::string& what,
                  const std::string& source) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) fail(source, "duplicate " + what + " '" + n + "'");
  }
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw InputError(path.string() + ": write failed");
}

// ---------------------------------------------------------------------------
// Games

StochasticGame game_from_text(std::string_view text, const std::string& source) {
  const Json doc = parse_json(text, source);
  check_header(doc, source, {"players", "gamma", "states", "actions", "terminals",
                             "transitions", "rewards"});
  const auto states = get<std::vector<std::string>>(doc, "states", source);
  const auto actions = get<std::vector<std::vector<std::string>>>(doc, "actions", source);
  const double gamma = get<double>(doc, "gamma", source);
  if (states.empty()) fail(source, "no states");
  if (actions.empty()) fail(source, "no players");
  if (doc.contains("players") && get<int>(doc, "players", source) != static_cast<int>(actions.size())) {
    fail(source, "\"players\" disagrees with the action lists");
  }
  check_unique(states, "state", source);
  for (const auto& list : actions) {
    if (list.empty()) fail(source, "every player needs at least one action");
    check_unique(list, "action", source);
  }

  GameBuilder builder(states, actions, gamma);
  auto find = [&](const std::string& name) {
    const auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) fail(source, "unknown state '" + name + "'");
    return static_cast<StateId>(it - states.begin());
  };
  if (doc.contains("terminals")) {
    for (const auto& name : get<std::vector<std::string>>(doc, "terminals", source)) {
      builder.set_terminal(find(name));
    }
  }
  const JointActionSpace& joint = builder.joint_actions();
  std::set<std::tuple<StateId, int, StateId>> seen;
  if (!doc["transitions"].is_array()) fail(source, "\"transitions\" must be a list");
  for (const Json& e : doc["transitions"]) {
    const StateId s = find(get<std::string>(e, "state", source));
    const int j = joint_index(joint, actions, get<Json>(e, "joint", source), source);
    const StateId next = find(get<std::string>(e, "next", source));
    if (!seen.insert({s, j, next}).second) fail(source, "duplicate transition " + e.dump());
    builder.set_transition(s, j, next, get<double>(e, "p", source));
  }
  if (doc.contains("rewards")) {
    if (!doc["rewards"].is_array()) fail(source, "\"rewards\" must be a list");
    std::set<std::tuple<int, StateId, int, StateId>> rewarded;
    for (const Json& e : doc["rewards"]) {
      const int p = get<int>(e, "player", source);
      if (p < 0 || p >= static_cast<int>(actions.size())) {
        fail(source, "player out of range in " + e.dump());
      }
      const StateId s = find(get<std::string>(e, "state", source));
      const int j = joint_index(joint, actions, get<Json>(e, "joint", source), source);
      const StateId next = find(get<std::string>(e, "next", source));
      if (!rewarded.insert({p, s, j, next}).second) fail(source, "duplicate reward " + e.dump());
      builder.set_reward(p, s, j, next, get<double>(e, "value", source));
    }
  }

  StochasticGame game = builder.build();
  const auto violations = validate_game(game);
  if (!violations.empty()) {
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += "\n  [" + v.rule + "] " + v.message;
    fail(source, msg);
  }
  return game;
}

std::string game_to_text(const StochasticGame& game) {
  std::ostringstream out;
  out << "{\n  \"version\": \"" << kFormatVersion << "\",\n";
  out << "  \"players\": " << game.num_players() << ",\n";
  out << "  \"gamma\": " << num(game.gamma()) << ",\n";
  out << "  \"states\": " << Json(game.state_names()).dump() << ",\n";
  out << "  \"actions\": " << Json(game.action_names()).dump() << ",\n";
  std::vector<std::string> terminals;
  for (StateId s = 0; s < game.num_states(); ++s) {
    if (game.is_terminal(s)) terminals.push_back(game.state_name(s));
  }
  out << "  \"terminals\": " << Json(terminals).dump() << ",\n";

  std::vector<std::string> transitions, rewards;
  for (StateId s = 0; s < game.num_states(); ++s) {
    for (int j = 0; j < game.num_joint_actions(); ++j) {
      const auto row = game.outcomes(s, j);
      const std::string where = "\"state\":" + str(game.state_name(s)) +
                                ",\"joint\":" + joint_names(game, j);
      for (size_t k = 0; k < row.size(); ++k) {
        const std::string next = ",\"next\":" + str(game.state_name(row[k].next));
        transitions.push_back("{" + where + next + ",\"p\":" + num(row[k].probability) + "}");
        for (int p = 0; p < game.num_players(); ++p) {
          const double r = game.outcome_reward(p, s, j, static_cast<int>(k));
          if (r == 0.0) continue;
          rewards.push_back("{\"player\":" + std::to_string(p) + "," + where + next +
                            ",\"value\":" + num(r) + "}");
        }
      }
    }
  }
  auto list = [&](const char* key, const std::vector<std::string>& items, bool last) {
    out << "  \"" << key << "\": [";
    for (size_t i = 0; i < items.size(); ++i) {
      out << (i == 0 ? "\n    " : ",\n    ") << items[i];
    }
    out << (items.empty() ? "]" : "\n  ]") << (last ? "\n" : ",\n");
  };
  list("transitions", transitions, false);
  list("rewards", rewards, true);
  out << "}\n";
  return out.str();
}

StochasticGame parse_game(const std::filesystem::path& path) {
  return game_from_text(read_text(path), path.string());
}

void serialize_game(const StochasticGame& game, const std::filesystem::path& path) {
  write_text(path, game_to_text(game));
}

// ---------------------------------------------------------------------------
// Potentials, profiles, shaping functions

namespace {

const Json& player_list(const Json& doc, const char* key, const StochasticGame& game,
                        const std::string& source) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    fail(source, std::string("\"") + key + "\" must be a list with one entry per player");
  }
  if (static_cast<int>(doc[key].size()) != game.num_players()) {
    fail(source, std::string("\"") + key + "\" has " + std::to_string(doc[key].size()) +
                     " players, the game has " + std::to_string(game.num_players()));
  }
  return doc[key];
}

}  // namespace

PotentialSet potential_from_text(std::string_view text, const StochasticGame& game,
                                 const std::string& source) {
  const Json doc = parse_json(text, source);
  check_header(doc, source, {"potential"});
  const Json& players = player_list(doc, "potential", game, source);
  PotentialSet phi = PotentialSet::Zero(game.num_players(), game.num_states());
  for (int p = 0; p < game.num_players(); ++p) {
    if (!players[p].is_object()) fail(source, "potential of each player must be an object");
    for (const auto& [name, value] : players[p].items()) {
      if (!value.is_number()) fail(source, "potential of '" + name + "' is not a number");
      const StateId s = state_index(game, name, source);
      phi.values[p][s] = value.get<double>();
      if (game.is_terminal(s) && phi.values[p][s] != 0.0) {
        fail(source, "terminal state '" + name + "' must have potential 0 (player " +
                         std::to_string(p) + ")");
      }
    }
  }
  return phi;
}

std::string potential_to_text(const PotentialSet& phi, const StochasticGame& game) {
  check_potential(game, phi);
  std::ostringstream out;
  out << "{\n  \"version\": \"" << kFormatVersion << "\",\n  \"potential\": [";
  for (int p = 0; p < phi.num_players(); ++p) {
    out << (p == 0 ? "\n    {" : ",\n    {");
    for (StateId s = 0; s < game.num_states(); ++s) {
      out << (s == 0 ? "" : ",") << str(game.state_name(s)) << ":" << num(phi.values[p][s]);
    }
    out << "}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

PotentialSet parse_potential(const std::filesystem::path& path, const StochasticGame& game) {
  return potential_from_text(read_text(path), game, path.string());
}

PolicyProfile profile_from_text(std::string_view text, const StochasticGame& game,
                                const std::string& source) {
  const Json doc = parse_json(text, source);
  check_header(doc, source, {"profile"});
  const Json& players = player_list(doc, "profile", game, source);
  PolicyProfile profile;
  for (int p = 0; p < game.num_players(); ++p) {
    const int n_actions = game.num_actions(p);
    Policy policy(game.num_states(), n_actions);
    if (!players[p].is_object()) fail(source, "policy of each player must be an object");
    for (const auto& [name, dist_node] : players[p].items()) {
      const StateId s = state_index(game, name, source);
      std::vector<double> dist(n_actions, 0.0);
      if (dist_node.is_array()) {
        if (static_cast<int>(dist_node.size()) != n_actions) {
          fail(source, "state '" + name + "': expected " + std::to_string(n_actions) +
                           " probabilities for player " + std::to_string(p));
        }
        for (int a = 0; a < n_actions; ++a) {
          if (!dist_node[a].is_number()) fail(source, "state '" + name + "': bad probability");
          dist[a] = dist_node[a].get<double>();
        }
      } else if (dist_node.is_object()) {
        for (const auto& [action, prob] : dist_node.items()) {
          const int a = game.find_action(p, action);
          if (a < 0) {
            fail(source, "unknown action '" + action + "' for player " + std::to_string(p));
          }
          if (!prob.is_number()) fail(source, "state '" + name + "': bad probability");
          dist[a] = prob.get<double>();
        }
      } else {
        fail(source, "state '" + name + "': distribution must be a list or an object");
      }
      double total = 0.0;
      for (double x : dist) {
        if (x < 0.0) fail(source, "state '" + name + "': negative probability");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        fail(source, "state '" + name + "', player " + std::to_string(p) +
                         ": probabilities sum to " + num(total));
      }
      policy.set(s, dist);
    }
    profile.push_back(std::move(policy));
  }
  return profile;
}

std::string profile_to_text(const PolicyProfile& profile, const StochasticGame& game) {
  check_profile(game, profile);
  std::ostringstream out;
  out << "{\n  \"version\": \"" << kFormatVersion << "\",\n  \"profile\": [";
  for (int p = 0; p < game.num_players(); ++p) {
    out << (p == 0 ? "\n    {" : ",\n    {");
    for (StateId s = 0; s < game.num_states(); ++s) {
      out << (s == 0 ? "\n      " : ",\n      ") << str(game.state_name(s)) << ":{";
      for (int a = 0; a < game.num_actions(p); ++a) {
        out << (a == 0 ? "" : ",") << str(game.action_name(p, a)) << ":"
            << num(profile[p].prob(s, a));
      }
      out << "}";
    }
    out << "\n    }";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

PolicyProfile parse_profile(const std::filesystem::path& path, const StochasticGame& game) {
  return profile_from_text(read_text(path), game, path.string());
}

ShapingFunction shaping_from_text(std::string_view text, const StochasticGame& game,
                                  const std::string& source) {
  const Json doc = parse_json(text, source);
  check_header(doc, source, {"shaping"});
  const Json& players = player_list(doc, "shaping", game, source);
  ShapingFunction f = ShapingFunction::Zero(game.num_players(), game.num_states());
  for (int p = 0; p < game.num_players(); ++p) {
    if (!players[p].is_array()) fail(source, "shaping of each player must be a list");
    std::set<std::pair<StateId, StateId>> seen;
    for (const Json& e : players[p]) {
      const StateId s = state_index(game, get<std::string>(e, "from", source), source);
      const StateId t = state_index(game, get<std::string>(e, "to", source), source);
      if (!seen.insert({s, t}).second) fail(source, "duplicate shaping entry " + e.dump());
      f.at(p, s, t) = get<double>(e, "value", source);
    }
  }
  return f;
}

std::string shaping_to_text(const ShapingFunction& f, const StochasticGame& game) {
  if (f.num_players() != game.num_players() || f.num_states != game.num_states()) {
    throw DomainError("shaping function does not fit the game");
  }
  std::ostringstream out;
  out << "{\n  \"version\": \"" << kFormatVersion << "\",\n  \"shaping\": [";
  for (int p = 0; p < f.num_players(); ++p) {
    out << (p == 0 ? "\n    [" : ",\n    [");
    bool first = true;
    for (StateId s = 0; s < f.num_states; ++s) {
      for (StateId t = 0; t < f.num_states; ++t) {
        const double v = f.at(p, s, t);
        if (v == 0.0) continue;
        out << (first ? "\n      " : ",\n      ") << "{\"from\":" << str(game.state_name(s))
            << ",\"to\":" << str(game.state_name(t)) << ",\"value\":" << num(v) << "}";
        first = false;
      }
    }
    out << (first ? "]" : "\n    ]");
  }
  out << "\n  ]\n}\n";
  return out.str();
}

ShapingFunction parse_shaping(const std::filesystem::path& path, const StochasticGame& game) {
  return shaping_from_text(read_text(path), game, path.string());
}

// ---------------------------------------------------------------------------
// Experiment configs and outputs

LearnJob parse_learn_job(const std::filesystem::path& path) {
  const std::string source = path.string();
  const Json doc = parse_json(read_text(path), source);
  check_header(doc, source,
               {"environment", "gamma", "soccer_reset", "agent", "alpha_scale",
                "epsilon_start", "epsilon_end", "epsilon_decay_fraction", "potential",
                "potential_file", "trials", "seed_base", "episodes", "max_steps",
                "eval_every", "epsilon_learn", "output"});
  LearnJob job;
  ExperimentConfig& c = job.config;
  c.environment = get<std::string>(doc, "environment", source);
  auto optional = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = get<std::decay_t<decltype(field)>>(doc, key, source);
  };
  optional("gamma", c.gamma);
  optional("alpha_scale", c.alpha_scale);
  optional("epsilon_start", c.epsilon_start);
  optional("epsilon_end", c.epsilon_end);
  optional("epsilon_decay_fraction", c.epsilon_decay_fraction);
  optional("trials", c.trials);
  optional("episodes", c.episodes);
  optional("max_steps", c.max_steps);
  optional("eval_every", c.eval_every);
  optional("epsilon_learn", c.epsilon_learn);
  // Seeds are never implicit.
  c.seed_base = get<std::uint64_t>(doc, "seed_base", source);

  if (doc.contains("soccer_reset")) {
    const auto reset = get<std::string>(doc, "soccer_reset", source);
    if (reset == "littman") {
      c.soccer_reset = soccer::Reset::kLittman;
    } else if (reset == "uniform") {
      c.soccer_reset = soccer::Reset::kUniform;
    } else {
      fail(source, "soccer_reset must be \"littman\" or \"uniform\"");
    }
  }
  if (doc.contains("agent")) {
    const auto agent = get<std::string>(doc, "agent", source);
    if (agent == "minimax_q") {
      c.agent = AgentKind::kMinimaxQ;
    } else if (agent == "independent_q") {
      c.agent = AgentKind::kIndependentQ;
    } else {
      fail(source, "agent must be \"minimax_q\" or \"independent_q\"");
    }
  }
  const std::string potential =
      doc.contains("potential") ? get<std::string>(doc, "potential", source) : "solver";
  if (potential == "solver") {
    c.potential = PotentialSource::kSolver;
  } else if (potential == "zero") {
    c.potential = PotentialSource::kZero;
  } else if (potential == "file") {
    c.potential = PotentialSource::kFile;
  } else {
    fail(source, "potential must be \"solver\", \"zero\" or \"file\"");
  }
  if (c.potential == PotentialSource::kFile) {
    const std::filesystem::path file =
        path.parent_path() / get<std::string>(doc, "potential_file", source);
    try {
      const auto game = experiment_game(c);
      c.potential_values = parse_potential(file, *game);
    } catch (const DomainError& e) {
      fail(source, e.what());
    }
  } else if (doc.contains("potential_file")) {
    fail(source, "potential_file given but potential is not \"file\"");
  }
  if (doc.contains("output")) {
    const Json& o = doc["output"];
    if (!o.is_object()) fail(source, "\"output\" must be an object");
    for (const auto& [key, value] : o.items()) {
      if (key != "curves" && key != "summary") fail(source, "unknown output '" + key + "'");
    }
    if (o.contains("curves")) job.curves_file = get<std::string>(o, "curves", source);
    if (o.contains("summary")) job.summary_file = get<std::string>(o, "summary", source);
  }
  return job;
}

namespace {

std::string fmt9(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json arm_json(const ArmSummary& arm) {
  Json j;
  j["median_episodes_to_threshold"] = finite_or_null(arm.median_episodes);
  j["episodes_to_threshold"] = arm.episodes_to_threshold;
  j["max_final_exploitability"] = arm.max_final_exploitability;
  j["verified_trials"] = arm.verified_trials;
  return j;
}

}  // namespace

std::string curves_csv(const std::vector<LearningCurve>& curves) {
  std::vector<const LearningRecord*> rows;
  for (const auto& c : curves) {
    for (const auto& r : c.records) rows.push_back(&r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return std::tie(a->arm, a->trial, a->episode, a->player) <
           std::tie(b->arm, b->trial, b->episode, b->player);
  });
  std::string out = "trial,episode,player,exploitability,value_error,arm\n";
  for (const auto* r : rows) {
    out += std::to_string(r->trial) + "," + std::to_string(r->episode) + "," +
           std::to_string(r->player) + "," + fmt9(r->exploitability) + "," +
           fmt9(r->value_error) + "," + r->arm + "\n";
  }
  return out;
}

void emit_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path) {
  write_text(path, curves_csv(curves));
}

std::string summary_json(const ComparisonResult& result, const ExperimentConfig& config) {
  Json j;
  j["environment"] = config.environment;
  j["trials"] = config.trials;
  j["seed_base"] = config.seed_base;
  j["episodes"] = config.episodes;
  j["epsilon_learn"] = config.epsilon_learn;
  j["shaped"] = arm_json(result.summary.shaped);
  j["unshaped"] = arm_json(result.summary.unshaped);
  j["speedup"] = finite_or_null(result.summary.speedup);
  j["invariance_ok"] = result.summary.invariance_ok;
  j["shaped_verifies_when_unshaped_does"] = result.summary.shaped_verifies_when_unshaped_does;
  return j.dump(2) + "\n";
}

}  // namespace sgshape
