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

#ifndef SGSHAPE_IO_HPP_
#define SGSHAPE_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgshape/game.hpp"
#include "sgshape/learn.hpp"
#include "sgshape/shaping.hpp"

namespace sgshape {

// Malformed or inconsistent input file. Messages name the offending file,
// state and action where there is one.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kFormatVersion = "1";

// Game files: JSON with sparse transition and reward entries keyed by state
// and action names; absent entries are probability 0 / reward 0. Serialized
// in canonical order (state, joint action row-major, next state) with
// shortest round-trip floats, so text -> game -> text is the identity for
// canonical files. Parsing runs validate_game and throws InputError listing
// every violation.
StochasticGame game_from_text(std::string_view text, const std::string& source = "<text>");
std::string game_to_text(const StochasticGame& game);
StochasticGame parse_game(const std::filesystem::path& path);
void serialize_game(const StochasticGame& game, const std::filesystem::path& path);

// One object per player mapping state names to Phi; absent states are 0.
PotentialSet potential_from_text(std::string_view text, const StochasticGame& game,
                                 const std::string& source = "<text>");
std::string potential_to_text(const PotentialSet& phi, const StochasticGame& game);
PotentialSet parse_potential(const std::filesystem::path& path, const StochasticGame& game);

// One object per player mapping state names to {action name: probability}
// (or a plain probability array). Absent states play the first action.
PolicyProfile profile_from_text(std::string_view text, const StochasticGame& game,
                                const std::string& source = "<text>");
std::string profile_to_text(const PolicyProfile& profile, const StochasticGame& game);
PolicyProfile parse_profile(const std::filesystem::path& path, const StochasticGame& game);

// Per player a list of {"from", "to", "value"} entries; absent pairs are 0.
ShapingFunction shaping_from_text(std::string_view text, const StochasticGame& game,
                                  const std::string& source = "<text>");
std::string shaping_to_text(const ShapingFunction& f, const StochasticGame& game);
ShapingFunction parse_shaping(const std::filesystem::path& path, const StochasticGame& game);

struct LearnJob {
  ExperimentConfig config;
  std::string curves_file = "curves.csv";
  std::string summary_file = "summary.json";
};

// Experiment configs. "seed_base" is required; a potential file is resolved
// relative to the config and loaded against the environment's game.
LearnJob parse_learn_job(const std::filesystem::path& path);

// header trial,episode,player,exploitability,value_error,arm; rows sorted by
// (arm, trial, episode, player); floats with 9 significant digits.
std::string curves_csv(const std::vector<LearningCurve>& curves);
void emit_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path);

std::string summary_json(const ComparisonResult& result, const ExperimentConfig& config);

// Whole-file helpers; InputError on failure.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sgshape

#endif  // SGSHAPE_IO_HPP_
