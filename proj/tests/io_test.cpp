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
#include <filesystem>
#include <random>

#include "doctest.h"
#include "sgshape/generators.hpp"
#include "sgshape/learn.hpp"

namespace sgshape {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = SGSHAPE_FIXTURE_DIR;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sgshape_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const fs::path& path) {
  try {
    parse_game(path);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("shipped game fixtures are canonical") {
  for (const char* name : {"chain.json", "pd.json", "matching_pennies.json"}) {
    CAPTURE(name);
    const std::string text = read_text(kFixtures / name);
    CHECK(game_to_text(parse_game(kFixtures / name)) == text);
  }
}

TEST_CASE("game files round-trip through the serializer") {
  Rng rng(20240611);
  for (int k = 0; k < 30; ++k) {
    RandomGameOptions options;
    options.zero_sum = k % 2 == 0;
    options.num_players = k % 3 == 0 ? 3 : 2;
    options.gamma = 0.5 + 0.01 * k;
    const auto game = random_game(rng, options);
    const std::string text = game_to_text(game);
    const auto back = game_from_text(text);
    CHECK(back == game);
    CHECK(game_to_text(back) == text);
  }
}

TEST_CASE("grid soccer survives a file round-trip") {
  const auto dir = scratch_dir("soccer");
  const auto soccer = grid_soccer();
  serialize_game(*soccer.game, dir / "soccer.json");
  const auto back = parse_game(dir / "soccer.json");
  CHECK(back == *soccer.game);
  fs::remove_all(dir);
}

TEST_CASE("row sums off by 0.1 are reported with state and joint action") {
  const std::string message = error_of(kFixtures / "bad_rowsum.json");
  CHECK(message.find("row-sum") != std::string::npos);
  CHECK(message.find("state s0") != std::string::npos);
  CHECK(message.find("(go)") != std::string::npos);
}

TEST_CASE("malformed game files are input errors") {
  CHECK(error_of(kFixtures / "bad_syntax.json").find("syntax error") != std::string::npos);
  CHECK(error_of(kFixtures / "no_such_file.json").find("no_such_file") != std::string::npos);

  const std::string chain = read_text(kFixtures / "chain.json");
  auto variant = [&](const std::string& from, const std::string& to) {
    std::string text = chain;
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), to);
    return text;
  };
  CHECK_THROWS_AS(game_from_text(variant("\"version\": \"1\"", "\"version\": \"2\"")),
                  InputError);
  CHECK_THROWS_AS(game_from_text(variant("\"gamma\": 0.9", "\"gamma\": 1.5")), InputError);
  CHECK_THROWS_AS(game_from_text(variant("\"next\":\"s1\"", "\"next\":\"s9\"")), InputError);
  CHECK_THROWS_AS(game_from_text(variant("\"joint\":[\"go\"],\"next\":\"s1\"",
                                         "\"joint\":[\"stay\"],\"next\":\"s1\"")),
                  InputError);
  CHECK_THROWS_AS(game_from_text(variant("\"players\": 1", "\"players\": 1, \"extra\": 0")),
                  InputError);
  // Duplicate transition entries.
  CHECK_THROWS_AS(
      game_from_text(variant("{\"state\":\"s0\",\"joint\":[\"go\"],\"next\":\"s1\",\"p\":1.0},",
                             "{\"state\":\"s0\",\"joint\":[\"go\"],\"next\":\"s1\",\"p\":0.5},"
                             "{\"state\":\"s0\",\"joint\":[\"go\"],\"next\":\"s1\",\"p\":0.5},")),
      InputError);
  // Terminal with reward.
  CHECK_THROWS_AS(
      game_from_text(variant("\"rewards\": [",
                             "\"rewards\": [{\"player\":0,\"state\":\"sT\",\"joint\":[\"go\"],"
                             "\"next\":\"sT\",\"value\":1.0},")),
      InputError);
}

TEST_CASE("potentials, profiles and shaping functions round-trip") {
  Rng rng(99);
  for (int k = 0; k < 20; ++k) {
    const auto game = random_game(rng);
    const auto phi = random_potential(rng, game);
    const auto text = potential_to_text(phi, game);
    CHECK(potential_from_text(text, game).values == phi.values);

    const auto profile = random_profile(rng, game);
    const auto ptext = profile_to_text(profile, game);
    CHECK(profile_from_text(ptext, game) == profile);
    CHECK(profile_to_text(profile_from_text(ptext, game), game) == ptext);

    ShapingFunction f = ShapingFunction::Zero(game.num_players(), game.num_states());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& row : f.values) {
      for (auto& v : row) v = u(rng);
    }
    const auto ftext = shaping_to_text(f, game);
    CHECK(shaping_from_text(ftext, game).values == f.values);
  }
}

TEST_CASE("profile and potential files are checked against the game") {
  const auto pd = parse_game(kFixtures / "pd.json");
  const auto cc = parse_profile(kFixtures / "pd_cc.json", pd);
  CHECK(cc[0].prob(0, 0) == 1.0);
  const auto dd = parse_profile(kFixtures / "pd_dd.json", pd);
  CHECK(dd[0].prob(0, 1) == 1.0);
  CHECK(dd[1].prob(0, 1) == 1.0);

  CHECK_THROWS_AS(profile_from_text(R"({"version":"1","profile":[{"s":{"C":0.5}},{}]})", pd),
                  InputError);
  CHECK_THROWS_AS(profile_from_text(R"({"version":"1","profile":[{"s":{"X":1.0}},{}]})", pd),
                  InputError);
  CHECK_THROWS_AS(profile_from_text(R"({"version":"1","profile":[{}]})", pd), InputError);
  CHECK_THROWS_AS(potential_from_text(R"({"version":"1","potential":[{"end":1.0},{}]})", pd),
                  InputError);
  CHECK_THROWS_AS(potential_from_text(R"({"version":"1","potential":[{"q":1.0},{}]})", pd),
                  InputError);

  const auto chain = parse_game(kFixtures / "chain.json");
  const auto phi = parse_potential(kFixtures / "chain_phi.json", chain);
  CHECK(phi.values == std::vector<std::vector<double>>{{0.5, 0.0, 0.0}});
}

TEST_CASE("experiment configs") {
  const auto job = parse_learn_job(kFixtures / "learn_mp.json");
  CHECK(job.config.environment == "matching_pennies");
  CHECK(job.config.seed_base == 7);
  CHECK(job.config.trials == 2);
  CHECK(job.config.agent == AgentKind::kMinimaxQ);
  CHECK(job.config.potential == PotentialSource::kSolver);
  CHECK(job.config.alpha_scale == 1000.0);  // default

  const auto file_job = parse_learn_job(kFixtures / "learn_pd_file.json");
  CHECK(file_job.config.potential == PotentialSource::kFile);
  REQUIRE(file_job.config.potential_values.has_value());
  CHECK(file_job.config.potential_values->values[0][0] == 1.5);
  CHECK(file_job.config.agent == AgentKind::kIndependentQ);

  CHECK_THROWS_AS(parse_learn_job(kFixtures / "learn_no_seed.json"), InputError);

  const auto dir = scratch_dir("config");
  write_text(dir / "missing_phi.json",
             R"({"version":"1","environment":"matching_pennies","seed_base":1,)"
             R"("potential":"file","potential_file":"absent.json"})");
  CHECK_THROWS_AS(parse_learn_job(dir / "missing_phi.json"), InputError);
  write_text(dir / "bad_agent.json",
             R"({"version":"1","environment":"soccer","seed_base":1,"agent":"sarsa"})");
  CHECK_THROWS_AS(parse_learn_job(dir / "bad_agent.json"), InputError);
  fs::remove_all(dir);
}

LearningRecord record(const std::string& arm, int trial, int episode, int player, double x) {
  LearningRecord r;
  r.arm = arm;
  r.trial = trial;
  r.episode = episode;
  r.player = player;
  r.exploitability = x;
  r.value_error = x / 3.0;
  return r;
}

TEST_CASE("curve CSV layout") {
  const std::string header = "trial,episode,player,exploitability,value_error,arm\n";
  CHECK(curves_csv({}) == header);

  LearningCurve one;
  one.arm = "shaped";
  one.records.push_back(record("shaped", 0, 100, 1, 0.25));
  CHECK(curves_csv({one}) == header + "0,100,1,0.25,0.0833333333,shaped\n");

  const auto dir = scratch_dir("csv");
  emit_csv({}, dir / "empty.csv");
  CHECK(read_text(dir / "empty.csv") == header);
  emit_csv({one}, dir / "one.csv");
  const std::string text = read_text(dir / "one.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK_THROWS_AS(emit_csv({one}, dir / "missing" / "x.csv"), InputError);
  fs::remove_all(dir);
}

TEST_CASE("curve rows are sorted by arm, trial, episode, player") {
  LearningCurve a, b;
  a.arm = "unshaped";
  a.records = {record("unshaped", 1, 200, 1, 0.1), record("unshaped", 1, 100, 0, 0.2)};
  b.arm = "shaped";
  b.records = {record("shaped", 0, 100, 1, 1.0 / 3.0), record("shaped", 0, 100, 0, 0.5)};
  const std::string text = curves_csv({a, b});
  CHECK(text ==
        "trial,episode,player,exploitability,value_error,arm\n"
        "0,100,0,0.5,0.166666667,shaped\n"
        "0,100,1,0.333333333,0.111111111,shaped\n"
        "1,100,0,0.2,0.0666666667,unshaped\n"
        "1,200,1,0.1,0.0333333333,unshaped\n");
}

}  // namespace
}  // namespace sgshape
