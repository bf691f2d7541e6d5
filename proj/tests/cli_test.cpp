// Copyright 2026 The monolab Authors
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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monolab/json_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI inside `dir` with `env` prepended to the command line.
Run cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + dir.string() + "' && env -u MONOLAB_OUT " + env + " '" +
                          MONOLAB_CLI + "' " + args + " >stdout.txt 2>stderr.txt";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("monolab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_config(const fs::path& path, const std::string& board, bool event_log = false) {
  const monolab::Json j{{"schema_version", 1},
                        {"label", "cli"},
                        {"board", board},
                        {"roster", monolab::Json::array({"value", "random", "simple"})},
                        {"games_per_trial", 3},
                        {"trials", 2},
                        {"max_rounds", 40},
                        {"event_log", event_log},
                        {"novelty_generator", {{"class", "AN"}}}};
  std::ofstream(path) << j.dump(2);
}

int count_records(const fs::path& dir) {
  int n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    n += name.rfind("trial_", 0) == 0 && name.find("_game_") == std::string::npos;
  }
  return n;
}

}  // namespace

TEST_CASE("run writes records under ./out and report summarizes them") {
  const fs::path dir = workdir("run");
  write_config(dir / "trial.json", "tb8");
  const Run run = cli(dir, "run --config trial.json --seed 7");
  CHECK_MESSAGE(run.code == 0, run.err);
  CHECK(fs::exists(dir / "out" / "report.csv"));
  CHECK(count_records(dir / "out") == 2);
  CHECK(run.out.find("pnwp") != std::string::npos);

  const Run csv = cli(dir, "report --in out --format csv");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("schema_version,class,difficulty", 0) == 0);
  CHECK(csv.out.find("nda") != std::string::npos);
  CHECK(csv.out.find("nrp") != std::string::npos);

  const Run json = cli(dir, "report --in out");
  CHECK(json.code == 0);
  const auto j = monolab::Json::parse(json.out);
  CHECK(j["schema_version"] == 1);

  const Run again = cli(dir, "run --config trial.json --seed 7 --out again");
  CHECK(again.code == 0);
  CHECK(slurp(dir / "again" / "report.csv") == slurp(dir / "out" / "report.csv"));
  fs::remove_all(dir);
}

TEST_CASE("the output directory falls back to MONOLAB_OUT") {
  const fs::path dir = workdir("env");
  write_config(dir / "trial.json", "tb8");
  const Run run = cli(dir, "run --config trial.json --parallel 2", "MONOLAB_OUT=elsewhere");
  CHECK(run.code == 0);
  CHECK(fs::exists(dir / "elsewhere" / "report.json"));
  CHECK_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}

TEST_CASE("a missing board file is a config error naming the path") {
  const fs::path dir = workdir("missing");
  write_config(dir / "trial.json", "boards/absent.json");
  const Run run = cli(dir, "run --config trial.json");
  CHECK(run.code == 1);
  CHECK(run.err.find("boards/absent.json") != std::string::npos);
  CHECK(run.out.empty());
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with status 1") {
  const fs::path dir = workdir("usage");
  CHECK(cli(dir, "").code == 1);
  CHECK(cli(dir, "run").code == 1);
  CHECK(cli(dir, "report --in . --format xml").code == 1);
  CHECK(cli(dir, "report --in .").code == 1);
  CHECK(cli(dir, "run --config nope.json").code == 1);
  std::ofstream(dir / "broken.json") << "{";
  CHECK(cli(dir, "run --config broken.json").code == 1);
  fs::remove_all(dir);
}

TEST_CASE("replay verifies a produced log and rejects an edited one") {
  const fs::path dir = workdir("replay");
  write_config(dir / "trial.json", "tb8", true);
  REQUIRE(cli(dir, "run --config trial.json --out o").code == 0);
  fs::path log;
  for (const auto& e : fs::recursive_directory_iterator(dir / "o")) {
    if (e.path().filename().string().find("_game_") != std::string::npos) {
      log = e.path();
      break;
    }
  }
  REQUIRE_FALSE(log.empty());
  const Run ok = cli(dir, "replay --log '" + log.string() + "'");
  CHECK_MESSAGE(ok.code == 0, ok.err);
  CHECK(ok.out.find("replay matches") != std::string::npos);

  std::string text = slurp(log);
  const auto pos = text.rfind("\"kind\":\"game_end\"");
  REQUIRE(pos != std::string::npos);
  text.insert(text.rfind('\n', pos) + 1, "{\"round\":0,\"kind\":\"roll\",\"player\":0}\n");
  std::ofstream(dir / "edited.jsonl") << text;
  const Run bad = cli(dir, "replay --log edited.jsonl");
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(cli(dir, "replay --log absent.jsonl").code != 0);
  fs::remove_all(dir);
}
