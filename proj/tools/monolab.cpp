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

// monolab: run trials, summarize records, verify event logs.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "monolab/harness.hpp"

namespace {

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

std::string default_out() {
  const char* env = std::getenv("MONOLAB_OUT");
  return env && *env ? env : "out";
}

int run(const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<int> parallel, std::optional<std::string> out) {
  auto configs = monolab::load_config_file(config_path);
  for (auto& c : configs) {
    if (seed) c.seed = *seed;
  }
  const int workers = parallel.value_or(configs.front().parallel);
  if (workers < 1) throw monolab::ConfigError("--parallel: must be at least 1");
  std::string dir;
  if (out) {
    dir = *out;
  } else if (!configs.front().out_dir.empty()) {
    dir = configs.front().out_dir;
  } else {
    dir = default_out();
  }
  const auto result = monolab::run_suite(configs, workers, dir);
  for (const auto& records : result.records) {
    for (const auto& r : records) {
      if (!r.error.empty()) {
        std::cerr << "monolab: " << r.label << " trial " << r.trial << ": " << r.error
                  << "\n";
      }
    }
  }
  std::cout << monolab::report_csv(result.rows);
  std::cerr << "monolab: records written to " << dir << "\n";
  return result.failed_trials > 0 ? kRuntimeExit : 0;
}

int report(const std::string& dir, const std::string& format) {
  const auto records = monolab::load_records(dir);
  if (records.empty()) throw monolab::ConfigError("no trial records under " + dir);
  const auto rows = monolab::report_rows(records);
  if (format == "csv") {
    std::cout << monolab::report_csv(rows);
  } else {
    std::cout << monolab::report_json(rows).dump(2) << "\n";
  }
  return 0;
}

int replay(const std::string& path) {
  const auto outcome = monolab::replay_log(path);
  if (!outcome.ok) {
    std::cerr << "monolab: replay mismatch: " << outcome.message << "\n";
    return kRuntimeExit;
  }
  std::cout << outcome.message << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monopoly simulation lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel;
  std::optional<std::string> out;
  auto* run_cmd = app.add_subcommand("run", "Run the trials described by a config file");
  run_cmd->add_option("--config", config_path, "Trial or suite config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the base seed");
  run_cmd->add_option("--parallel", parallel, "Trials to run at once");
  run_cmd->add_option("--out", out, "Output directory (default $MONOLAB_OUT or ./out)");

  std::string in_dir;
  std::string format = "json";
  auto* report_cmd = app.add_subcommand("report", "Summarize trial records");
  report_cmd->add_option("--in", in_dir, "Directory holding trial records")->required();
  report_cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string log_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-derive a game and verify its log");
  replay_cmd->add_option("--log", log_path, "Event log (JSONL)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (*run_cmd) return run(config_path, seed, parallel, out);
    if (*report_cmd) return report(in_dir, format);
    return replay(log_path);
  } catch (const monolab::ConfigError& e) {
    std::cerr << "monolab: config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "monolab: error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}
