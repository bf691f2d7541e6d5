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

#ifndef MONOLAB_HARNESS_HPP_
#define MONOLAB_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "monolab/agent_factory.hpp"
#include "monolab/board.hpp"
#include "monolab/detection.hpp"
#include "monolab/engine.hpp"
#include "monolab/json_util.hpp"
#include "monolab/novelty.hpp"

namespace monolab {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NrpDenominator { kFocal, kBaseline };

struct NoveltyGenerator {
  NoveltyClass cls = NoveltyClass::kAttribute;
  Difficulty difficulty = Difficulty::kEasy;
  bool state_visible_only = false;
};

struct TrialConfig {
  std::string label = "trial";
  std::string board_path;  // as written in the config
  BoardSpec board;
  std::vector<AgentSpec> roster;
  int games_per_trial = 100;
  int trials = 1;
  // A fixed novelty; an unset trigger_game is drawn per trial.
  std::optional<NoveltySpec> novelty;
  std::optional<NoveltyGenerator> generator;
  std::uint64_t seed = 0;
  int max_rounds = 1000;
  int parallel = 1;
  std::string out_dir;
  bool event_log = false;
  bool rotate_seats = true;
  int focal = 0;  // roster index
  NrpDenominator nrp_denominator = NrpDenominator::kFocal;
};

// Parses a trial config; relative board paths resolve against `base_dir`
// first, then the working directory. Throws ConfigError.
TrialConfig parse_trial_config(const Json& j, const std::string& base_dir = "");
std::vector<TrialConfig> load_config_file(const std::string& path);
// Self-contained form: the board is embedded so the config replays anywhere.
Json trial_config_json(const TrialConfig& config);
std::string config_digest(const TrialConfig& config);

struct GameRecord {
  int game = 0;
  std::optional<int> winner;  // roster index
  int rounds = 0;
  bool round_cap = false;
  bool novelty_active = false;
  std::uint64_t digest = 0;
  std::vector<int> forfeits;  // roster indices
};

struct TrialRecord {
  std::string label;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  int focal = 0;
  std::vector<std::string> roster;  // agent names by roster index
  NrpDenominator nrp_denominator = NrpDenominator::kFocal;
  std::optional<NoveltySpec> novelty;
  std::optional<int> trigger_game;
  std::optional<int> detection;
  std::vector<DeviationEvent> detections;
  std::vector<GameRecord> games;
  std::string error;
};

std::uint64_t trial_seed(const TrialConfig& config, int trial);
std::uint64_t game_seed(std::uint64_t trial_seed, int game);
// Seat of roster entry `index` in game `game`.
int seat_of(const TrialConfig& config, int index, int game);

// Novelty and trigger for one trial; both deterministic in the config.
std::optional<NoveltySpec> trial_novelty(const TrialConfig& config, int trial);

struct TrialHooks {
  // Called after each game with its result (events recorded when requested).
  std::function<void(int game, const GameResult&)> on_game;
  std::function<bool(int game)> record_events;
  int stop_after = -1;  // last game to play; -1 plays the whole trial
};

TrialRecord run_trial(const TrialConfig& config, int trial,
                      const TrialHooks& hooks = {});

Json trial_header_json(const TrialRecord& record);
Json game_record_json(const GameRecord& game);
std::string trial_record_jsonl(const TrialRecord& record);
TrialRecord parse_trial_record(const std::string& jsonl);

struct MetricsReport {
  std::string novelty_class;  // "CN", "AN", "RN", "none" or "all"
  std::string difficulty;     // "easy", "medium", "hard", "-" or "all"
  int trials = 0;
  int errors = 0;
  int pre_games = 0;
  int post_games = 0;
  std::optional<double> pnwp;
  std::optional<double> win_rate_post;
  std::optional<double> nda;
  std::optional<double> nrp;
  std::optional<double> false_positive_rate;  // over novelty-free trials
};

double pnwp(const std::vector<TrialRecord>& records, int focal);
double win_rate_post(const std::vector<TrialRecord>& records, int focal);
double nda(const std::vector<TrialRecord>& records);
double nrp(const std::vector<TrialRecord>& records, int focal,
           NrpDenominator denominator);

// Strict: throws MetricsError when PNWP or NRP is undefined.
MetricsReport compute_metrics(const std::vector<TrialRecord>& records, int focal,
                              NrpDenominator denominator = NrpDenominator::kFocal);
// Lenient per-row summary: undefined metrics stay empty.
MetricsReport summarize(const std::vector<TrialRecord>& records,
                        const std::string& novelty_class,
                        const std::string& difficulty);
// One row per novelty class and difficulty, then an "all" row.
std::vector<MetricsReport> report_rows(const std::vector<TrialRecord>& records);

Json report_json(const std::vector<MetricsReport>& rows);
std::string report_csv(const std::vector<MetricsReport>& rows);

struct SuiteResult {
  std::vector<std::vector<TrialRecord>> records;  // per config
  std::vector<MetricsReport> rows;
  int failed_trials = 0;
};

// Runs every trial of every config, `parallel` trials at a time, and writes
// records (and event logs when enabled) under `out_dir` when non-empty.
SuiteResult run_suite(const std::vector<TrialConfig>& configs, int parallel,
                      const std::string& out_dir);

std::vector<TrialRecord> load_records(const std::string& dir);

// Standalone game log header: enough to rebuild and replay one game.
struct GameSetup {
  BoardSpec board;
  std::vector<AgentSpec> roster;
  std::optional<NoveltySpec> novelty;  // applied before the game
  std::uint64_t seed = 0;
  int max_rounds = 1000;
};

Json game_header_json(const GameSetup& setup);
// Plays one game with fresh agents seeded from the game seed.
GameResult play_logged_game(const GameSetup& setup, bool record_events,
                            GameObserver observer = {});
std::string game_log(const GameSetup& setup, const GameResult& result);

struct ReplayOutcome {
  bool ok = false;
  std::size_t lines_checked = 0;
  std::string message;
};

// Re-derives the game from the log header and compares every event line.
ReplayOutcome replay_log(const std::string& path);
ReplayOutcome replay_log_text(const std::string& text);

}  // namespace monolab

#endif  // MONOLAB_HARNESS_HPP_
