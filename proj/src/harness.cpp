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

#include "monolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "monolab/event_log.hpp"
#include "monolab/value_agent.hpp"

namespace monolab {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kNoveltyStream = 0x6e6f76656c747931ULL;
constexpr std::uint64_t kAgentStream = 0x100000;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string_view to_string(NrpDenominator d) {
  return d == NrpDenominator::kFocal ? "focal" : "baseline";
}

template <typename T>
T get_field(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

BoardSpec resolve_board(const std::string& path, const std::string& base_dir) {
  if (path == "standard") return standard_board();
  if (path == "tb8") return tb8_board();
  fs::path p(path);
  if (p.is_relative() && !base_dir.empty() && fs::exists(fs::path(base_dir) / p)) {
    p = fs::path(base_dir) / p;
  }
  if (!fs::exists(p)) throw ConfigError("board: file not found: " + path);
  try {
    return load_board_file(p.string());
  } catch (const std::exception& e) {
    throw ConfigError("board: " + p.string() + ": " + e.what());
  }
}

std::unique_ptr<Agent> build_agent(const TrialConfig& config, int index,
                                   std::uint64_t seed) {
  return make_agent(config.roster[index], config.board,
                    derive_seed(seed, kAgentStream + static_cast<std::uint64_t>(index)));
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "trial" : out;
}

std::string indexed(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d", prefix, i);
  return buf;
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string class_name(const TrialRecord& r) {
  return r.novelty ? std::string(to_string(r.novelty->cls)) : "none";
}

std::string difficulty_name(const TrialRecord& r) {
  return r.novelty ? std::string(to_string(r.novelty->difficulty)) : "-";
}

template <typename Fn>
std::optional<double> lenient(Fn&& fn) {
  try {
    return fn();
  } catch (const MetricsError&) {
    return std::nullopt;
  }
}

}  // namespace

TrialConfig parse_trial_config(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> kKeys = {
      "schema_version", "label",    "board",        "board_spec",
      "roster",         "games_per_trial", "trials", "novelty",
      "novelty_generator", "seed",  "max_rounds",   "parallel",
      "out",            "event_log", "rotate_seats", "focal",
      "nrp_denominator"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError(key + ": unknown config key");
  }
  TrialConfig c;
  c.label = get_field<std::string>(j, "label", c.label);
  c.board_path = get_field<std::string>(j, "board", "");
  if (j.contains("board_spec")) {
    try {
      c.board = parse_board(j["board_spec"].dump());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("board_spec: ") + e.what());
    }
  } else if (!c.board_path.empty()) {
    c.board = resolve_board(c.board_path, base_dir);
  } else {
    throw ConfigError("board: missing required key");
  }

  if (!j.contains("roster") || !j["roster"].is_array()) {
    throw ConfigError("roster: expected an array of agents");
  }
  const Json& roster = j["roster"];
  for (std::size_t i = 0; i < roster.size(); ++i) {
    c.roster.push_back(parse_agent_spec(roster[i], "roster[" + std::to_string(i) + "]"));
  }
  if (c.roster.size() < 2 || c.roster.size() > 4) {
    throw ConfigError("roster: needs 2 to 4 agents");
  }
  c.games_per_trial = get_field<int>(j, "games_per_trial", c.games_per_trial);
  c.trials = get_field<int>(j, "trials", c.trials);
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.max_rounds = get_field<int>(j, "max_rounds", c.max_rounds);
  c.parallel = get_field<int>(j, "parallel", c.parallel);
  c.out_dir = get_field<std::string>(j, "out", "");
  c.event_log = get_field<bool>(j, "event_log", c.event_log);
  c.rotate_seats = get_field<bool>(j, "rotate_seats", c.rotate_seats);
  c.focal = get_field<int>(j, "focal", c.focal);
  const auto denom = get_field<std::string>(j, "nrp_denominator", "focal");
  if (denom == "focal") {
    c.nrp_denominator = NrpDenominator::kFocal;
  } else if (denom == "baseline") {
    c.nrp_denominator = NrpDenominator::kBaseline;
  } else {
    throw ConfigError("nrp_denominator: expected \"focal\" or \"baseline\"");
  }
  if (c.games_per_trial < 1) throw ConfigError("games_per_trial: must be at least 1");
  if (c.trials < 1) throw ConfigError("trials: must be at least 1");
  if (c.max_rounds < 1) throw ConfigError("max_rounds: must be at least 1");
  if (c.parallel < 1) throw ConfigError("parallel: must be at least 1");
  if (c.focal < 0 || c.focal >= static_cast<int>(c.roster.size())) {
    throw ConfigError("focal: not a roster index");
  }

  if (j.contains("novelty") && !j["novelty"].is_null()) {
    try {
      c.novelty = parse_novelty(j["novelty"]);
      validate_novelty_compat(c.board, *c.novelty);
      inject_novelty(c.board, *c.novelty);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("novelty: ") + e.what());
    }
    if (c.novelty->trigger_game && *c.novelty->trigger_game >= c.games_per_trial) {
      throw ConfigError("novelty.trigger_game: must be below games_per_trial");
    }
  }
  if (j.contains("novelty_generator") && !j["novelty_generator"].is_null()) {
    if (c.novelty) {
      throw ConfigError("novelty_generator: cannot be combined with a fixed novelty");
    }
    const Json& g = j["novelty_generator"];
    if (!g.is_object()) throw ConfigError("novelty_generator: expected object");
    NoveltyGenerator gen;
    try {
      gen.cls = novelty_class_from_string(get_field<std::string>(g, "class", "AN"));
      gen.difficulty =
          difficulty_from_string(get_field<std::string>(g, "difficulty", "easy"));
    } catch (const ParseError& e) {
      throw ConfigError(std::string("novelty_generator.") + e.what());
    }
    gen.state_visible_only = get_field<bool>(g, "state_visible_only", false);
    c.generator = gen;
  }
  return c;
}

std::vector<TrialConfig> load_config_file(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("config: file not found: " + path);
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  const std::string base = fs::path(path).parent_path().string();
  std::vector<TrialConfig> configs;
  if (j.is_object() && j.contains("suite")) {
    if (!j["suite"].is_array()) throw ConfigError("suite: expected array");
    for (std::size_t i = 0; i < j["suite"].size(); ++i) {
      try {
        configs.push_back(parse_trial_config(j["suite"][i], base));
      } catch (const ConfigError& e) {
        throw ConfigError("suite[" + std::to_string(i) + "]." + e.what());
      }
    }
  } else {
    configs.push_back(parse_trial_config(j, base));
  }
  return configs;
}

Json trial_config_json(const TrialConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = c.label;
  j["board"] = c.board_path;
  j["board_spec"] = Json::parse(serialize_board(c.board));
  Json roster = Json::array();
  for (const auto& a : c.roster) roster.push_back(agent_spec_json(a));
  j["roster"] = roster;
  j["games_per_trial"] = c.games_per_trial;
  j["trials"] = c.trials;
  j["novelty"] = c.novelty ? novelty_json(*c.novelty) : Json(nullptr);
  if (c.generator) {
    j["novelty_generator"] = {{"class", std::string(to_string(c.generator->cls))},
                              {"difficulty", std::string(to_string(c.generator->difficulty))},
                              {"state_visible_only", c.generator->state_visible_only}};
  } else {
    j["novelty_generator"] = nullptr;
  }
  j["seed"] = c.seed;
  j["max_rounds"] = c.max_rounds;
  j["event_log"] = c.event_log;
  j["rotate_seats"] = c.rotate_seats;
  j["focal"] = c.focal;
  j["nrp_denominator"] = std::string(to_string(c.nrp_denominator));
  return j;
}

std::string config_digest(const TrialConfig& config) {
  Json j = trial_config_json(config);
  j.erase("event_log");
  return hex64(fnv1a(j.dump()));
}

std::uint64_t trial_seed(const TrialConfig& config, int trial) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(trial));
}

std::uint64_t game_seed(std::uint64_t trial_seed, int game) {
  return derive_seed(trial_seed, static_cast<std::uint64_t>(game));
}

int seat_of(const TrialConfig& config, int index, int game) {
  const int n = static_cast<int>(config.roster.size());
  return config.rotate_seats ? (index + game) % n : index;
}

std::optional<NoveltySpec> trial_novelty(const TrialConfig& config, int trial) {
  if (!config.novelty && !config.generator) return std::nullopt;
  Rng rng(derive_seed(trial_seed(config, trial), kNoveltyStream));
  NoveltySpec spec;
  if (config.novelty) {
    spec = *config.novelty;
  } else {
    spec = generate_novelty(config.board, config.generator->cls,
                            config.generator->difficulty, rng,
                            config.generator->state_visible_only);
  }
  if (!spec.trigger_game) {
    spec.trigger_game = static_cast<int>(rng.below(config.games_per_trial));
  }
  return spec;
}

TrialRecord run_trial(const TrialConfig& config, int trial, const TrialHooks& hooks) {
  TrialRecord rec;
  rec.label = config.label;
  rec.trial = trial;
  rec.seed = trial_seed(config, trial);
  rec.config_digest = config_digest(config);
  rec.focal = config.focal;
  rec.nrp_denominator = config.nrp_denominator;
  for (const auto& a : config.roster) rec.roster.push_back(a.name);
  try {
    rec.novelty = trial_novelty(config, trial);
    if (rec.novelty) rec.trigger_game = rec.novelty->trigger_game;
    const auto base = std::make_shared<const BoardSpec>(config.board);
    std::shared_ptr<const BoardSpec> injected;
    if (rec.novelty) {
      injected = std::make_shared<const BoardSpec>(inject_novelty(config.board, *rec.novelty));
    }
    const int n = static_cast<int>(config.roster.size());
    std::vector<std::unique_ptr<Agent>> agents;
    for (int i = 0; i < n; ++i) agents.push_back(build_agent(config, i, rec.seed));

    const int last = hooks.stop_after >= 0
                         ? std::min(hooks.stop_after, config.games_per_trial - 1)
                         : config.games_per_trial - 1;
    for (int g = 0; g <= last; ++g) {
      const bool active = rec.trigger_game && g >= *rec.trigger_game;
      std::vector<Agent*> seats(n);
      std::vector<int> roster_at(n);
      for (int i = 0; i < n; ++i) {
        seats[seat_of(config, i, g)] = agents[i].get();
        roster_at[seat_of(config, i, g)] = i;
      }
      GameOptions options;
      options.max_rounds = config.max_rounds;
      options.game_index = g;
      options.record_events = hooks.record_events && hooks.record_events(g);
      if (active && g == *rec.trigger_game) options.novelty_note = describe(*rec.novelty);
      Game game(active ? injected : base, seats, game_seed(rec.seed, g), options);
      const GameResult result = game.play();

      GameRecord gr;
      gr.game = g;
      if (result.winner) gr.winner = roster_at[*result.winner];
      gr.rounds = result.rounds;
      gr.round_cap = result.round_cap;
      gr.novelty_active = active;
      gr.digest = result.digest;
      for (int seat : result.forfeits) gr.forfeits.push_back(roster_at[seat]);
      rec.games.push_back(std::move(gr));
      if (hooks.on_game) hooks.on_game(g, result);
    }
    rec.detection = agents[config.focal]->announced_novelty();
    if (auto* v = dynamic_cast<ValueAgent*>(agents[config.focal].get())) {
      rec.detections = v->detections();
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

Json trial_header_json(const TrialRecord& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "trial";
  j["label"] = r.label;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["focal"] = r.focal;
  j["roster"] = r.roster;
  j["nrp_denominator"] = std::string(to_string(r.nrp_denominator));
  j["novelty"] = r.novelty ? novelty_json(*r.novelty) : Json(nullptr);
  j["trigger_game"] = r.trigger_game ? Json(*r.trigger_game) : Json(nullptr);
  j["detection"] = r.detection ? Json(*r.detection) : Json(nullptr);
  Json devs = Json::array();
  for (const auto& d : r.detections) devs.push_back(deviation_json(d));
  j["detections"] = devs;
  j["games"] = r.games.size();
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

Json game_record_json(const GameRecord& g) {
  Json j;
  j["type"] = "game";
  j["game"] = g.game;
  j["winner"] = g.winner ? Json(*g.winner) : Json(nullptr);
  j["rounds"] = g.rounds;
  j["round_cap"] = g.round_cap;
  j["novelty_active"] = g.novelty_active;
  j["digest"] = hex64(g.digest);
  if (!g.forfeits.empty()) j["forfeits"] = g.forfeits;
  return j;
}

std::string trial_record_jsonl(const TrialRecord& record) {
  std::string out = trial_header_json(record).dump() + "\n";
  for (const auto& g : record.games) out += game_record_json(g).dump() + "\n";
  return out;
}

TrialRecord parse_trial_record(const std::string& jsonl) {
  const auto lines = split_lines(jsonl);
  if (lines.empty()) throw ConfigError("record: empty file");
  TrialRecord r;
  try {
    const Json h = Json::parse(lines[0]);
    if (h.value("type", "") != "trial") throw ConfigError("record: missing trial header");
    r.label = h.at("label").get<std::string>();
    r.trial = h.at("trial").get<int>();
    r.seed = h.at("seed").get<std::uint64_t>();
    r.config_digest = h.at("config_digest").get<std::string>();
    r.focal = h.at("focal").get<int>();
    r.roster = h.at("roster").get<std::vector<std::string>>();
    r.nrp_denominator = h.at("nrp_denominator").get<std::string>() == "baseline"
                            ? NrpDenominator::kBaseline
                            : NrpDenominator::kFocal;
    if (!h.at("novelty").is_null()) r.novelty = parse_novelty(h["novelty"]);
    if (!h.at("trigger_game").is_null()) r.trigger_game = h["trigger_game"].get<int>();
    if (!h.at("detection").is_null()) r.detection = h["detection"].get<int>();
    for (const auto& d : h.at("detections")) {
      r.detections.push_back({d.at("path").get<std::string>(),
                              d.at("expected").get<double>(),
                              d.at("observed").get<double>(), d.at("game").get<int>(),
                              d.at("confidence").get<double>(),
                              d.value("detail", std::string())});
    }
    r.error = h.value("error", std::string());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const Json g = Json::parse(lines[i]);
      GameRecord gr;
      gr.game = g.at("game").get<int>();
      if (!g.at("winner").is_null()) gr.winner = g["winner"].get<int>();
      gr.rounds = g.at("rounds").get<int>();
      gr.round_cap = g.at("round_cap").get<bool>();
      gr.novelty_active = g.at("novelty_active").get<bool>();
      gr.digest = parse_hex64(g.at("digest").get<std::string>());
      if (g.contains("forfeits")) gr.forfeits = g["forfeits"].get<std::vector<int>>();
      r.games.push_back(gr);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("record: ") + e.what());
  }
  return r;
}

double pnwp(const std::vector<TrialRecord>& records, int focal) {
  int games = 0;
  int wins = 0;
  for (const auto& r : records) {
    for (const auto& g : r.games) {
      if (g.novelty_active) continue;
      ++games;
      wins += g.winner == focal;
    }
  }
  if (games == 0) throw MetricsError("PNWP undefined: no pre-novelty games");
  return static_cast<double>(wins) / games;
}

double win_rate_post(const std::vector<TrialRecord>& records, int focal) {
  int games = 0;
  int wins = 0;
  for (const auto& r : records) {
    for (const auto& g : r.games) {
      if (!g.novelty_active) continue;
      ++games;
      wins += g.winner == focal;
    }
  }
  if (games == 0) throw MetricsError("post-novelty win rate undefined: no such games");
  return static_cast<double>(wins) / games;
}

double nda(const std::vector<TrialRecord>& records) {
  int trials = 0;
  int detected = 0;
  for (const auto& r : records) {
    if (!r.trigger_game) continue;
    ++trials;
    const int total = static_cast<int>(r.games.size());
    detected += r.detection && *r.detection >= *r.trigger_game && *r.detection < total;
  }
  if (trials == 0) throw MetricsError("NDA undefined: no trials with a novelty");
  return static_cast<double>(detected) / trials;
}

double nrp(const std::vector<TrialRecord>& records, int focal,
           NrpDenominator denominator) {
  const double post = win_rate_post(records, focal);
  double denom = 0;
  if (denominator == NrpDenominator::kFocal) {
    denom = pnwp(records, focal);
  } else {
    int others = 0;
    const int n = records.empty() ? 0 : static_cast<int>(records[0].roster.size());
    for (int i = 0; i < n; ++i) {
      if (i == focal) continue;
      denom += pnwp(records, i);
      ++others;
    }
    if (others > 0) denom /= others;
  }
  if (denom == 0) throw MetricsError("NRP undefined: zero denominator");
  return post / denom;
}

MetricsReport compute_metrics(const std::vector<TrialRecord>& records, int focal,
                              NrpDenominator denominator) {
  if (records.empty()) throw MetricsError("no trial records");
  MetricsReport m;
  m.novelty_class = "all";
  m.difficulty = "all";
  m.trials = static_cast<int>(records.size());
  for (const auto& r : records) {
    m.errors += !r.error.empty();
    for (const auto& g : r.games) (g.novelty_active ? m.post_games : m.pre_games)++;
  }
  m.pnwp = pnwp(records, focal);
  if (m.post_games > 0) {
    m.win_rate_post = win_rate_post(records, focal);
    m.nrp = nrp(records, focal, denominator);
  }
  m.nda = lenient([&] { return nda(records); });
  int clean = 0;
  int flagged = 0;
  for (const auto& r : records) {
    if (r.trigger_game) continue;
    ++clean;
    flagged += r.detection.has_value();
  }
  if (clean > 0) m.false_positive_rate = static_cast<double>(flagged) / clean;
  return m;
}

MetricsReport summarize(const std::vector<TrialRecord>& records,
                        const std::string& novelty_class,
                        const std::string& difficulty) {
  MetricsReport m;
  m.novelty_class = novelty_class;
  m.difficulty = difficulty;
  m.trials = static_cast<int>(records.size());
  std::vector<TrialRecord> ok;
  for (const auto& r : records) {
    if (r.error.empty()) {
      ok.push_back(r);
    } else {
      ++m.errors;
    }
  }
  if (ok.empty()) return m;
  const int focal = ok[0].focal;
  const NrpDenominator denom = ok[0].nrp_denominator;
  int clean = 0;
  int flagged = 0;
  for (const auto& r : ok) {
    for (const auto& g : r.games) (g.novelty_active ? m.post_games : m.pre_games)++;
    if (!r.trigger_game) {
      ++clean;
      flagged += r.detection.has_value();
    }
  }
  m.pnwp = lenient([&] { return pnwp(ok, focal); });
  m.win_rate_post = lenient([&] { return win_rate_post(ok, focal); });
  m.nda = lenient([&] { return nda(ok); });
  m.nrp = lenient([&] { return nrp(ok, focal, denom); });
  if (clean > 0) m.false_positive_rate = static_cast<double>(flagged) / clean;
  return m;
}

std::vector<MetricsReport> report_rows(const std::vector<TrialRecord>& records) {
  static const std::vector<std::string> kClasses = {"CN", "AN", "RN", "none"};
  static const std::vector<std::string> kLevels = {"easy", "medium", "hard", "-"};
  std::map<std::pair<int, int>, std::vector<TrialRecord>> groups;
  for (const auto& r : records) {
    const auto c = std::find(kClasses.begin(), kClasses.end(), class_name(r));
    const auto d = std::find(kLevels.begin(), kLevels.end(), difficulty_name(r));
    groups[{static_cast<int>(c - kClasses.begin()), static_cast<int>(d - kLevels.begin())}]
        .push_back(r);
  }
  std::vector<MetricsReport> rows;
  for (const auto& [key, group] : groups) {
    rows.push_back(summarize(group, kClasses[key.first], kLevels[key.second]));
  }
  if (!records.empty()) rows.push_back(summarize(records, "all", "all"));
  return rows;
}

Json report_json(const std::vector<MetricsReport>& rows) {
  Json list = Json::array();
  for (const auto& m : rows) {
    list.push_back({{"class", m.novelty_class},
                    {"difficulty", m.difficulty},
                    {"trials", m.trials},
                    {"errors", m.errors},
                    {"pre_games", m.pre_games},
                    {"post_games", m.post_games},
                    {"pnwp", optional_json(m.pnwp)},
                    {"win_rate_post", optional_json(m.win_rate_post)},
                    {"nda", optional_json(m.nda)},
                    {"nrp", optional_json(m.nrp)},
                    {"false_positive_rate", optional_json(m.false_positive_rate)}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"rows", list}};
}

std::string report_csv(const std::vector<MetricsReport>& rows) {
  std::ostringstream out;
  out << "schema_version,class,difficulty,trials,errors,pre_games,post_games,"
         "pnwp,win_rate_post,nda,nrp,false_positive_rate\n";
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  for (const auto& m : rows) {
    out << kSchemaVersion << ',' << m.novelty_class << ',' << m.difficulty << ','
        << m.trials << ',' << m.errors << ',' << m.pre_games << ',' << m.post_games
        << ',' << cell(m.pnwp) << ',' << cell(m.win_rate_post) << ',' << cell(m.nda)
        << ',' << cell(m.nrp) << ',' << cell(m.false_positive_rate) << '\n';
  }
  return out.str();
}

SuiteResult run_suite(const std::vector<TrialConfig>& configs, int parallel,
                      const std::string& out_dir) {
  // Distinct directory per config, stable in config order.
  std::vector<std::string> dirs;
  std::set<std::string> used;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::string name = sanitize(configs[c].label);
    if (used.contains(name)) name += "_" + std::to_string(c);
    used.insert(name);
    dirs.push_back(name);
  }

  std::vector<std::pair<int, int>> jobs;
  SuiteResult result;
  result.records.resize(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    result.records[c].resize(configs[c].trials);
    for (int t = 0; t < configs[c].trials; ++t) jobs.emplace_back(static_cast<int>(c), t);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const auto [c, t] = jobs[k];
      const TrialConfig& config = configs[c];
      TrialHooks hooks;
      if (config.event_log && !out_dir.empty()) {
        hooks.record_events = [](int) { return true; };
        hooks.on_game = [&, c = c, t = t, header_config = trial_config_json(config)](
                            int g, const GameResult& game) {
          Json header{{"schema_version", kSchemaVersion},
                      {"type", "trial_game"},
                      {"trial", t},
                      {"game", g},
                      {"config", header_config}};
          std::string text = header.dump() + "\n";
          for (const auto& e : game.events) text += event_line(e) + "\n";
          write_file(fs::path(out_dir) / dirs[c] /
                         (indexed("trial", t) + "_" + indexed("game", g) + ".jsonl"),
                     text);
        };
      }
      result.records[c][t] = run_trial(config, t, hooks);
    }
  };
  const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> all;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (const auto& r : result.records[c]) {
      result.failed_trials += !r.error.empty();
      all.push_back(r);
      if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / dirs[c] / (indexed("trial", r.trial) + ".jsonl"),
                   trial_record_jsonl(r));
      }
    }
  }
  result.rows = report_rows(all);
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "report.json", report_json(result.rows).dump(2) + "\n");
    write_file(fs::path(out_dir) / "report.csv", report_csv(result.rows));
  }
  return result;
}

std::vector<TrialRecord> load_records(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("records: not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.rfind("trial_", 0) != 0 ||
        entry.path().extension() != ".jsonl" || name.find("_game_") != std::string::npos) {
      continue;
    }
    paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<TrialRecord> records;
  for (const auto& p : paths) {
    try {
      records.push_back(parse_trial_record(read_file(p)));
    } catch (const ConfigError& e) {
      throw ConfigError(p + ": " + e.what());
    }
  }
  return records;
}

Json game_header_json(const GameSetup& setup) {
  Json roster = Json::array();
  for (const auto& a : setup.roster) roster.push_back(agent_spec_json(a));
  return Json{{"schema_version", kSchemaVersion},
              {"type", "game"},
              {"seed", setup.seed},
              {"max_rounds", setup.max_rounds},
              {"roster", roster},
              {"novelty", setup.novelty ? novelty_json(*setup.novelty) : Json(nullptr)},
              {"board_spec", Json::parse(serialize_board(setup.board))}};
}

GameResult play_logged_game(const GameSetup& setup, bool record_events,
                            GameObserver observer) {
  std::vector<std::unique_ptr<Agent>> agents;
  std::vector<Agent*> seats;
  for (std::size_t i = 0; i < setup.roster.size(); ++i) {
    agents.push_back(make_agent(setup.roster[i], setup.board,
                                derive_seed(setup.seed, kAgentStream + i)));
    seats.push_back(agents.back().get());
  }
  GameOptions options;
  options.max_rounds = setup.max_rounds;
  options.record_events = record_events;
  options.observer = std::move(observer);
  return play_game(seats, setup.board, setup.novelty ? &*setup.novelty : nullptr,
                   setup.seed, options);
}

std::string game_log(const GameSetup& setup, const GameResult& result) {
  std::string text = game_header_json(setup).dump() + "\n";
  for (const auto& e : result.events) {
    text += event_line(e);
    text += '\n';
  }
  return text;
}

ReplayOutcome replay_log(const std::string& path) {
  return replay_log_text(read_file(path));
}

ReplayOutcome replay_log_text(const std::string& text) {
  ReplayOutcome out;
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) lines.emplace_back(text.data() + pos, end - pos);
    pos = end + 1;
  }
  if (lines.empty()) {
    out.message = "empty log";
    return out;
  }
  Json header;
  try {
    header = Json::parse(lines[0]);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("log header: ") + e.what());
  }
  const std::string type = header.value("type", "");
  std::vector<GameEvent> events;
  try {
    if (type == "game") {
      GameSetup setup;
      setup.board = parse_board(header.at("board_spec").dump());
      for (std::size_t i = 0; i < header.at("roster").size(); ++i) {
        setup.roster.push_back(
            parse_agent_spec(header["roster"][i], "roster[" + std::to_string(i) + "]"));
      }
      if (!header.at("novelty").is_null()) setup.novelty = parse_novelty(header["novelty"]);
      setup.seed = header.at("seed").get<std::uint64_t>();
      setup.max_rounds = header.at("max_rounds").get<int>();
      events = play_logged_game(setup, true).events;
    } else if (type == "trial_game") {
      const TrialConfig config = parse_trial_config(header.at("config"));
      const int game = header.at("game").get<int>();
      TrialHooks hooks;
      hooks.stop_after = game;
      hooks.record_events = [game](int g) { return g == game; };
      hooks.on_game = [&](int g, const GameResult& r) {
        if (g == game) events = r.events;
      };
      const TrialRecord rec = run_trial(config, header.at("trial").get<int>(), hooks);
      if (!rec.error.empty()) throw std::runtime_error(rec.error);
    } else {
      throw ConfigError("log header: unknown type '" + type + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("log header: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("log header: ") + e.what());
  }

  const std::size_t logged = lines.size() - 1;
  for (std::size_t i = 0; i < std::min(logged, events.size()); ++i) {
    if (event_line(events[i]) != lines[i + 1]) {
      out.lines_checked = i;
      out.message = "event " + std::to_string(i) + " differs: expected " +
                    std::string(lines[i + 1]) + ", replay produced " +
                    event_line(events[i]);
      return out;
    }
  }
  out.lines_checked = std::min(logged, events.size());
  if (logged != events.size()) {
    out.message = "log has " + std::to_string(logged) + " events, replay produced " +
                  std::to_string(events.size());
    return out;
  }
  out.ok = true;
  out.message = "replay matches " + std::to_string(logged) + " events";
  return out;
}

}  // namespace monolab
