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

#include "monolab/agent_factory.hpp"

#include <fstream>
#include <set>

#include "monolab/baselines.hpp"
#include "monolab/value_agent.hpp"

namespace monolab {
namespace {

void allow_only(const Json& params, const std::set<std::string>& keys,
                const std::string& where) {
  for (const auto& [key, value] : params.items()) {
    if (!keys.contains(key)) {
      throw ConfigError(where + ".params." + key + ": unknown parameter");
    }
  }
}

template <typename T>
T param(const Json& params, const char* key, T fallback, const std::string& where) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + ".params." + key + ": wrong type");
  }
}

}  // namespace

AgentSpec parse_agent_spec(const Json& j, const std::string& where) {
  AgentSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
  } else if (j.is_object() && j.contains("agent") && j["agent"].is_string()) {
    spec.name = j["agent"].get<std::string>();
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ConfigError(where + ".params: expected object");
      spec.params = j["params"];
    }
  } else {
    throw ConfigError(where + ": expected an agent name or {\"agent\": ..., \"params\": {...}}");
  }
  if (spec.name != "value" && spec.name != "random" && spec.name != "simple") {
    throw ConfigError(where + ".agent: unknown agent '" + spec.name + "'");
  }
  return spec;
}

Json agent_spec_json(const AgentSpec& spec) {
  return Json{{"agent", spec.name}, {"params", spec.params}};
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const BoardSpec& known,
                                  std::uint64_t seed) {
  const std::string where = "agent[" + spec.name + "]";
  const Json& p = spec.params;
  if (spec.name == "random") {
    allow_only(p, {}, where);
    return random_legal_agent(seed);
  }
  if (spec.name == "simple") {
    allow_only(p, {"reserve", "bid_fraction"}, where);
    SimpleParams sp;
    sp.reserve = param<double>(p, "reserve", sp.reserve, where);
    sp.bid_fraction = param<double>(p, "bid_fraction", sp.bid_fraction, where);
    return simple_baseline_agent(sp);
  }
  if (spec.name == "value") {
    allow_only(p,
               {"k_short", "k_loops", "cash_min", "tie_tolerance", "min_rolls",
                "kl_threshold", "announce_threshold", "dice_prior", "adapt",
                "propose_trades", "trace_path"},
               where);
    ValueAgentOptions o;
    o.params.k_short = param<int>(p, "k_short", o.params.k_short, where);
    o.params.k_loops = param<int>(p, "k_loops", o.params.k_loops, where);
    o.params.cash_min = param<double>(p, "cash_min", o.params.cash_min, where);
    o.params.tie_tolerance = param<double>(p, "tie_tolerance", o.params.tie_tolerance, where);
    o.drift.min_rolls = param<long>(p, "min_rolls", o.drift.min_rolls, where);
    o.drift.kl_threshold = param<double>(p, "kl_threshold", o.drift.kl_threshold, where);
    o.announce_threshold =
        param<double>(p, "announce_threshold", o.announce_threshold, where);
    o.dice_prior = param<double>(p, "dice_prior", o.dice_prior, where);
    o.adapt = param<bool>(p, "adapt", o.adapt, where);
    o.propose_trades = param<bool>(p, "propose_trades", o.propose_trades, where);
    if (o.params.k_short < 1 || o.params.k_loops < 1) {
      throw ConfigError(where + ".params: k_short and k_loops must be at least 1");
    }
    if (!(o.dice_prior > 1.0)) {
      throw ConfigError(where + ".params.dice_prior: must exceed 1");
    }
    const auto trace_path = param<std::string>(p, "trace_path", "", where);
    if (!trace_path.empty()) {
      auto out = std::make_shared<std::ofstream>(trace_path, std::ios::app);
      if (!*out) throw ConfigError(where + ".params.trace_path: cannot open " + trace_path);
      o.trace = out;
    }
    return std::make_unique<ValueAgent>(known, std::move(o));
  }
  throw ConfigError(where + ": unknown agent");
}

}  // namespace monolab
