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

#ifndef MONOLAB_AGENT_FACTORY_HPP_
#define MONOLAB_AGENT_FACTORY_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "monolab/agent.hpp"
#include "monolab/json_util.hpp"

namespace monolab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentSpec {
  std::string name;  // "value", "random" or "simple"
  Json params = Json::object();
};

AgentSpec parse_agent_spec(const Json& j, const std::string& where);
Json agent_spec_json(const AgentSpec& spec);

// `known` is the pre-novelty rulebook handed to agents that track beliefs.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const BoardSpec& known,
                                  std::uint64_t seed);

}  // namespace monolab

#endif  // MONOLAB_AGENT_FACTORY_HPP_
