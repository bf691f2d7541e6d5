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

#ifndef MONOLAB_EVENT_LOG_HPP_
#define MONOLAB_EVENT_LOG_HPP_

#include <string>

#include "monolab/engine.hpp"
#include "monolab/json_util.hpp"

namespace monolab {

// {"round", "kind", "player", "payload"}; payload carries only the fields
// that are set for the event.
Json event_json(const GameEvent& event);
std::string event_line(const GameEvent& event);

}  // namespace monolab

#endif  // MONOLAB_EVENT_LOG_HPP_
